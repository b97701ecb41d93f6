from .haar import haar_sample, sample_stream
from .generators import hermitian_basis, is_hermitian, is_unitary
from .site import ParamUnitarySite, HaarSplitSite, build_unitary, derivative_factors, expi
