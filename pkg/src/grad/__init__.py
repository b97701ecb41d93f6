from .params import (
    Mode,
    GradTarget,
    Parameterization,
    ThetaParameterization,
    HaarSplitParameterization,
    RawParameterization,
    direction_count,
)
from .gradient import analytic_grad, finite_diff_grad, central_difference
