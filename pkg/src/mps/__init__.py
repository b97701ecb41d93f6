from .state import (
    MpsState,
    LocalObservable,
    unit_to_site,
    embed_unitary_mps,
    random_embedded_mps,
    random_raw_mps,
    replace_site,
    scale_site,
    pauli,
    observable,
)
from .contract import (
    DEGENERATE_NORM,
    transfer_matrix,
    sandwich,
    inner_product,
    norm_sq,
    local_expectation,
    to_statevector,
)
