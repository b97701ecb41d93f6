from .functions import (
    LossKind,
    TargetState,
    LossProblem,
    global_fidelity_loss,
    normalized_global_loss,
    accept_probability,
    kl_loss,
    local_loss,
    local_numerator,
)
