from .combinatorics import (
    Partition,
    Perm,
    partitions_of,
    permutations_of,
    hook_dimension,
    schur_dimension,
    character,
    character_table,
)
from .calculus import MomentTensor, MomentCheck, moment_tensor, sampled_moment_check, weingarten, gram_identity_holds
from .oracle import (
    ORACLE_LIMIT,
    OracleConfig,
    exact_grad_mean,
    exact_grad_second_moment,
    exact_grad_variance,
    exact_norm_moments,
)
