"""
Transfer-matrix contraction of periodic MPS pairs.

For a ket site A and bra site B the transfer matrix is
T[(l, m), (r, s)] = sum_j conj(B_j[m, s]) A_j[l, r]; a single-site operator O is
inserted as sum_{j', j} conj(B_j'[m, s]) O[j', j] A_j[l, r]. The periodic
boundary closes the chain with a trace over the product of transfer matrices.
"""

from typing import Mapping, Optional

import numpy as np

from src.errors import DegenerateStateError, DimensionError, SizeGuardError
from src.tensor import DenseTensor, contract, reshape, transpose

from .state import LocalObservable, MpsState, _site_index

DEGENERATE_NORM = 1e-14
STATEVECTOR_LIMIT = 2**20


def transfer_matrix(ket: DenseTensor, bra: DenseTensor, op: Optional[DenseTensor] = None) -> DenseTensor:
    if op is not None:
        ket = contract(op, ket, [(1, 0)])
    dk, db = ket.shape[1], bra.shape[1]
    # (l, r, m, s) -> (l, m, r, s)
    t = transpose(contract(ket, bra.conj(), [(0, 0)]), (0, 2, 1, 3))
    return reshape(t, (dk * db, dk * db))


def _check_pair(bra: MpsState, ket: MpsState):
    if bra.n != ket.n or bra.d != ket.d:
        raise DimensionError(f"cannot pair n={ket.n}, d={ket.d} with n={bra.n}, d={bra.d}")


def sandwich(bra: MpsState, ket: MpsState, ops: Optional[Mapping[int, DenseTensor]] = None) -> complex:
    """<bra| prod_i O_i |ket> with operators keyed by 1-based site."""
    _check_pair(bra, ket)
    ops = dict(ops or {})
    for i, op in ops.items():
        _site_index(i, ket.n)
        if op.shape != (ket.d, ket.d):
            raise DimensionError(f"operator at site {i} has shape {op.shape}, expected {(ket.d, ket.d)}")

    chain = None
    for i in range(1, ket.n + 1):
        t = transfer_matrix(ket.site(i), bra.site(i), ops.get(i))
        chain = t if chain is None else contract(chain, t, [(1, 0)])
    return complex(np.trace(chain.data))


def inner_product(psi: MpsState, phi: MpsState) -> complex:
    """<phi|psi>."""
    return sandwich(phi, psi)


def norm_sq(psi: MpsState) -> float:
    return sandwich(psi, psi).real


def local_expectation(psi: MpsState, obs: LocalObservable) -> float:
    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM:.0e}")
    return sandwich(psi, psi, {obs.site: obs.matrix}).real / z


def to_statevector(psi: MpsState) -> DenseTensor:
    """Dense amplitudes Tr[A_{j1} ... A_{jn}], first site most significant."""
    if psi.d**psi.n > STATEVECTOR_LIMIT:
        raise SizeGuardError(f"d^n = {psi.d}^{psi.n} exceeds the statevector limit {STATEVECTOR_LIMIT}")

    # acc[J, l, r] = (A_{j1} ... A_{jk})[l, r]
    acc = psi.sites[0].data
    for a in psi.sites[1:]:
        acc = np.einsum("Jlm,jmr->Jjlr", acc, a.data).reshape(-1, psi.D, psi.D)
    return DenseTensor(np.trace(acc, axis1=1, axis2=2))
