"""
Exact Haar averages of gradient moments for small unitary-embedded MPS.

Every site unitary is an independent Haar draw; on the derivative site the
unitary is U- exp(i theta G) U+ at theta = 0 with U-, U+ independent. The
derivative of the bilinear numerator is s (X + Y) with

    X = <psi| W |dpsi>,  Y = <dpsi| W |psi>,

W = |phi><phi| (s = -1) or the local observable (s = +1). Each of X, Y and
their pairwise products is a periodic ring of site transfer matrices, and by
independence the Haar average of the ring is the ring of averaged transfer
matrices. Averages over a single unitary are exact moment tensors.
"""

from dataclasses import dataclass, field
from itertools import product
from string import ascii_letters
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ArgumentError, DimensionError, SizeGuardError, UnsupportedError, ValidationError
from src.loss import LossKind, TargetState
from src.mps import LocalObservable, MpsState
from src.tensor import DenseTensor
from src.unitary import hermitian_basis, is_hermitian

from .calculus import moment_tensor

ORACLE_LIMIT = 2**16


@dataclass(frozen=True, eq=False)
class OracleConfig:
    n: int
    d: int
    D: int
    loss: LossKind
    site: int = 1
    observable: Optional[LocalObservable] = None
    target: Optional[TargetState] = None
    generator: Optional[DenseTensor] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "loss", LossKind(self.loss))
        if self.n < 1 or self.d < 2 or self.D < 1:
            raise ArgumentError(f"invalid sizes n={self.n}, d={self.d}, D={self.D}")
        if self.d**self.n > ORACLE_LIMIT:
            raise SizeGuardError(f"d^n = {self.d}^{self.n} exceeds the oracle limit {ORACLE_LIMIT}")
        if not 1 <= self.site <= self.n:
            raise ArgumentError(f"gradient site {self.site} outside [1, {self.n}]")
        if self.loss == LossKind.KL:
            raise UnsupportedError("the exact oracle averages bilinear numerators; KL has none")

        N = self.d * self.D
        if self.generator is None:
            object.__setattr__(self, "generator", hermitian_basis(N)[0])
        if self.generator.shape != (N, N):
            raise DimensionError(f"generator has shape {self.generator.shape}, expected {(N, N)}")
        if not is_hermitian(self.generator.data):
            raise ValidationError("derivative generator is not Hermitian")

        if self.loss.is_global:
            if self.target is None:
                object.__setattr__(self, "target", TargetState.uniform(self.n, self.d))
            if not isinstance(self.target.representation, MpsState):
                raise UnsupportedError("the exact oracle needs an MPS target")
            if self.target.representation.n != self.n or self.target.representation.d != self.d:
                raise DimensionError("target does not match n and d")
        else:
            if self.observable is None:
                raise ArgumentError(f"{self.loss.value} loss needs an observable")
            if not 1 <= self.observable.site <= self.n:
                raise ArgumentError(f"observable site {self.observable.site} outside [1, {self.n}]")

    @property
    def N(self) -> int:
        return self.d * self.D

    @property
    def sign(self) -> float:
        return -1.0 if self.loss.is_global else 1.0


def _target_mpo(target: TargetState) -> List[np.ndarray]:
    """W_i[j', j, (a, a'), (b, b')] = C[j', a, b] conj(C[j, a', b'])."""
    out = []
    for c in target.representation.sites:
        d, chi, _ = c.shape
        w = np.einsum("Jab,jcd->Jjacbd", c.data, c.data.conj())
        out.append(w.reshape(d, d, chi * chi, chi * chi))
    return out


def _local_mpo(n: int, d: int, ops: Sequence[Tuple[int, np.ndarray]]) -> List[np.ndarray]:
    mats = [np.eye(d, dtype=np.complex128) for _ in range(n)]
    for site, m in ops:
        mats[site - 1] = m
    return [m.reshape(d, d, 1, 1) for m in mats]


def _site_moment(N: int, t: int, middles: Optional[Sequence[Tuple[np.ndarray, np.ndarray]]]) -> np.ndarray:
    """
    Averaged t-fold tensor of one site's unitary, axes (a, b, a', b') per replica.

    With middles, the site unitary is U- M U+ in the ket and U- M' U+ in the bra
    of each replica; middles[l] = (M, M').
    """
    m = moment_tensor(N, t).array
    if middles is None:
        return m

    letters = iter(ascii_letters)
    minus, ket, bra, plus, out = [], [], [], [], []
    for l in range(t):
        a, c, ap, cp, e, ep, b, bp = (next(letters) for _ in range(8))
        minus.append(a + c + ap + cp)
        ket.append(c + e)
        bra.append(cp + ep)
        plus.append(e + b + ep + bp)
        out.append(a + b + ap + bp)
    spec = "".join(minus) + "," + ",".join(ket) + "," + ",".join(bra) + "," + "".join(plus) + "->" + "".join(out)
    operands = [m] + [mid[0] for mid in middles] + [mid[1].conj() for mid in middles] + [m]
    return np.einsum(spec, *operands, optimize=True)


def _averaged_transfer(moment: np.ndarray, mpos: Sequence[np.ndarray], d: int, D: int) -> np.ndarray:
    """
    Haar-averaged transfer matrix of one site for t = len(mpos) replicas.

    Ket sites read A_j[l, r] = U[(j, r), l], bra sites conj(U[(j', r'), l']); only
    columns b < D enter. Rows are (l, l', w) and columns (r, r', v) per replica.
    """
    t = len(mpos)
    N = d * D
    k = moment.reshape((d, D, N, d, D, N) * t)
    k = k[(slice(None), slice(None), slice(0, D)) * (2 * t)]

    letters = iter(ascii_letters)
    k_sub, w_subs, rows, cols = "", [], "", ""
    for l in range(t):
        j, r, lb, jp, rp, lp, w, v = (next(letters) for _ in range(8))
        k_sub += j + r + lb + jp + rp + lp
        w_subs.append(jp + j + w + v)
        rows += lb + lp + w
        cols += r + rp + v
    spec = k_sub + "," + ",".join(w_subs) + "->" + rows + cols
    out = np.einsum(spec, k, *mpos, optimize=True)
    dim = int(np.prod(out.shape[: 3 * t]))
    return out.reshape(dim, dim)


def _ring(transfers: Sequence[np.ndarray]) -> complex:
    acc = transfers[0]
    for t in transfers[1:]:
        acc = acc @ t
    return complex(np.trace(acc))


def _mpo(cfg: OracleConfig) -> List[np.ndarray]:
    if cfg.loss.is_global:
        return _target_mpo(cfg.target)
    return _local_mpo(cfg.n, cfg.d, [(cfg.observable.site, cfg.observable.matrix.data)])


def _quantity_middles(cfg: OracleConfig, which: str) -> Tuple[np.ndarray, np.ndarray]:
    """(ket middle, bra middle) for X (derivative on the ket) or Y (on the bra)."""
    ig = 1j * cfg.generator.data
    eye = np.eye(cfg.N, dtype=np.complex128)
    return (ig, eye) if which == "X" else (eye, ig)


def _ring_average(cfg: OracleConfig, mpo: Sequence[np.ndarray], middles) -> complex:
    t = len(middles)
    plain = _site_moment(cfg.N, t, None)
    transfers = []
    for i in range(1, cfg.n + 1):
        moment = _site_moment(cfg.N, t, middles) if i == cfg.site else plain
        transfers.append(_averaged_transfer(moment, [mpo[i - 1]] * t, cfg.d, cfg.D))
    return _ring(transfers)


def exact_grad_mean(cfg: OracleConfig) -> float:
    """Haar average of d(numerator)/dtheta, which the loss kinds with a numerator share."""
    mpo = _mpo(cfg)
    total = sum(_ring_average(cfg, mpo, [_quantity_middles(cfg, q)]) for q in ("X", "Y"))
    return cfg.sign * total.real


def exact_grad_second_moment(cfg: OracleConfig) -> float:
    mpo = _mpo(cfg)
    total = 0j
    for qa, qb in product(("X", "Y"), repeat=2):
        total += _ring_average(cfg, mpo, [_quantity_middles(cfg, qa), _quantity_middles(cfg, qb)])
    return total.real


def exact_grad_variance(cfg: OracleConfig) -> float:
    mean = exact_grad_mean(cfg)
    return exact_grad_second_moment(cfg) - mean**2


def exact_norm_moments(n: int, d: int, D: int) -> Tuple[float, float]:
    """(E <psi|psi>, E <psi|psi>^2) over independent Haar site unitaries."""
    if d**n > ORACLE_LIMIT:
        raise SizeGuardError(f"d^n = {d}^{n} exceeds the oracle limit {ORACLE_LIMIT}")
    mpo = _local_mpo(n, d, [])
    values = []
    for t in (1, 2):
        moment = _site_moment(d * D, t, None)
        transfer = _averaged_transfer(moment, [mpo[0]] * t, d, D)
        values.append(_ring([transfer] * n).real)
    return values[0], values[1]
