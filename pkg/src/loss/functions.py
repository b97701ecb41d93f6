from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from src.errors import ArgumentError, DegenerateStateError, DimensionError, DivergenceError
from src.mps import (
    DEGENERATE_NORM,
    LocalObservable,
    MpsState,
    inner_product,
    local_expectation,
    norm_sq,
    sandwich,
    scale_site,
    to_statevector,
)
from src.tensor import DenseTensor

ACCEPT_FLOOR = 1e-300


class LossKind(str, Enum):
    FIDELITY = "fidelity"
    NORMALIZED = "normalized"
    KL = "kl"
    LOCAL = "local"
    LOCAL_NUMERATOR = "local_numerator"

    @property
    def is_global(self) -> bool:
        return self in (LossKind.FIDELITY, LossKind.NORMALIZED, LossKind.KL)


@dataclass(frozen=True, eq=False)
class TargetState:
    """
    The fixed target |phi> of the global losses, held either as an MPS or as a
    dense statevector of length d^n.
    """

    representation: Union[MpsState, DenseTensor]
    normalize: bool = True

    def __post_init__(self):
        rep = self.representation
        if isinstance(rep, DenseTensor) and rep.rank != 1:
            raise DimensionError(f"dense target must be a vector, got shape {rep.shape}")
        if not self.normalize:
            return
        z = self._raw_norm_sq(rep)
        if z < DEGENERATE_NORM:
            raise DegenerateStateError("cannot normalize a zero target")
        if isinstance(rep, MpsState):
            rep = scale_site(rep, 1, 1.0 / np.sqrt(z))
        else:
            rep = rep.scaled(1.0 / np.sqrt(z))
        object.__setattr__(self, "representation", rep)

    @staticmethod
    def _raw_norm_sq(rep) -> float:
        if isinstance(rep, MpsState):
            return norm_sq(rep)
        return float(np.vdot(rep.data, rep.data).real)

    @classmethod
    def uniform(cls, n: int, d: int, bond: int = 1, normalize: bool = True) -> "TargetState":
        """Every element of every site tensor C^(i)_j fixed to 1."""
        site = DenseTensor(np.ones((d, bond, bond)))
        return cls(MpsState(tuple(site for _ in range(n))), normalize)

    @property
    def norm_sq(self) -> float:
        return self._raw_norm_sq(self.representation)

    def overlap(self, psi: MpsState) -> complex:
        """<phi|psi>."""
        rep = self.representation
        if isinstance(rep, MpsState):
            return inner_product(psi, rep)
        vec = to_statevector(psi)
        if vec.shape != rep.shape:
            raise DimensionError(f"target has {rep.shape[0]} amplitudes, state has {vec.shape[0]}")
        return complex(np.vdot(rep.data, vec.data))


def _checked_norm(psi: MpsState) -> float:
    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM:.0e}")
    return z


def global_fidelity_loss(psi: MpsState, phi: TargetState) -> float:
    return 1.0 - abs(phi.overlap(psi)) ** 2


def normalized_global_loss(psi: MpsState, phi: TargetState) -> float:
    z = _checked_norm(psi)
    return 1.0 - abs(phi.overlap(psi)) ** 2 / z


def accept_probability(psi: MpsState, phi: TargetState) -> float:
    """|<phi|psi>| / (sqrt(Z) ||phi||), the modulus rather than its square."""
    z = _checked_norm(psi)
    return abs(phi.overlap(psi)) / np.sqrt(z * phi.norm_sq)


def kl_loss(psi: MpsState, phi: TargetState) -> float:
    """KL(Q||P) in nats with Q_accept = 1, i.e. -ln P_accept."""
    p = accept_probability(psi, phi)
    if p <= ACCEPT_FLOOR:
        raise DivergenceError(f"accept probability {p:.3e} makes the KL divergence infinite")
    return -np.log(min(p, 1.0))


def local_loss(psi: MpsState, obs: LocalObservable) -> float:
    return local_expectation(psi, obs)


def local_numerator(psi: MpsState, obs: LocalObservable) -> float:
    return sandwich(psi, psi, {obs.site: obs.matrix}).real


@dataclass(frozen=True)
class LossProblem:
    """A loss kind bound to its fixed data (target for global kinds, observable for local ones)."""

    kind: LossKind
    target: Optional[TargetState] = None
    observable: Optional[LocalObservable] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LossKind(self.kind))
        if self.kind.is_global and self.target is None:
            raise ArgumentError(f"{self.kind.value} loss needs a target state")
        if not self.kind.is_global and self.observable is None:
            raise ArgumentError(f"{self.kind.value} loss needs an observable")

    def evaluate(self, psi: MpsState) -> float:
        if self.kind == LossKind.FIDELITY:
            return global_fidelity_loss(psi, self.target)
        if self.kind == LossKind.NORMALIZED:
            return normalized_global_loss(psi, self.target)
        if self.kind == LossKind.KL:
            return kl_loss(psi, self.target)
        if self.observable.site > psi.n:
            raise ArgumentError(f"observable site {self.observable.site} outside [1, {psi.n}]")
        if self.kind == LossKind.LOCAL:
            return local_loss(psi, self.observable)
        return local_numerator(psi, self.observable)
