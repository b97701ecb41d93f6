from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import ArgumentError, ValidationError
from src.tensor import DenseTensor
from .generators import hermitian_basis, is_hermitian, is_unitary
from .haar import haar_sample


@lru_cache(maxsize=1024)
def _spectral(g: DenseTensor) -> Tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(g.data)
    return w, v


def expi(theta: float, g: DenseTensor) -> np.ndarray:
    """exp(i theta G) for Hermitian G via its eigendecomposition."""
    w, v = _spectral(g)
    return (v * np.exp(1j * theta * w)[np.newaxis, :]) @ v.conj().T


def _chain(mats: Sequence[np.ndarray], dim: int) -> np.ndarray:
    out = np.eye(dim, dtype=np.complex128)
    for m in mats:
        out = out @ m
    return out


@dataclass(frozen=True, eq=False)
class ParamUnitarySite:
    """
    U = prod_xi exp(i theta_xi G_xi) in generator order, split as U- U+ with
    U- built from generators 1..split and U+ from the rest.
    """

    dim: int
    generators: Tuple[DenseTensor, ...]
    angles: np.ndarray
    split: int

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=np.float64).copy()
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "generators", tuple(self.generators))

        if len(self.generators) != angles.size:
            raise ArgumentError(f"{len(self.generators)} generators but {angles.size} angles")
        if not 1 <= self.split < len(self.generators):
            raise ArgumentError(f"split {self.split} outside [1, {len(self.generators) - 1}]")
        for xi, g in enumerate(self.generators, start=1):
            if g.shape != (self.dim, self.dim):
                raise ArgumentError(f"generator {xi} has shape {g.shape}, expected {(self.dim, self.dim)}")
            if not is_hermitian(g.data):
                raise ArgumentError(f"generator {xi} is not Hermitian")

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, split: Optional[int] = None) -> "ParamUnitarySite":
        """Full generator basis with angles uniform on [-pi, pi)."""
        generators = hermitian_basis(dim)
        angles = rng.uniform(-np.pi, np.pi, size=len(generators))
        return cls(dim, generators, angles, split or len(generators) // 2)

    def __len__(self):
        return len(self.generators)

    def with_angle(self, k: int, theta: float) -> "ParamUnitarySite":
        angles = np.array(self.angles)
        angles[k - 1] = theta
        return ParamUnitarySite(self.dim, self.generators, angles, self.split)

    def factors(self):
        return [expi(t, g) for t, g in zip(self.angles, self.generators)]

    def u_minus(self) -> DenseTensor:
        return DenseTensor(_chain(self.factors()[: self.split], self.dim))

    def u_plus(self) -> DenseTensor:
        return DenseTensor(_chain(self.factors()[self.split :], self.dim))


def build_unitary(site: ParamUnitarySite) -> DenseTensor:
    return DenseTensor(_chain(site.factors(), site.dim))


def derivative_factors(site: ParamUnitarySite, k: int) -> Tuple[DenseTensor, DenseTensor, DenseTensor]:
    """
    Split dU/dtheta_k = i * left @ G_k @ right.

    G_k is placed right after its own factor exp(i theta_k G_k), so left is the
    product of factors 1..k and right the product of factors k+1..K.
    """
    if not 1 <= k <= len(site):
        raise ArgumentError(f"parameter index {k} outside [1, {len(site)}]")
    factors = site.factors()
    left = _chain(factors[:k], site.dim)
    right = _chain(factors[k:], site.dim)
    return DenseTensor(left), site.generators[k - 1], DenseTensor(right)


@dataclass(frozen=True, eq=False)
class HaarSplitSite:
    """U(theta) = U- exp(i theta G) U+ with U-, U+ Haar and G the derivative direction."""

    u_minus: DenseTensor
    u_plus: DenseTensor
    generator: DenseTensor
    angle: float = field(default=0.0)

    def __post_init__(self):
        for name in ("u_minus", "u_plus"):
            if not is_unitary(getattr(self, name).data):
                raise ValidationError(f"{name} is not unitary")
        if not is_hermitian(self.generator.data):
            raise ArgumentError("derivative generator is not Hermitian")

    @classmethod
    def sample(cls, dim: int, rng: np.random.Generator, generator: Optional[DenseTensor] = None) -> "HaarSplitSite":
        if generator is None:
            generator = hermitian_basis(dim)[0]
        return cls(haar_sample(dim, rng), haar_sample(dim, rng), generator)

    @property
    def dim(self) -> int:
        return self.u_minus.shape[0]

    def with_angle(self, angle: float) -> "HaarSplitSite":
        return HaarSplitSite(self.u_minus, self.u_plus, self.generator, angle)

    def build(self) -> DenseTensor:
        return DenseTensor(self.u_minus.data @ expi(self.angle, self.generator) @ self.u_plus.data)

    def derivative(self) -> DenseTensor:
        """dU/dtheta = i U- exp(i theta G) G U+."""
        inner = expi(self.angle, self.generator) @ self.generator.data
        return DenseTensor(1j * self.u_minus.data @ inner @ self.u_plus.data)
