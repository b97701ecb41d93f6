"""
State parameterizations that can be shifted along one derivative direction.

Each parameterization produces its MpsState, a copy perturbed by h along a
GradTarget, and (except raw tensors) the exact site derivative dA/dtheta.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.errors import ArgumentError, UnsupportedError
from src.mps import MpsState, embed_unitary_mps, random_raw_mps, replace_site, unit_to_site
from src.tensor import DenseTensor
from src.unitary import HaarSplitSite, ParamUnitarySite, build_unitary, derivative_factors, haar_sample


class Mode(str, Enum):
    THETA = "theta"
    HAAR_SPLIT = "haar_split"
    RAW_TENSOR = "raw_tensor"


@dataclass(frozen=True)
class GradTarget:
    """Derivative direction: 1-based site and 1-based parameter index (unused in haar_split mode)."""

    site: int
    param_index: Optional[int]
    mode: Mode

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.site < 1:
            raise ArgumentError(f"gradient site must be >= 1, got {self.site}")
        if self.mode != Mode.HAAR_SPLIT and (self.param_index is None or self.param_index < 1):
            raise ArgumentError(f"{self.mode.value} mode needs a parameter index >= 1")


class Parameterization:
    mode: Mode

    def state(self) -> MpsState:
        raise NotImplementedError

    def perturbed(self, target: GradTarget, h: float) -> "Parameterization":
        raise NotImplementedError

    def site_derivative(self, target: GradTarget) -> DenseTensor:
        raise NotImplementedError

    def directions(self, site: int) -> int:
        raise NotImplementedError

    def _check(self, target: GradTarget, n: int):
        if target.mode != self.mode:
            raise ArgumentError(f"{target.mode.value} target on a {self.mode.value} parameterization")
        if not 1 <= target.site <= n:
            raise ArgumentError(f"gradient site {target.site} outside [1, {n}]")
        if target.param_index is not None and target.param_index > self.directions(target.site):
            raise ArgumentError(
                f"parameter index {target.param_index} outside [1, {self.directions(target.site)}]"
            )


@dataclass(frozen=True, eq=False)
class ThetaParameterization(Parameterization):
    """Every site unitary is prod_xi exp(i theta_xi G_xi)."""

    sites: Tuple[ParamUnitarySite, ...]
    d: int
    D: int
    mode = Mode.THETA

    @classmethod
    def random(cls, n: int, d: int, D: int, rng: np.random.Generator, split: Optional[int] = None):
        return cls(tuple(ParamUnitarySite.random(d * D, rng, split) for _ in range(n)), d, D)

    def state(self) -> MpsState:
        return embed_unitary_mps([build_unitary(s) for s in self.sites], self.d, self.D)

    def perturbed(self, target: GradTarget, h: float) -> "ThetaParameterization":
        self._check(target, len(self.sites))
        site = self.sites[target.site - 1]
        k = target.param_index
        sites = list(self.sites)
        sites[target.site - 1] = site.with_angle(k, site.angles[k - 1] + h)
        return ThetaParameterization(tuple(sites), self.d, self.D)

    def site_derivative(self, target: GradTarget) -> DenseTensor:
        self._check(target, len(self.sites))
        left, g, right = derivative_factors(self.sites[target.site - 1], target.param_index)
        return unit_to_site(DenseTensor(1j * left.data @ g.data @ right.data), self.d, self.D)

    def directions(self, site: int) -> int:
        return len(self.sites[site - 1])


@dataclass(frozen=True, eq=False)
class HaarSplitParameterization(Parameterization):
    """
    Haar units everywhere except the derivative site, which is U- exp(i theta G) U+
    evaluated at theta = 0.
    """

    units: Tuple[Optional[DenseTensor], ...]
    split: HaarSplitSite
    site: int
    d: int
    D: int
    mode = Mode.HAAR_SPLIT

    @classmethod
    def random(
        cls,
        n: int,
        d: int,
        D: int,
        site: int,
        rng: np.random.Generator,
        generator: Optional[DenseTensor] = None,
    ):
        if not 1 <= site <= n:
            raise ArgumentError(f"gradient site {site} outside [1, {n}]")
        N = d * D
        units = []
        split = None
        for i in range(1, n + 1):
            if i == site:
                split = HaarSplitSite.sample(N, rng, generator)
                units.append(None)
            else:
                units.append(haar_sample(N, rng))
        return cls(tuple(units), split, site, d, D)

    def _units(self):
        return [self.split.build() if i == self.site else u for i, u in enumerate(self.units, start=1)]

    def state(self) -> MpsState:
        return embed_unitary_mps(self._units(), self.d, self.D)

    def _check_site(self, target: GradTarget):
        self._check(target, len(self.units))
        if target.site != self.site:
            raise ArgumentError(f"haar_split state differentiates site {self.site}, not {target.site}")

    def perturbed(self, target: GradTarget, h: float) -> "HaarSplitParameterization":
        self._check_site(target)
        split = self.split.with_angle(self.split.angle + h)
        return HaarSplitParameterization(self.units, split, self.site, self.d, self.D)

    def site_derivative(self, target: GradTarget) -> DenseTensor:
        self._check_site(target)
        return unit_to_site(self.split.derivative(), self.d, self.D)

    def directions(self, site: int) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class RawParameterization(Parameterization):
    """
    Raw site tensors; direction k runs over the real parts of the d*D*D entries
    (row-major), then over their imaginary parts when entries are complex.
    """

    mps: MpsState
    complex_entries: bool = True
    mode = Mode.RAW_TENSOR

    @classmethod
    def random(cls, n: int, d: int, D: int, rng: np.random.Generator, complex_entries: bool = True):
        return cls(random_raw_mps(n, d, D, rng, complex_entries), complex_entries)

    def state(self) -> MpsState:
        return self.mps

    def perturbed(self, target: GradTarget, h: float) -> "RawParameterization":
        self._check(target, self.mps.n)
        a = self.mps.site(target.site)
        size = a.data.size
        k = target.param_index - 1
        shift = np.zeros(size, dtype=np.complex128)
        shift[k % size] = h if k < size else 1j * h
        tensor = DenseTensor(a.data + shift.reshape(a.shape))
        return RawParameterization(replace_site(self.mps, target.site, tensor), self.complex_entries)

    def site_derivative(self, target: GradTarget) -> DenseTensor:
        raise UnsupportedError("raw_tensor mode has no analytic gradient; use finite_diff_grad")

    def directions(self, site: int) -> int:
        size = self.mps.d * self.mps.D**2
        return 2 * size if self.complex_entries else size


def direction_count(params, site: int) -> int:
    """Number of derivative directions at a site, the set averaged over for grad index "all"."""
    return params.directions(site)
