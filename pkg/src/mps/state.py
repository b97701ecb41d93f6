from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple

import numpy as np

from src.errors import ArgumentError, DimensionError, ValidationError
from src.tensor import DenseTensor, reshape, transpose
from src.unitary import haar_sample, is_hermitian, is_unitary


@dataclass(frozen=True, eq=False)
class MpsState:
    """
    Periodic MPS |psi> = sum_J Tr[A^(1)_{j1} ... A^(n)_{jn}] |J>.

    Each site tensor has axes (j, l, r) of shape (d, D, D). Sites are 1-based
    wherever an index is taken from the caller.
    """

    sites: Tuple[DenseTensor, ...]
    origin: Literal["raw", "embedded"] = "raw"
    units: Optional[Tuple[DenseTensor, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        if not self.sites:
            raise DimensionError("an MPS needs at least one site")
        shape = self.sites[0].shape
        if len(shape) != 3 or shape[1] != shape[2]:
            raise DimensionError(f"site tensors must be (d, D, D), got {shape}")
        for i, a in enumerate(self.sites, start=1):
            if a.shape != shape:
                raise DimensionError(f"site {i} has shape {a.shape}, site 1 has {shape}")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def d(self) -> int:
        return self.sites[0].shape[0]

    @property
    def D(self) -> int:
        return self.sites[0].shape[1]

    def site(self, i: int) -> DenseTensor:
        return self.sites[_site_index(i, self.n)]


@dataclass(frozen=True, eq=False)
class LocalObservable:
    matrix: DenseTensor
    site: int

    def __post_init__(self):
        m = self.matrix.data
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"observable must be square, got {m.shape}")
        if not is_hermitian(m):
            raise ValidationError("observable is not Hermitian")
        if self.site < 1:
            raise ArgumentError(f"observable site must be >= 1, got {self.site}")

    @property
    def traceless(self) -> bool:
        return abs(np.trace(self.matrix.data)) <= 1e-12

    def shifted(self, c: float) -> "LocalObservable":
        m = self.matrix.data
        return LocalObservable(DenseTensor(m + c * np.eye(m.shape[0])), self.site)


def _site_index(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise ArgumentError(f"site {i} outside [1, {n}]")
    return i - 1


def unit_to_site(u: DenseTensor, d: int, D: int) -> DenseTensor:
    """
    A_j[l, r] = <j, r| U |0, l>, composite index p * D + b (physical slot first).

    Linear in U, so it also maps dU/dtheta to the site derivative.
    """
    # columns |0, l> are the first D columns
    block = DenseTensor(u.data[:, :D])
    return transpose(reshape(block, (d, D, D)), (0, 2, 1))


def embed_unitary_mps(units: Sequence[DenseTensor], d: int, D: int) -> MpsState:
    N = d * D
    sites = []
    for i, u in enumerate(units, start=1):
        if u.shape != (N, N):
            raise DimensionError(f"unit {i} has shape {u.shape}, expected {(N, N)} for d={d}, D={D}")
        if not is_unitary(u.data):
            raise ValidationError(f"unit {i} is not unitary")
        sites.append(unit_to_site(u, d, D))
    return MpsState(tuple(sites), origin="embedded", units=tuple(units))


def random_embedded_mps(n: int, d: int, D: int, rng: np.random.Generator) -> MpsState:
    return embed_unitary_mps([haar_sample(d * D, rng) for _ in range(n)], d, D)


def random_raw_mps(n: int, d: int, D: int, rng: np.random.Generator, complex_entries: bool = True) -> MpsState:
    """Every real (and imaginary) part drawn uniformly from [-0.5, 0.5]."""
    sites = []
    for _ in range(n):
        a = rng.uniform(-0.5, 0.5, size=(d, D, D))
        if complex_entries:
            a = a + 1j * rng.uniform(-0.5, 0.5, size=(d, D, D))
        sites.append(DenseTensor(a))
    return MpsState(tuple(sites))


def replace_site(psi: MpsState, i: int, tensor: DenseTensor) -> MpsState:
    idx = _site_index(i, psi.n)
    if tensor.shape != psi.sites[idx].shape:
        raise DimensionError(f"replacement has shape {tensor.shape}, site has {psi.sites[idx].shape}")
    sites = list(psi.sites)
    sites[idx] = tensor
    return MpsState(tuple(sites))


def scale_site(psi: MpsState, i: int, c: complex) -> MpsState:
    return replace_site(psi, i, psi.site(i).scaled(c))


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli(name: str, d: int = 2) -> DenseTensor:
    """Named single-site matrices: x, y, z (d = 2 only), zero, identity."""
    if name == "zero":
        return DenseTensor(np.zeros((d, d)))
    if name == "identity":
        return DenseTensor(np.eye(d))
    if name in PAULI:
        if d != 2:
            raise ArgumentError(f"Pauli {name} needs d = 2, got d = {d}")
        return DenseTensor(PAULI[name])
    raise ArgumentError(f"unknown observable {name!r}")


def observable(name: str, site: int, d: int = 2) -> LocalObservable:
    return LocalObservable(pauli(name, d), site)
