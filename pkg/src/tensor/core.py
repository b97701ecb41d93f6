"""
Dense complex tensors and the pairwise contraction engine.

Contraction is positional: labels travel with their axes but are never used to
decide which axes meet.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import ArgumentError, DimensionError


@dataclass(frozen=True, eq=False)
class DenseTensor:
    data: np.ndarray
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128, order="C")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.labels is not None:
            if len(self.labels) != data.ndim:
                raise DimensionError(f"{len(self.labels)} labels for a rank-{data.ndim} tensor")
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_flat(cls, shape: Sequence[int], flat: Sequence[complex], labels=None) -> "DenseTensor":
        shape = tuple(int(s) for s in shape)
        if any(s <= 0 for s in shape):
            raise DimensionError(f"axis lengths must be positive, got {shape}")
        flat = np.asarray(flat, dtype=np.complex128).ravel()
        if int(np.prod(shape, dtype=np.int64)) != flat.size:
            raise DimensionError(f"shape {shape} does not hold {flat.size} values")
        return cls(flat.reshape(shape), labels)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.data.ravel()

    def conj(self) -> "DenseTensor":
        return DenseTensor(self.data.conj(), self.labels)

    def scaled(self, c: complex) -> "DenseTensor":
        return DenseTensor(c * self.data, self.labels)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return DenseTensor(self.data + other.data, self.labels)

    def matrix(self) -> np.ndarray:
        if self.rank != 2:
            raise DimensionError(f"rank-{self.rank} tensor is not a matrix")
        return self.data


def identity(n: int) -> DenseTensor:
    return DenseTensor(np.eye(n))


def _check_axis(axis: int, rank: int, name: str) -> int:
    if not -rank <= axis < rank:
        raise ArgumentError(f"axis {axis} out of range for rank-{rank} tensor {name}")
    return axis % rank


def contract(a: DenseTensor, b: DenseTensor, pairs: Sequence[Tuple[int, int]]) -> DenseTensor:
    """
    Sum over the paired axes of a and b.

    The result carries the unpaired axes of a (in order) followed by the unpaired
    axes of b. Internally this is tensordot, i.e. transpose + reshape + matmul.
    """
    axes_a = [_check_axis(p[0], a.rank, "a") for p in pairs]
    axes_b = [_check_axis(p[1], b.rank, "b") for p in pairs]
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise ArgumentError(f"axis repeated in contraction pairs {list(pairs)}")
    for ia, ib in zip(axes_a, axes_b):
        if a.shape[ia] != b.shape[ib]:
            raise DimensionError(
                f"axis {ia} of a has length {a.shape[ia]}, axis {ib} of b has length {b.shape[ib]}"
            )

    data = np.tensordot(a.data, b.data, axes=(axes_a, axes_b))

    labels = None
    if a.labels is not None and b.labels is not None:
        labels = tuple(l for i, l in enumerate(a.labels) if i not in axes_a) + tuple(
            l for i, l in enumerate(b.labels) if i not in axes_b
        )
    return DenseTensor(data, labels)


def transpose(a: DenseTensor, perm: Sequence[int]) -> DenseTensor:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(a.rank)):
        raise ArgumentError(f"{perm} is not a permutation of {a.rank} axes")
    labels = tuple(a.labels[p] for p in perm) if a.labels is not None else None
    return DenseTensor(np.transpose(a.data, perm), labels)


def reshape(a: DenseTensor, new_shape: Sequence[int]) -> DenseTensor:
    new_shape = tuple(int(s) for s in new_shape)
    if any(s <= 0 for s in new_shape):
        raise DimensionError(f"axis lengths must be positive, got {new_shape}")
    if int(np.prod(new_shape, dtype=np.int64)) != a.data.size:
        raise DimensionError(f"cannot reshape {a.shape} into {new_shape}")
    return DenseTensor(a.data.reshape(new_shape))
