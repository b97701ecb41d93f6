"""
Partitions, permutations and irreducible characters of the symmetric group S_t.

All values are exact integers or Fractions.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial, prod
from typing import List, Sequence, Tuple

from src.errors import ArgumentError, RepresentationVanishesError


@dataclass(frozen=True, order=True)
class Partition:
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ArgumentError(f"partition parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ArgumentError(f"partition parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > c) for c in range(self.parts[0])))

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Perm:
    """A permutation of {0..t-1}; images[x] is the image of x."""

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(len(images))):
            raise ArgumentError(f"{images} is not a permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, t: int) -> "Perm":
        return cls(tuple(range(t)))

    @classmethod
    def from_one_line(cls, one_line: Sequence[int]) -> "Perm":
        """One-line notation with 1-based images, e.g. (2, 1) is the transposition of S_2."""
        return cls(tuple(int(x) - 1 for x in one_line))

    @classmethod
    def of_cycle_type(cls, mu: Partition) -> "Perm":
        images, start = [], 0
        for length in mu.parts:
            images.extend(start + (k + 1) % length for k in range(length))
            start += length
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Perm") -> "Perm":
        """(self o other)(x) = self(other(x))."""
        if other.degree != self.degree:
            raise ArgumentError(f"cannot compose permutations of degree {self.degree} and {other.degree}")
        return Perm(tuple(self.images[x] for x in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for x, y in enumerate(self.images):
            inv[y] = x
        return Perm(tuple(inv))

    def cycles(self) -> List[Tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen:
                continue
            cycle, x = [], start
            while x not in seen:
                seen.add(x)
                cycle.append(x)
                x = self.images[x]
            out.append(tuple(cycle))
        return out

    def cycle_count(self) -> int:
        return len(self.cycles())

    @property
    def cycle_type(self) -> Partition:
        return Partition(tuple(sorted((len(c) for c in self.cycles()), reverse=True)))


@lru_cache(maxsize=None)
def partitions_of(t: int) -> Tuple[Partition, ...]:
    """All partitions of t, largest first part first: t=2 gives (2), (1,1)."""
    if t < 1:
        raise ArgumentError(f"t must be >= 1, got {t}")

    def gen(remaining: int, cap: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(Partition(p) for p in gen(t, t))


@lru_cache(maxsize=None)
def permutations_of(t: int) -> Tuple[Perm, ...]:
    if t < 1:
        raise ArgumentError(f"t must be >= 1, got {t}")
    return tuple(Perm(p) for p in permutations(range(t)))


def hook_dimension(eta: Partition) -> int:
    """chi^eta(1) = t! / prod of hook lengths."""
    conj = eta.conjugate().parts
    hooks = prod(
        (row - j - 1) + (conj[j] - i - 1) + 1
        for i, row in enumerate(eta.parts)
        for j in range(row)
    )
    return factorial(eta.total) // hooks


def schur_dimension(eta: Partition, N: int) -> Fraction:
    """Dimension of the U(N) irrep labelled by eta: prod_{i<j<=N} (l_i - l_j + j - i) / (j - i)."""
    if eta.length > N:
        raise RepresentationVanishesError(f"partition {eta} has more than N = {N} rows")
    lam = list(eta.parts) + [0] * (N - eta.length)
    value = Fraction(1)
    for i in range(N):
        for j in range(i + 1, N):
            value *= Fraction(lam[i] - lam[j] + j - i, j - i)
    return value


@lru_cache(maxsize=None)
def _murnaghan_nakayama(shape: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not shape else 0
    r, rest = cycles[0], cycles[1:]
    L = len(shape)
    # beta-set: removing an r-rim hook moves one bead from b to b - r
    beta = [shape[i] + (L - 1 - i) for i in range(L)]
    beads = set(beta)
    total = 0
    for b in beta:
        nb = b - r
        if nb < 0 or nb in beads:
            continue
        height = sum(1 for c in beta if nb < c < b)
        moved = sorted((beads - {b}) | {nb}, reverse=True)
        new_shape = tuple(p for p in (x - (L - 1 - i) for i, x in enumerate(moved)) if p > 0)
        total += (-1) ** height * _murnaghan_nakayama(new_shape, rest)
    return total


def character(eta: Partition, sigma: Perm) -> int:
    if eta.total != sigma.degree:
        raise ArgumentError(f"partition of {eta.total} against a permutation of degree {sigma.degree}")
    return _murnaghan_nakayama(eta.parts, sigma.cycle_type.parts)


def character_table(t: int) -> List[List[int]]:
    """rows[a][b] = chi^{eta_a}(class mu_b), both indexed in partitions_of(t) order."""
    classes = [Perm.of_cycle_type(mu) for mu in partitions_of(t)]
    return [[character(eta, sigma) for sigma in classes] for eta in partitions_of(t)]
