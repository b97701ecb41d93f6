from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm
from string import ascii_letters

import numpy as np

from src.errors import ArgumentError, DegenerateRegimeError, UnsupportedError
from src.tensor import DenseTensor
from src.unitary import haar_sample, sample_stream

from .combinatorics import Partition, Perm, character, hook_dimension, partitions_of, permutations_of, schur_dimension


@lru_cache(maxsize=None)
def _weingarten_class(mu: Partition, N: int) -> Fraction:
    t = mu.total
    sigma = Perm.of_cycle_type(mu)
    total = Fraction(0)
    for eta in partitions_of(t):
        dim = hook_dimension(eta)
        total += Fraction(dim * dim * character(eta, sigma)) / schur_dimension(eta, N)
    return total / factorial(t) ** 2


def weingarten(sigma: Perm, N: int, t: int = None) -> Fraction:
    """
    Wg(sigma, N) = (1 / t!^2) sum_eta chi^eta(1)^2 chi^eta(sigma) / s_eta(N).

    Only the N >= t regime is supported, where every eta of t has at most N rows.
    """
    t = sigma.degree if t is None else t
    if t != sigma.degree:
        raise ArgumentError(f"permutation of degree {sigma.degree} passed with t = {t}")
    if N < t:
        raise DegenerateRegimeError(f"Weingarten function needs N >= t, got N = {N}, t = {t}")
    return _weingarten_class(sigma.cycle_type, N)


def gram_identity_holds(t: int, N: int) -> bool:
    """sum_tau N^{cycles(sigma^-1 tau)} Wg(tau^-1 pi, N) == delta(sigma, pi) for all sigma, pi in S_t."""
    group = permutations_of(t)
    for sigma in group:
        for pi in group:
            total = sum(
                Fraction(N) ** sigma.inverse().compose(tau).cycle_count()
                * weingarten(tau.inverse().compose(pi), N)
                for tau in group
            )
            if total != (1 if sigma == pi else 0):
                return False
    return True


@dataclass(frozen=True, eq=False)
class MomentTensor:
    """
    Haar moment int dU prod_lambda U[i_l, j_l] conj(U[i'_l, j'_l]).

    Axes are grouped per replica as (i, j, i', j'), so the tensor has rank 4t.
    """

    order: int
    N: int
    data: DenseTensor

    @property
    def array(self) -> np.ndarray:
        return self.data.data.real


def _delta_pattern(sigma: Perm, tau: Perm, N: int) -> np.ndarray:
    """prod_l delta(i_l, i'_{sigma(l)}) delta(j_l, j'_{tau(l)}) as an integer array."""
    t = sigma.degree
    letters = iter(ascii_letters)
    i, j, ip, jp = ([next(letters) for _ in range(t)] for _ in range(4))
    operands = []
    for l in range(t):
        operands += [i[l] + ip[sigma(l)], j[l] + jp[tau(l)]]
    out = "".join(i[l] + j[l] + ip[l] + jp[l] for l in range(t))
    eye = np.eye(N, dtype=np.int64)
    return np.einsum(",".join(operands) + "->" + out, *[eye] * (2 * t))


@dataclass(frozen=True)
class MomentCheck:
    label: str
    exact: float
    estimate: float
    std_error: float
    passed: bool


# (label, per-replica (i, j, i', j') indices) checked for t = 2
_SECOND_MOMENT_ENTRIES = (
    ("E|U00|^4", ((0, 0, 0, 0), (0, 0, 0, 0))),
    ("E|U00|^2|U01|^2", ((0, 0, 0, 0), (0, 1, 0, 1))),
    ("E|U00|^2|U11|^2", ((0, 0, 0, 0), (1, 1, 1, 1))),
    ("E U00 U11 conj(U01 U10)", ((0, 0, 0, 1), (1, 1, 1, 0))),
)


def sampled_moment_check(N: int, t: int, samples: int, seed: int, sigmas: float = 5.0):
    """
    Compare moment_tensor(N, t) with a Haar sample average.

    t = 1 checks every entry; t = 2 checks a fixed set of entries that covers the
    symmetric and antisymmetric connections (at N = 1 every entry collapses to U00).
    """
    exact = moment_tensor(N, t).array
    if t == 1:
        acc = np.zeros((N,) * 4)
        acc_sq = np.zeros((N,) * 4)
        for s in range(samples):
            u = haar_sample(N, sample_stream(seed, s)).data
            outer = np.einsum("ij,kl->ijkl", u, u.conj()).real
            acc += outer
            acc_sq += outer**2
        mean = acc / samples
        err = np.sqrt(np.maximum(acc_sq / samples - mean**2, 0.0) / samples)
        worst = np.unravel_index(np.argmax(np.abs(mean - exact) - sigmas * err), exact.shape)
        passed = bool(np.all(np.abs(mean - exact) <= sigmas * err + 1e-12))
        return [MomentCheck(f"E U{worst[0]}{worst[1]} conj(U{worst[2]}{worst[3]}) (worst entry)",
                            float(exact[worst]), float(mean[worst]), float(err[worst]), passed)]

    checks = []
    entries = [(label, tuple(min(x, N - 1) for idx in replicas for x in idx)) for label, replicas in _SECOND_MOMENT_ENTRIES]
    values = np.zeros((len(entries), samples))
    for s in range(samples):
        u = haar_sample(N, sample_stream(seed, s)).data
        for p, (_, (i1, j1, k1, l1, i2, j2, k2, l2)) in enumerate(entries):
            values[p, s] = (u[i1, j1] * u[i2, j2] * np.conj(u[k1, l1] * u[k2, l2])).real
    for p, (label, index) in enumerate(entries):
        mean = float(values[p].mean())
        err = float(values[p].std() / np.sqrt(samples))
        target = float(exact[index])
        checks.append(MomentCheck(label, target, mean, err, abs(mean - target) <= sigmas * err + 1e-12))
    return checks


@lru_cache(maxsize=None)
def moment_tensor(N: int, t: int) -> MomentTensor:
    if t < 1:
        raise ArgumentError(f"moment order must be >= 1, got {t}")
    if t > 2:
        raise UnsupportedError(f"moment tensors are built for t <= 2, got t = {t}")
    if N < t:
        raise DegenerateRegimeError(f"Weingarten function needs N >= t, got N = {N}, t = {t}")

    group = permutations_of(t)
    weights = {(s, u): weingarten(u.compose(s.inverse()), N) for s in group for u in group}
    # integer accumulation keeps every entry exact and independent of summation order
    scale = lcm(*(w.denominator for w in weights.values()))
    acc = np.zeros((N,) * (4 * t), dtype=np.int64)
    for (s, u), w in weights.items():
        acc += int(w * scale) * _delta_pattern(s, u, N)
    return MomentTensor(t, N, DenseTensor(acc / scale))
