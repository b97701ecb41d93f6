from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from src.errors import ArgumentError, FitError
from src.tensor import DenseTensor


@dataclass(frozen=True)
class DecayFit:
    """ln var = slope * x + intercept."""

    slope: float
    intercept: float
    r_squared: float
    per_step_factor: float
    slope_std_error: float
    points: int

    def to_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "per_step_factor": self.per_step_factor,
            "slope_std_error": self.slope_std_error,
            "points": self.points,
        }


def _line(x, slope, intercept):
    return slope * x + intercept


def fit_exponential(xs: Sequence[float], variances: Sequence[float]) -> DecayFit:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(variances, dtype=np.float64)
    if xs.shape != ys.shape:
        raise FitError(f"{xs.size} x values for {ys.size} variances")
    if xs.size < 3:
        raise FitError(f"an exponential fit needs at least 3 points, got {xs.size}")
    if np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        raise FitError("every variance must be finite and strictly positive")

    logs = np.log(ys)
    if np.ptp(logs) == 0:
        return DecayFit(0.0, float(logs[0]), 0.0, 1.0, 0.0, xs.size)

    (slope, intercept), pcov = curve_fit(_line, xs, logs, p0=(0.0, float(logs.mean())))
    residuals = logs - _line(xs, slope, intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    slope_err = float(np.sqrt(pcov[0, 0])) if np.isfinite(pcov[0, 0]) else float("inf")
    return DecayFit(float(slope), float(intercept), r_squared, float(np.exp(slope)), slope_err, xs.size)


def generator_traces(g: DenseTensor) -> Tuple[float, float]:
    """(Tr G, Tr G^2) of a Hermitian generator."""
    m = g.matrix()
    return float(np.trace(m).real), float(np.trace(m @ m).real)


def theorem1_site_factor(D: int, d: int) -> float:
    """(1 + 1/D)(1 + 1/(Dd)) / (d^2 - 1/D^2), the per-site decay of the global-loss bound."""
    return (1 + 1 / D) * (1 + 1 / (D * d)) / (d**2 - 1 / D**2)


def theorem1_bound(
    n: int,
    D: int,
    d: int,
    trace_g: float,
    trace_g2: float,
    both_designs: bool = False,
) -> float:
    """
    Closed-form upper bound on Var(dL/dtheta) for the global fidelity loss.

    With only one of U-, U+ a 2-design the constant is 2 Tr(G^2) - 2 Tr(G)^2; with
    both, the prefactor is squared and the constant becomes 2 Tr(G^2) Dd - 2 Tr(G)^2.
    """
    if D < 2 or d < 2:
        raise ArgumentError(f"bound needs D, d >= 2, got D={D}, d={d}")
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    N = D * d
    prefactor = (N - 1) / ((N**2 - 1) * N)
    decay = theorem1_site_factor(D, d) ** (n - 1)
    if both_designs:
        return 2 * prefactor**2 * decay * (2 * trace_g2 * N - 2 * trace_g**2)
    return 2 * prefactor * decay * (2 * trace_g2 - 2 * trace_g**2)


def theorem2_bound(delta: int, d: int, C: float) -> float:
    if delta < 0:
        raise ArgumentError(f"distance must be >= 0, got {delta}")
    if not C > 0:
        raise ArgumentError(f"calibration constant must be positive, got {C}")
    return C * float(d) ** (-delta)


def calibrate_theorem2(reports, d: int) -> float:
    """C = Var(delta = 1) * d, so the bound is tight at delta = 1."""
    for report in reports:
        if report.delta == 1:
            if not report.var_grad > 0:
                raise FitError("variance at distance 1 is zero; cannot calibrate")
            return report.var_grad * d
    raise ArgumentError("calibration needs a report at distance 1")


def periodic_distance(i: int, m: int, n: int) -> int:
    gap = abs(i - m)
    return min(gap, n - gap)


def chebyshev_bound(second_moment: float, eps: float) -> float:
    """Pr(|X| > eps) <= E[X^2] / eps^2, which is Var / eps^2 for zero-mean X."""
    return second_moment / eps**2


def chebyshev_consistent(report, eps: float, sigmas: float = 3.0) -> bool:
    if eps not in report.tail_fractions:
        raise ArgumentError(f"report has no tail fraction for eps = {eps}")
    frac = report.tail_fractions[eps]
    binomial_err = np.sqrt(frac * (1 - frac) / report.samples_used)
    bound = chebyshev_bound(report.var_grad + report.mean_grad**2, eps)
    return frac <= bound + sigmas * binomial_err
