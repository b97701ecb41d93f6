from typing import Callable, Optional

import numpy as np

from src.config import Config
from src.errors import ArgumentError, DegenerateStateError
from src.loss import LossKind, LossProblem, kl_loss
from src.mps import DEGENERATE_NORM, norm_sq, replace_site, sandwich

from .params import GradTarget, Parameterization


def central_difference(fn: Callable[[float], float], x: float, h: float) -> float:
    if h <= 0:
        raise ArgumentError(f"finite-difference step must be positive, got {h}")
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def finite_diff_grad(
    problem: LossProblem,
    params: Parameterization,
    target: GradTarget,
    h: Optional[float] = None,
) -> float:
    if h is None:
        h = Config().get_fd_step()
    return central_difference(lambda s: problem.evaluate(params.perturbed(target, s).state()), 0.0, h)


def analytic_grad(problem: LossProblem, params: Parameterization, target: GradTarget) -> float:
    """
    Exact dL/dtheta from one derivative insertion.

    psi is linear in every site tensor, so d|psi> is |psi> with the target site
    replaced by dA; bra-side insertions are the complex conjugates of ket-side
    ones and enter through 2 Re(...).
    """
    psi = params.state()
    dpsi = replace_site(psi, target.site, params.site_derivative(target))
    kind = problem.kind

    if kind == LossKind.LOCAL_NUMERATOR:
        return 2.0 * sandwich(psi, dpsi, {problem.observable.site: problem.observable.matrix}).real

    if kind == LossKind.FIDELITY:
        o = problem.target.overlap(psi)
        do = problem.target.overlap(dpsi)
        return -2.0 * (np.conj(o) * do).real

    z = norm_sq(psi)
    if z < DEGENERATE_NORM:
        raise DegenerateStateError(f"norm {z:.3e} below {DEGENERATE_NORM:.0e}")
    dz = 2.0 * sandwich(psi, dpsi).real

    if kind == LossKind.LOCAL:
        ops = {problem.observable.site: problem.observable.matrix}
        num = sandwich(psi, psi, ops).real
        dnum = 2.0 * sandwich(psi, dpsi, ops).real
        return (dnum * z - num * dz) / z**2

    o = problem.target.overlap(psi)
    do = problem.target.overlap(dpsi)
    cross = (np.conj(o) * do).real

    if kind == LossKind.NORMALIZED:
        return -(2.0 * cross * z - abs(o) ** 2 * dz) / z**2

    # KL: L = -ln|o| + ln Z / 2 + ln ||phi||
    kl_loss(psi, problem.target)
    return -cross / abs(o) ** 2 + dz / (2.0 * z)
