import numpy as np
import pytest

from src.errors import ArgumentError, UnsupportedError
from src.grad import (
    GradTarget,
    HaarSplitParameterization,
    Mode,
    RawParameterization,
    ThetaParameterization,
    analytic_grad,
    central_difference,
    direction_count,
    finite_diff_grad,
)
from src.loss import LossKind, LossProblem, TargetState, accept_probability
from src.mps import observable
from src.tensor import identity

ALL_KINDS = [k for k in LossKind]


def _problem(kind: LossKind, n: int) -> LossProblem:
    if kind.is_global:
        return LossProblem(kind, target=TargetState.uniform(n, 2))
    return LossProblem(kind, observable=observable("z", 2))


def test_central_difference():
    assert central_difference(lambda x: x**3, 2.0, 1e-3) == pytest.approx(12.0, abs=1e-5)
    with pytest.raises(ArgumentError):
        central_difference(lambda x: x, 0.0, 0.0)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_theta_gradient_matches_finite_difference(rng, kind):
    problem = _problem(kind, 3)
    checked = 0
    while checked < 50:
        params = ThetaParameterization.random(3, 2, 2, rng)
        # log-loss derivatives grow with inverse powers of the accept probability
        if kind == LossKind.KL and accept_probability(params.state(), problem.target) < 0.2:
            continue
        target = GradTarget(int(rng.integers(1, 4)), int(rng.integers(1, 17)), Mode.THETA)
        exact = analytic_grad(problem, params, target)
        fd = finite_diff_grad(problem, params, target, h=1e-4)
        assert exact == pytest.approx(fd, abs=1e-6)
        checked += 1


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_haar_split_gradient_matches_finite_difference(rng, kind):
    problem = _problem(kind, 4)
    for site in (1, 2, 4):
        params = HaarSplitParameterization.random(4, 2, 2, site, rng)
        target = GradTarget(site, None, Mode.HAAR_SPLIT)
        assert analytic_grad(problem, params, target) == pytest.approx(
            finite_diff_grad(problem, params, target, h=1e-5), abs=1e-6
        )


def test_raw_mode_has_no_analytic_gradient(rng):
    params = RawParameterization.random(3, 2, 2, rng)
    problem = _problem(LossKind.LOCAL, 3)
    target = GradTarget(1, 3, Mode.RAW_TENSOR)
    with pytest.raises(UnsupportedError):
        analytic_grad(problem, params, target)
    assert np.isfinite(finite_diff_grad(problem, params, target))


def test_raw_directions_cover_real_then_imaginary(rng):
    params = RawParameterization.random(2, 2, 2, rng)
    assert direction_count(params, 1) == 16
    before = params.state().site(2).data
    real = params.perturbed(GradTarget(2, 3, Mode.RAW_TENSOR), 0.5).state().site(2).data
    imag = params.perturbed(GradTarget(2, 11, Mode.RAW_TENSOR), 0.5).state().site(2).data
    assert (real - before).ravel()[2] == pytest.approx(0.5)
    assert (imag - before).ravel()[2] == pytest.approx(0.5j)

    real_only = RawParameterization.random(2, 2, 2, rng, complex_entries=False)
    assert direction_count(real_only, 1) == 8
    assert np.all(real_only.state().site(1).data.imag == 0)


def test_direction_counts(rng):
    assert direction_count(ThetaParameterization.random(2, 2, 2, rng), 1) == 16
    assert direction_count(HaarSplitParameterization.random(2, 2, 2, 1, rng), 1) == 1


def test_target_validation(rng):
    with pytest.raises(ArgumentError):
        GradTarget(1, None, Mode.THETA)
    with pytest.raises(ArgumentError):
        GradTarget(0, 1, Mode.THETA)

    theta = ThetaParameterization.random(3, 2, 2, rng)
    with pytest.raises(ArgumentError):
        theta.site_derivative(GradTarget(4, 1, Mode.THETA))
    with pytest.raises(ArgumentError):
        theta.site_derivative(GradTarget(1, 17, Mode.THETA))
    with pytest.raises(ArgumentError):
        theta.site_derivative(GradTarget(1, None, Mode.HAAR_SPLIT))

    split = HaarSplitParameterization.random(3, 2, 2, 2, rng)
    with pytest.raises(ArgumentError):
        split.site_derivative(GradTarget(1, None, Mode.HAAR_SPLIT))


def test_haar_split_state_is_embedded(rng):
    params = HaarSplitParameterization.random(3, 2, 2, 2, rng)
    psi = params.state()
    assert psi.origin == "embedded"
    assert psi.n == 3


def test_phase_direction_leaves_normalized_loss_flat(rng):
    problem = _problem(LossKind.NORMALIZED, 4)
    # the identity is the last generator of the theta basis
    theta = ThetaParameterization.random(4, 2, 2, rng)
    assert analytic_grad(problem, theta, GradTarget(2, 16, Mode.THETA)) == pytest.approx(0.0, abs=1e-10)

    split = HaarSplitParameterization.random(4, 2, 2, 3, rng, generator=identity(4))
    assert analytic_grad(problem, split, GradTarget(3, None, Mode.HAAR_SPLIT)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_finite_difference_error_shrinks_quadratically(rng, kind):
    problem = _problem(kind, 4)
    for _ in range(10):
        params = ThetaParameterization.random(4, 2, 2, rng)
        if kind == LossKind.KL and accept_probability(params.state(), problem.target) < 0.2:
            continue
        target = GradTarget(int(rng.integers(1, 5)), int(rng.integers(1, 16)), Mode.THETA)
        exact = analytic_grad(problem, params, target)
        coarse = abs(exact - finite_diff_grad(problem, params, target, h=1e-3)) / 1e-6
        fine = abs(exact - finite_diff_grad(problem, params, target, h=1e-4))
        # the constant fitted at h = 1e-3 predicts the error at h = 1e-4, up to rounding
        assert fine <= 2.0 * coarse * 1e-8 + 5e-11


@pytest.mark.parametrize("kind", [LossKind.FIDELITY, LossKind.LOCAL_NUMERATOR, LossKind.LOCAL])
def test_haar_split_gradient_has_zero_mean(rng, kind):
    problem = _problem(kind, 4)
    grads = np.array(
        [
            analytic_grad(problem, HaarSplitParameterization.random(4, 2, 2, 1, rng), GradTarget(1, None, Mode.HAAR_SPLIT))
            for _ in range(2000)
        ]
    )
    assert abs(grads.mean()) < 4 * grads.std() / np.sqrt(grads.size)
