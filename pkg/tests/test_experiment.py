import json
import math
import pickle
from types import SimpleNamespace

import numpy as np
import pytest

from src.errors import ArgumentError, ConfigError, FitError
from src.experiment import (
    calibrate_theorem2,
    chebyshev_bound,
    chebyshev_consistent,
    config_from_dict,
    fit_exponential,
    load_config,
    mc_variance,
    periodic_distance,
    site_at_distance,
    sweep_distance,
    sweep_system_size,
    theorem1_bound,
    theorem1_site_factor,
    theorem2_bound,
)
from src.experiment.montecarlo import report_bound
from src.loss import LossKind
from src.mps import observable
from src.weingarten import OracleConfig, exact_grad_variance


def _config(**overrides):
    data = {
        "n": 4,
        "d": 2,
        "D": 2,
        "loss": "local",
        "mode": "haar_split",
        "seed": 5,
        "samples": {"budget": 200, "block": 100, "rel_tol": 0.5},
    }
    data.update(overrides)
    return config_from_dict(data)


def test_defaults_are_resolved():
    cfg = _config()
    assert cfg.observable_site == 2
    assert cfg.grad_site == 2
    assert _config(loss="fidelity").grad_site == 1
    echo = cfg.to_dict()
    assert echo["observable"] == {"name": "x", "site": 2}
    assert echo["grad"] == {"site": 2, "index": 1}


def test_sampling_defaults_come_from_tool_config():
    cfg = config_from_dict({"n": 3, "d": 2, "D": 2, "loss": "kl", "mode": "theta"})
    assert cfg.samples.block == 10000
    assert cfg.samples.budget == 500000


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"observable": {"site": 9}}, "observable.site"),
        ({"grad": {"site": 0}}, "grad.site"),
        ({"loss": "cross_entropy"}, "loss"),
        ({"mode": "dense"}, "mode"),
        ({"d": 1}, "d"),
        ({"observable": {"name": "w"}}, "observable.name"),
        ({"grad": {"index": 2}}, "grad.index"),
        ({"mode": "theta", "grad": {"index": 17}}, "grad.index"),
        ({"samples": {"budget": 10, "block": 100}}, "samples.budget"),
        ({"samples": {"block": 1}}, "samples.block"),
        ({"n": 2.5}, "n"),
        ({"target": {"normalize": "false"}}, "target.normalize"),
        ({"raw": {"complex": 0}}, "raw.complex"),
    ],
)
def test_invalid_configs_name_the_field(overrides, field):
    with pytest.raises(ConfigError) as info:
        _config(**overrides)
    assert info.value.field == field


def test_config_error_survives_pickling():
    error = pickle.loads(pickle.dumps(ConfigError("samples.block", "must be >= 2")))
    assert error.field == "samples.block"
    assert str(error) == "samples.block: must be >= 2"


def test_missing_key():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"d": 2, "D": 2, "loss": "local", "mode": "theta"})
    assert info.value.field == "n"


def test_load_config_reports_json_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "n": 4,\n  "d": 2\n  "D": 2\n}\n')
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.field == "line 4"


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 5, "d": 2, "D": 2, "loss": "normalized", "mode": "theta", "grad": {"index": "all"}}))
    cfg = load_config(str(path))
    assert cfg.all_directions
    assert cfg.direction_total() == 16


def test_run_id_tracks_config():
    a, b = _config(), _config()
    assert a.run_id == b.run_id
    assert len(a.run_id) == 12
    assert a.with_seed(6).run_id != a.run_id
    assert a.config_hash().startswith(a.run_id)


def test_fit_geometric_decay():
    xs = [5, 6, 7, 8]
    fit = fit_exponential(xs, [0.5**x for x in xs])
    assert fit.per_step_factor == pytest.approx(0.5)
    assert fit.slope == pytest.approx(math.log(0.5))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points == 4


def test_fit_constant_sequence():
    fit = fit_exponential([1, 2, 3], [0.2, 0.2, 0.2])
    assert fit.slope == 0.0
    assert fit.per_step_factor == 1.0
    assert fit.r_squared == 0.0


def test_fit_rejections():
    with pytest.raises(FitError):
        fit_exponential([1, 2], [0.1, 0.05])
    with pytest.raises(FitError):
        fit_exponential([1, 2, 3], [0.1, 0.0, 0.01])
    with pytest.raises(FitError):
        fit_exponential([1, 2, 3], [0.1, float("nan"), 0.01])


def test_theorem1_bound_values():
    assert theorem1_site_factor(2, 2) == pytest.approx(0.5)
    # Tr G = 0, Tr G^2 = 2 for the first generator of U(4)
    assert theorem1_bound(5, 2, 2, 0.0, 2.0) == pytest.approx(0.025)
    assert theorem1_bound(1, 2, 2, 0.0, 2.0, both_designs=True) == pytest.approx(0.08)
    with pytest.raises(ArgumentError):
        theorem1_bound(5, 1, 2, 0.0, 2.0)


def test_theorem2_bound_and_calibration():
    assert theorem2_bound(2, 2, 1.0) == pytest.approx(0.25)
    reports = [SimpleNamespace(delta=0, var_grad=0.3), SimpleNamespace(delta=1, var_grad=0.1)]
    C = calibrate_theorem2(reports, 2)
    assert C == pytest.approx(0.2)
    assert theorem2_bound(1, 2, C) == pytest.approx(0.1)
    with pytest.raises(ArgumentError):
        calibrate_theorem2(reports[:1], 2)


def test_distances():
    assert periodic_distance(1, 6, 11) == 5
    assert periodic_distance(2, 10, 11) == 3
    assert site_at_distance(6, 0, 11) == 6
    assert site_at_distance(6, 5, 11) == 1
    assert site_at_distance(11, 1, 11) == 10
    assert site_at_distance(1, 1, 6) == 6
    assert site_at_distance(1, 2, 6) == 5
    for delta in range(6):
        assert periodic_distance(site_at_distance(6, delta, 11), 6, 11) == delta


def test_chebyshev():
    assert chebyshev_bound(0.01, 0.1) == pytest.approx(1.0)
    report = SimpleNamespace(tail_fractions={0.05: 0.2}, var_grad=0.0001, mean_grad=0.0, samples_used=1000)
    assert not chebyshev_consistent(report, 0.05)
    report.var_grad = 0.01
    assert chebyshev_consistent(report, 0.05)
    with pytest.raises(ArgumentError):
        chebyshev_consistent(report, 0.01)


def test_report_bound_only_for_fidelity_haar_split():
    assert report_bound(_config(n=5, loss="fidelity")) == pytest.approx(0.025)
    assert report_bound(_config(loss="normalized")) is None
    assert report_bound(_config(loss="fidelity", mode="theta")) is None


def test_mc_variance_report():
    report = mc_variance(_config(), threads=2)
    assert report.samples_used in (100, 200)
    assert report.directions == 1
    assert report.delta == 0
    assert report.var_grad > 0
    assert set(report.tail_fractions) == {0.01, 0.05}
    assert np.isfinite(report.std_error)


def test_mc_variance_ignores_thread_count():
    cfg = _config(mode="theta", grad={"index": "all"}, samples={"budget": 60, "block": 30, "rel_tol": 1e-9})
    one = mc_variance(cfg, threads=1)
    four = mc_variance(cfg, threads=4)
    assert one.to_dict() == four.to_dict()
    assert one.directions == 16
    assert not one.converged


def test_mc_variance_zero_observable_converges_at_once():
    report = mc_variance(_config(loss="local_numerator", observable={"name": "zero"}), threads=2)
    assert report.converged
    assert report.var_grad == 0.0
    assert report.samples_used == 100


def test_raw_mode_uses_finite_differences():
    report = mc_variance(_config(mode="raw_tensor", grad={"index": 3}, samples={"budget": 40, "block": 20, "rel_tol": 10.0}))
    assert report.mode == "raw_tensor"
    assert report.var_grad > 0


def test_sweeps():
    base = _config(samples={"budget": 40, "block": 20, "rel_tol": 10.0})
    reports = sweep_system_size(base, [3, 4], threads=2)
    assert [r.n for r in reports] == [3, 4]
    with pytest.raises(ArgumentError):
        sweep_system_size(base, [4, 3])

    by_distance = sweep_distance(base, [0, 1, 2], n=5, threads=2)
    assert [r.delta for r in by_distance] == [0, 1, 2]
    with pytest.raises(ArgumentError):
        sweep_distance(base, [3], n=5)
    with pytest.raises(ConfigError) as info:
        sweep_distance(_config(loss="fidelity"), [0, 1])
    assert info.value.field == "loss"


@pytest.mark.slow
def test_fidelity_variance_stays_under_closed_form_bound():
    base = _config(loss="fidelity", seed=41, samples={"budget": 20000, "block": 10000, "rel_tol": 0.05})
    for report in sweep_system_size(base, [3, 4, 5, 6]):
        assert report.var_grad <= report.bound_value + 3 * report.std_error
        assert abs(report.mean_grad) <= 4 * report.mean_std_error


def _local_numerator_exact(n, site):
    return exact_grad_variance(
        OracleConfig(n, 2, 2, LossKind.LOCAL_NUMERATOR, site=site, observable=observable("x", 1))
    )


@pytest.mark.slow
def test_distance_sweep_decays_upstream():
    base = _config(
        n=6,
        loss="local_numerator",
        observable={"name": "x", "site": 1},
        seed=23,
        samples={"budget": 4000, "block": 2000, "rel_tol": 10.0},
    )
    reports = sweep_distance(base, [0, 1, 2, 3], threads=2)
    variances = [r.var_grad for r in reports]
    assert all(b < a for a, b in zip(variances, variances[1:]))
    for delta, report in zip(range(4), reports):
        exact = _local_numerator_exact(6, site_at_distance(1, delta, 6))
        assert abs(report.var_grad - exact) < 4 * report.std_error


@pytest.mark.slow
@pytest.mark.parametrize("loss", ["normalized", "kl"])
def test_global_losses_decay_with_size(loss):
    base = _config(loss=loss, seed=53, samples={"budget": 10000, "block": 5000, "rel_tol": 0.1})
    reports = sweep_system_size(base, range(5, 13))
    fit = fit_exponential([r.n for r in reports], [r.var_grad for r in reports])
    assert fit.per_step_factor < 0.8
    assert fit.r_squared > 0.9
    for report in reports:
        assert abs(report.mean_grad) <= 4 * report.mean_std_error
        for eps in report.tail_fractions:
            assert chebyshev_consistent(report, eps)


@pytest.mark.slow
def test_on_site_local_variance_is_flat_in_size():
    base = _config(loss="local", observable={"name": "x", "site": 1}, seed=61, samples={"budget": 10000, "block": 5000, "rel_tol": 0.1})
    reports = sweep_system_size(base, [5, 7, 9, 11, 13, 15])
    assert all(r.delta == 0 for r in reports)
    variances = [r.var_grad for r in reports]
    assert max(variances) / min(variances) <= 1.5


@pytest.mark.slow
def test_local_variance_decays_with_distance_at_eleven_sites():
    base = _config(n=11, loss="local", observable={"name": "x", "site": 1}, seed=67, samples={"budget": 10000, "block": 5000, "rel_tol": 0.1})
    reports = sweep_distance(base, range(6))
    fit = fit_exponential([r.delta for r in reports], [r.var_grad for r in reports])
    assert fit.per_step_factor < 1.0
    assert fit.r_squared > 0.9
    C = calibrate_theorem2(reports, 2)
    for report in reports[1:]:
        assert report.var_grad <= theorem2_bound(report.delta, 2, C) + 3 * report.std_error
