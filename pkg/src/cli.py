"""
Command implementations behind barrenbench.py.

Every command returns a process exit code: 0 success, 2 invalid input,
3 unconverged results, 4 numerical failure.
"""

import hashlib
import json
import os
from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np

from src.config import Config
from src.errors import (
    ArgumentError,
    ConfigError,
    DimensionError,
    FitError,
    NumericalError,
    UnsupportedError,
    ValidationError,
)
from src.experiment import (
    ExperimentConfig,
    calibrate_theorem2,
    fit_exponential,
    load_config,
    mc_variance,
    periodic_distance,
    sweep_distance,
    sweep_system_size,
    theorem2_bound,
)
from src.grad import Mode
from src.init import init_barrenbench
from src.logger import Logger, stage_logger
from src.loss import LossKind, TargetState
from src.mps import observable
from src.report import RunManifest, append_csv, csv_row, render_svg, write_json, write_manifest, write_svg
from src.state import RunLedger
from src.weingarten import (
    OracleConfig,
    exact_grad_mean,
    exact_grad_variance,
    partitions_of,
    sampled_moment_check,
    weingarten,
    Perm,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNCONVERGED = 3
EXIT_NUMERICAL = 4

ORACLE_COLUMNS = [
    "run_id", "n", "d", "D", "loss", "delta",
    "exact_mean", "exact_var", "mc_mean", "mc_var", "mc_std_error", "z_score",
]

# unnormalized counterpart averaged by the exact oracle
ORACLE_NUMERATOR = {
    LossKind.FIDELITY: LossKind.FIDELITY,
    LossKind.NORMALIZED: LossKind.FIDELITY,
    LossKind.LOCAL: LossKind.LOCAL_NUMERATOR,
    LossKind.LOCAL_NUMERATOR: LossKind.LOCAL_NUMERATOR,
}

logger = Logger()


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (ConfigError, ArgumentError, DimensionError, ValidationError, UnsupportedError, FitError)):
        return EXIT_INVALID
    if isinstance(error, (NumericalError, np.linalg.LinAlgError)):
        return EXIT_NUMERICAL
    logger.exception(f"unclassified {type(error).__name__}: {error}")
    return EXIT_NUMERICAL


def parse_values(text: str) -> List[int]:
    """Comma list with optional inclusive ranges: "5,7,9" or "5..12"."""
    values = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                values.extend(range(int(lo), int(hi) + 1))
            elif part:
                values.append(int(part))
    except ValueError:
        raise ConfigError("--values", f"cannot parse {text!r}; use e.g. 5,6,7 or 5..12")
    if not values:
        raise ConfigError("--values", "no values given")
    return values


def _experiment(path: str, seed: Optional[int]) -> ExperimentConfig:
    cfg = load_config(path)
    return cfg.with_seed(seed) if seed is not None else cfg


def _identity(payload: dict):
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return digest, digest[:12]


def _output_dir(out: Optional[str], cfg: Optional[ExperimentConfig] = None) -> str:
    return init_barrenbench(out or (cfg.output_dir if cfg else None) or Config().get_output_dir())


class RunSession:
    """Manifest and ledger bookkeeping around one command; the manifest lands before results."""

    def __init__(self, command: str, payload: dict, out_dir: str, outputs: dict):
        config_hash, run_id = _identity(payload)
        self.out_dir = out_dir
        self.ledger = RunLedger()
        self.manifest = RunManifest(
            run_id=run_id,
            command=command,
            config=payload,
            config_hash=config_hash,
            started_at=RunLedger.now(),
            outputs={k: os.path.join(out_dir, v.format(run_id=run_id)) for k, v in outputs.items()},
        )
        write_manifest(out_dir, self.manifest)
        self.record_id = self.ledger.open_run(self.manifest)

    @property
    def run_id(self) -> str:
        return self.manifest.run_id

    def path(self, key: str) -> str:
        return self.manifest.outputs[key]

    def finish(self, status: str, timings: dict):
        self.manifest.finished_at = RunLedger.now()
        self.manifest.timings = timings
        write_manifest(self.out_dir, self.manifest)
        self.ledger.finish_run(self.record_id, status, self.manifest.outputs)


@stage_logger(logger)
def cmd_run(config_path: str, threads: Optional[int] = None, out: Optional[str] = None, seed: Optional[int] = None) -> int:
    cfg = _experiment(config_path, seed)
    session = RunSession(
        "run",
        cfg.to_dict(),
        _output_dir(out, cfg),
        {"report": "{run_id}.report.json", "csv": "results.csv"},
    )
    report = mc_variance(cfg, threads)

    write_json(session.path("report"), {"run_id": session.run_id, "config": cfg.to_dict(), "report": report.to_dict()})
    append_csv(session.path("csv"), [csv_row(session.run_id, report)])
    print(
        f"[{session.run_id}] mean={report.mean_grad:.6e} var={report.var_grad:.6e} "
        f"+- {report.std_error:.2e} samples={report.samples_used} converged={report.converged}"
    )
    session.finish("converged" if report.converged else "unconverged", {"wall_time": report.wall_time})
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


@stage_logger(logger)
def cmd_sweep(
    config_path: str,
    axis: str,
    values: Sequence[int],
    threads: Optional[int] = None,
    out: Optional[str] = None,
    seed: Optional[int] = None,
) -> int:
    cfg = _experiment(config_path, seed)
    if axis not in ("n", "delta"):
        raise ConfigError("--axis", f"must be n or delta, got {axis!r}")
    values = list(values)
    session = RunSession(
        "sweep",
        {"config": cfg.to_dict(), "axis": axis, "values": values},
        _output_dir(out, cfg),
        {
            "report": "{run_id}.sweep.json",
            "fit": "{run_id}.fit.json",
            "plot": "{run_id}.sweep.svg",
            "csv": "results.csv",
        },
    )

    if axis == "n":
        reports = sweep_system_size(cfg, values, threads)
        xs = [r.n for r in reports]
        bound_label = "closed-form bound"
    else:
        reports = sweep_distance(cfg, values, threads=threads)
        xs = [r.delta for r in reports]
        bound_label = "C d^-delta"
        try:
            C = calibrate_theorem2(reports, cfg.d)
            for r in reports:
                r.bound_value = theorem2_bound(r.delta, cfg.d, C)
        except (ArgumentError, FitError) as e:
            logger.warning(f"[{session.run_id}] distance bound omitted: {e}")

    fit = None
    if len(reports) < 3:
        logger.warning(f"[{session.run_id}] {len(reports)} sweep point(s); fit omitted")
        print("warning: fewer than 3 sweep points, fit omitted")
    else:
        try:
            fit = fit_exponential(xs, [r.var_grad for r in reports])
        except FitError as e:
            logger.warning(f"[{session.run_id}] fit omitted: {e}")
            print(f"warning: fit omitted: {e}")

    write_json(
        session.path("report"),
        {"run_id": session.run_id, "axis": axis, "config": cfg.to_dict(), "reports": [r.to_dict() for r in reports]},
    )
    if fit is not None:
        write_json(session.path("fit"), {"run_id": session.run_id, "axis": axis, "fit": fit.to_dict()})
        print(f"[{session.run_id}] per-step factor={fit.per_step_factor:.4f} R^2={fit.r_squared:.4f}")

    bounds = [r.bound_value for r in reports]
    svg = render_svg(
        xs,
        [r.var_grad for r in reports],
        [r.std_error for r in reports],
        x_label=axis,
        title=f"{cfg.loss.value} loss, {cfg.mode.value} mode, d={cfg.d}, D={cfg.D}",
        bound=bounds if all(b is not None for b in bounds) else None,
        bound_label=bound_label,
    )
    write_svg(session.path("plot"), svg)
    append_csv(session.path("csv"), [csv_row(session.run_id, r) for r in reports])

    converged = all(r.converged for r in reports)
    session.finish("converged" if converged else "unconverged", {"wall_time": sum(r.wall_time for r in reports)})
    return EXIT_OK if converged else EXIT_UNCONVERGED


def oracle_config(cfg: ExperimentConfig) -> OracleConfig:
    if cfg.loss not in ORACLE_NUMERATOR:
        raise UnsupportedError(f"the exact oracle does not cover the {cfg.loss.value} loss")
    kind = ORACLE_NUMERATOR[cfg.loss]
    if kind.is_global:
        target = TargetState.uniform(cfg.n, cfg.d, cfg.target.bond, cfg.target.normalize)
        return OracleConfig(cfg.n, cfg.d, cfg.D, kind, site=cfg.grad_site, target=target)
    obs = observable(cfg.observable.name, cfg.observable_site, cfg.d)
    return OracleConfig(cfg.n, cfg.d, cfg.D, kind, site=cfg.grad_site, observable=obs)


@stage_logger(logger)
def cmd_oracle(
    config_path: str,
    compare_mc: bool = False,
    threads: Optional[int] = None,
    out: Optional[str] = None,
    seed: Optional[int] = None,
) -> int:
    cfg = _experiment(config_path, seed)
    try:
        ocfg = oracle_config(cfg)
    except ArgumentError as e:
        logger.warning(f"oracle rejected n={cfg.n}, d={cfg.d}: {e}")
        raise
    session = RunSession(
        "oracle",
        {"config": cfg.to_dict(), "compare_mc": compare_mc},
        _output_dir(out, cfg),
        {"report": "{run_id}.oracle.json", "csv": "oracle.csv"},
    )

    mean = exact_grad_mean(ocfg)
    var = exact_grad_variance(ocfg)
    print(f"[{session.run_id}] exact mean={mean:.6e} exact variance={var:.6e} ({ocfg.loss.value} numerator)")

    payload = {"run_id": session.run_id, "config": cfg.to_dict(), "exact_mean": mean, "exact_var": var}
    mc = None
    status, code = "exact", EXIT_OK
    if compare_mc:
        mc_cfg = replace(cfg, loss=ocfg.loss, mode=Mode.HAAR_SPLIT, grad=replace(cfg.grad, index=1))
        mc = mc_variance(mc_cfg, threads)
        z = (mc.var_grad - var) / mc.std_error if mc.std_error > 0 else 0.0
        payload["monte_carlo"] = mc.to_dict()
        payload["z_score"] = z
        print(f"[{session.run_id}] monte-carlo var={mc.var_grad:.6e} +- {mc.std_error:.2e} z={z:+.2f}")
        if not mc.converged:
            status, code = "unconverged", EXIT_UNCONVERGED

    write_json(session.path("report"), payload)
    delta = None if ocfg.loss.is_global else periodic_distance(ocfg.site, ocfg.observable.site, cfg.n)
    row = [session.run_id, cfg.n, cfg.d, cfg.D, ocfg.loss.value, delta, repr(mean), repr(var)]
    if mc is not None:
        row += [repr(mc.mean_grad), repr(mc.var_grad), repr(mc.std_error), repr(payload["z_score"])]
    else:
        row += ["", "", "", ""]
    append_csv(session.path("csv"), [["" if v is None else str(v) for v in row]], ORACLE_COLUMNS)
    session.finish(status, {"wall_time": mc.wall_time if mc else 0.0})
    return code


@stage_logger(logger)
def cmd_moments(N: int, t: int, samples: Optional[int] = None, seed: Optional[int] = None) -> int:
    if t < 1 or t > 3:
        raise ArgumentError(f"moment tables cover 1 <= t <= 3, got t = {t}")
    print(f"Weingarten values for N = {N}, t = {t}")
    for mu in partitions_of(t):
        value = weingarten(Perm.of_cycle_type(mu), N)
        print(f"  cycle type {mu}: {value}")

    if t > 2:
        return EXIT_OK

    config = Config()
    samples = samples or config.get_moment_samples()
    seed = config.get_seed() if seed is None else seed
    ok = True
    for check in sampled_moment_check(N, t, samples, seed):
        ok &= check.passed
        print(
            f"  {check.label}: exact={check.exact:.6f} sampled={check.estimate:.6f} "
            f"+- {check.std_error:.1e} {'ok' if check.passed else 'FAIL'}"
        )
    return EXIT_OK if ok else EXIT_NUMERICAL


@stage_logger(logger)
def cmd_runs(limit: int = 20) -> int:
    for record in RunLedger().list_runs(limit):
        print(f"{record.run_id}  {record.command:<7} {record.status:<11} {record.started_at}  {record.finished_at or '-'}")
    return EXIT_OK
