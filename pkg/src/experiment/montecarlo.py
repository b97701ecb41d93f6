import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.config import Config
from src.errors import ArgumentError, ConfigError
from src.grad import (
    GradTarget,
    HaarSplitParameterization,
    Mode,
    RawParameterization,
    ThetaParameterization,
    analytic_grad,
    finite_diff_grad,
)
from src.logger import Logger
from src.loss import LossKind, LossProblem, TargetState
from src.mps import observable
from src.unitary import hermitian_basis, sample_stream

from .analysis import generator_traces, periodic_distance, theorem1_bound
from .config import ExperimentConfig


@lru_cache(maxsize=1)
def sample_logger() -> Logger:
    return Logger(filename="barrenbench_samples.log")


@dataclass
class VarianceReport:
    n: int
    d: int
    D: int
    loss: str
    mode: str
    delta: Optional[int]
    mean_grad: float
    var_grad: float
    std_error: float
    mean_std_error: float
    samples_used: int
    converged: bool
    directions: int
    tail_fractions: Dict[float, float] = field(default_factory=dict)
    bound_value: Optional[float] = None
    wall_time: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "D": self.D,
            "loss": self.loss,
            "mode": self.mode,
            "delta": self.delta,
            "mean_grad": self.mean_grad,
            "var_grad": self.var_grad,
            "std_error": self.std_error,
            "mean_std_error": self.mean_std_error,
            "samples_used": self.samples_used,
            "converged": self.converged,
            "directions": self.directions,
            "tail_fractions": {repr(eps): frac for eps, frac in sorted(self.tail_fractions.items())},
            "bound_value": self.bound_value,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


def build_problem(cfg: ExperimentConfig) -> LossProblem:
    if cfg.loss.is_global:
        target = TargetState.uniform(cfg.n, cfg.d, cfg.target.bond, cfg.target.normalize)
        return LossProblem(cfg.loss, target=target)
    return LossProblem(cfg.loss, observable=observable(cfg.observable.name, cfg.observable_site, cfg.d))


def _parameterization(cfg: ExperimentConfig, rng: np.random.Generator):
    if cfg.mode == Mode.THETA:
        return ThetaParameterization.random(cfg.n, cfg.d, cfg.D, rng, cfg.split)
    if cfg.mode == Mode.HAAR_SPLIT:
        return HaarSplitParameterization.random(cfg.n, cfg.d, cfg.D, cfg.grad_site, rng)
    return RawParameterization.random(cfg.n, cfg.d, cfg.D, rng, cfg.raw_complex)


def _targets(cfg: ExperimentConfig) -> List[GradTarget]:
    if cfg.mode == Mode.HAAR_SPLIT:
        return [GradTarget(cfg.grad_site, None, cfg.mode)]
    indices = range(1, cfg.direction_total() + 1) if cfg.all_directions else [cfg.grad.index]
    return [GradTarget(cfg.grad_site, k, cfg.mode) for k in indices]


def sample_gradients(cfg: ExperimentConfig, problem: LossProblem, index: int) -> np.ndarray:
    """Gradients along every requested direction for one random initialization."""
    params = _parameterization(cfg, sample_stream(cfg.seed, index))
    if cfg.mode == Mode.RAW_TENSOR:
        step = Config().get_fd_step()
        return np.array([finite_diff_grad(problem, params, t, step) for t in _targets(cfg)])
    return np.array([analytic_grad(problem, params, t) for t in _targets(cfg)])


# per-process state of the sampling pool, set once by _init_worker
_worker_cfg: Optional[ExperimentConfig] = None
_worker_problem: Optional[LossProblem] = None


def _init_worker(cfg: ExperimentConfig):
    global _worker_cfg, _worker_problem
    _worker_cfg = cfg
    _worker_problem = build_problem(cfg)


def _worker_sample(index: int) -> np.ndarray:
    return sample_gradients(_worker_cfg, _worker_problem, index)


def _draw_block(pool: Optional[ProcessPoolExecutor], cfg, problem, indices: range, workers: int) -> np.ndarray:
    if pool is None:
        return np.stack([sample_gradients(cfg, problem, s) for s in indices])
    chunksize = max(1, len(indices) // (4 * workers))
    return np.stack(list(pool.map(_worker_sample, indices, chunksize=chunksize)))


def report_bound(cfg: ExperimentConfig) -> Optional[float]:
    """Closed-form global-loss bound, defined for the fidelity loss in haar_split mode."""
    if cfg.loss != LossKind.FIDELITY or cfg.mode != Mode.HAAR_SPLIT or cfg.D < 2:
        return None
    trace_g, trace_g2 = generator_traces(hermitian_basis(cfg.N)[0])
    return theorem1_bound(cfg.n, cfg.D, cfg.d, trace_g, trace_g2)


def _statistics(grads: np.ndarray):
    """
    Per-direction variance estimator (1/n) sum g^2 - ((1/n) sum g)^2, averaged over
    directions, with delta-method standard errors.
    """
    count = grads.shape[0]
    means = grads.mean(axis=0)
    centered = grads - means
    variances = (centered**2).mean(axis=0)
    var = float(variances.mean())
    # influence of each sample on the direction-averaged variance
    influence = (centered**2 - variances).mean(axis=1)
    std_error = float(np.sqrt((influence**2).mean() / count))
    per_sample_mean = grads.mean(axis=1)
    mean_std_error = float(per_sample_mean.std() / np.sqrt(count))
    return float(means.mean()), var, std_error, mean_std_error


def mc_variance(cfg: ExperimentConfig, threads: Optional[int] = None) -> VarianceReport:
    """
    Monte-Carlo gradient variance, sampled in blocks until two consecutive block
    estimates agree to the relative tolerance or the budget runs out.

    Samples are drawn on a pool of `threads` worker processes; with a single
    worker they run in this process. Sample s always draws from the stream
    (seed, s), and blocks are reduced in sample order, so the report does not
    depend on the worker count.
    """
    workers = threads or cfg.threads or Config().get_threads()
    problem = build_problem(cfg)
    logger = sample_logger()
    started = time.perf_counter()

    blocks: List[np.ndarray] = []
    used, previous, converged = 0, None, False
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(cfg,))
    try:
        while used < cfg.samples.budget:
            size = min(cfg.samples.block, cfg.samples.budget - used)
            blocks.append(_draw_block(pool, cfg, problem, range(used, used + size), workers))
            used += size

            _, var, _, _ = _statistics(np.concatenate(blocks))
            change = abs(var - previous) / previous if previous else None
            logger.info(f"[{cfg.run_id}] samples={used} var={var:.6e} change={change}")
            converged = var == 0.0 or (change is not None and change < cfg.samples.rel_tol)
            if converged:
                break
            previous = var
    finally:
        if pool is not None:
            pool.shutdown()

    grads = np.concatenate(blocks)
    mean, var, std_error, mean_std_error = _statistics(grads)
    if not converged:
        logger.warning(f"[{cfg.run_id}] budget of {cfg.samples.budget} samples exhausted without convergence")

    delta = None
    if not cfg.loss.is_global:
        delta = periodic_distance(cfg.grad_site, cfg.observable_site, cfg.n)

    return VarianceReport(
        n=cfg.n,
        d=cfg.d,
        D=cfg.D,
        loss=cfg.loss.value,
        mode=cfg.mode.value,
        delta=delta,
        mean_grad=mean,
        var_grad=var,
        std_error=std_error,
        mean_std_error=mean_std_error,
        samples_used=used,
        converged=converged,
        directions=grads.shape[1],
        tail_fractions={eps: float(np.mean(np.abs(grads) > eps)) for eps in cfg.chebyshev_eps},
        bound_value=report_bound(cfg),
        wall_time=time.perf_counter() - started,
    )


def sweep_system_size(
    cfg: ExperimentConfig, n_values: Sequence[int], threads: Optional[int] = None
) -> List[VarianceReport]:
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ArgumentError(f"n values must be increasing, got {n_values}")
    reports = []
    for n in n_values:
        report = mc_variance(cfg.with_n(n), threads)
        sample_logger().info(f"sweep n={n}: var={report.var_grad:.6e} +- {report.std_error:.2e}")
        reports.append(report)
    return reports


def site_at_distance(m: int, delta: int, n: int) -> int:
    """Site delta steps before the observable site m on the ring, upstream of it in circuit order."""
    return (m - 1 - delta) % n + 1


def sweep_distance(
    cfg: ExperimentConfig,
    delta_values: Sequence[int],
    n: Optional[int] = None,
    threads: Optional[int] = None,
) -> List[VarianceReport]:
    if cfg.loss.is_global:
        raise ConfigError("loss", f"a distance sweep needs a local loss, got {cfg.loss.value}")
    if n is not None and n != cfg.n:
        cfg = cfg.with_n(n)
    m = cfg.observable_site
    reports = []
    for delta in delta_values:
        delta = int(delta)
        if not 0 <= delta <= cfg.n // 2:
            raise ArgumentError(f"distance {delta} outside [0, {cfg.n // 2}] for n = {cfg.n}")
        point = cfg.with_grad_site(site_at_distance(m, delta, cfg.n))
        report = mc_variance(point, threads)
        report.delta = delta
        sample_logger().info(f"sweep delta={delta}: var={report.var_grad:.6e} +- {report.std_error:.2e}")
        reports.append(report)
    return reports
