"""
Experiment configuration: JSON documents parsed into frozen dataclasses.

Sampling keys missing from the JSON fall back to the [SAMPLING] section of the
tool configuration. Every validation failure raises ConfigError naming the
offending dotted key.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional, Tuple, Union

from src.config import Config
from src.errors import ConfigError
from src.grad import Mode
from src.loss import LossKind

OBSERVABLE_NAMES = ("x", "y", "z", "zero", "identity")


@dataclass(frozen=True)
class ObservableSpec:
    name: str = "x"
    site: Optional[int] = None


@dataclass(frozen=True)
class GradSpec:
    site: Optional[int] = None
    index: Union[int, str] = 1


@dataclass(frozen=True)
class SampleSpec:
    budget: int
    block: int
    rel_tol: float


@dataclass(frozen=True)
class TargetSpec:
    normalize: bool = True
    bond: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    d: int
    D: int
    loss: LossKind
    mode: Mode
    samples: SampleSpec
    seed: int
    observable: ObservableSpec = field(default_factory=ObservableSpec)
    grad: GradSpec = field(default_factory=GradSpec)
    target: TargetSpec = field(default_factory=TargetSpec)
    raw_complex: bool = True
    split: Optional[int] = None
    chebyshev_eps: Tuple[float, ...] = (0.01, 0.05)
    output_dir: Optional[str] = None
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "loss", LossKind(self.loss))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "chebyshev_eps", tuple(self.chebyshev_eps))
        self.validate()

    @property
    def N(self) -> int:
        return self.d * self.D

    @property
    def observable_site(self) -> int:
        if self.observable.site is not None:
            return self.observable.site
        return max(1, self.n // 2)

    @property
    def grad_site(self) -> int:
        if self.grad.site is not None:
            return self.grad.site
        return self.observable_site if not self.loss.is_global else 1

    @property
    def all_directions(self) -> bool:
        return self.grad.index == "all"

    def direction_total(self) -> int:
        if self.mode == Mode.HAAR_SPLIT:
            return 1
        if self.mode == Mode.THETA:
            return self.N**2
        per_entry = 2 if self.raw_complex else 1
        return per_entry * self.d * self.D**2

    def validate(self):
        if self.n < 1:
            raise ConfigError("n", f"must be >= 1, got {self.n}")
        if self.d < 2:
            raise ConfigError("d", f"must be >= 2, got {self.d}")
        if self.D < 1:
            raise ConfigError("D", f"must be >= 1, got {self.D}")

        if self.observable.name not in OBSERVABLE_NAMES:
            raise ConfigError("observable.name", f"must be one of {', '.join(OBSERVABLE_NAMES)}")
        if self.observable.name in ("x", "y", "z") and self.d != 2:
            raise ConfigError("observable.name", f"Pauli {self.observable.name} needs d = 2")
        if self.observable.site is not None and not 1 <= self.observable.site <= self.n:
            raise ConfigError("observable.site", f"m = {self.observable.site} must lie in [1, n = {self.n}]")
        if self.grad.site is not None and not 1 <= self.grad.site <= self.n:
            raise ConfigError("grad.site", f"i = {self.grad.site} must lie in [1, n = {self.n}]")

        index = self.grad.index
        if index != "all":
            if not isinstance(index, int) or isinstance(index, bool) or index < 1:
                raise ConfigError("grad.index", f"must be a positive integer or \"all\", got {index!r}")
            if index > self.direction_total():
                raise ConfigError("grad.index", f"{index} exceeds the {self.direction_total()} directions of {self.mode.value} mode")

        if self.split is not None and not 1 <= self.split < self.N**2:
            raise ConfigError("theta.split", f"must lie in [1, {self.N**2 - 1}]")
        if self.target.bond < 1:
            raise ConfigError("target.bond", "must be >= 1")

        if self.samples.block < 2:
            raise ConfigError("samples.block", "must be >= 2")
        if self.samples.budget < self.samples.block:
            raise ConfigError("samples.budget", f"must be >= block ({self.samples.block})")
        if not self.samples.rel_tol > 0:
            raise ConfigError("samples.rel_tol", "must be positive")
        if any(not eps > 0 for eps in self.chebyshev_eps):
            raise ConfigError("chebyshev_eps", "every epsilon must be positive")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads", "must be >= 1")

    def with_n(self, n: int) -> "ExperimentConfig":
        return replace(self, n=n)

    def with_grad_site(self, site: int) -> "ExperimentConfig":
        return replace(self, grad=replace(self.grad, site=site))

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready echo with every default resolved except run-local knobs."""
        return {
            "n": self.n,
            "d": self.d,
            "D": self.D,
            "loss": self.loss.value,
            "mode": self.mode.value,
            "observable": {"name": self.observable.name, "site": self.observable_site},
            "grad": {"site": self.grad_site, "index": self.grad.index},
            "samples": asdict(self.samples),
            "seed": self.seed,
            "target": asdict(self.target),
            "raw": {"complex": self.raw_complex},
            "theta": {"split": self.split},
            "chebyshev_eps": list(self.chebyshev_eps),
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    @property
    def run_id(self) -> str:
        return self.config_hash()[:12]


def _section(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(key, "must be an object")
    return value


def _int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(key, f"must be an integer, got {value!r}")
    return int(value)


def _float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"must be a number, got {value!r}")
    return float(value)


def _optional_int(value, key: str) -> Optional[int]:
    return None if value is None else _int(value, key)


def _bool(value, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(key, f"must be true or false, got {value!r}")
    return value


def config_from_dict(data: Dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "experiment config must be a JSON object")
    config = Config()

    for key in ("n", "d", "D", "loss", "mode"):
        if key not in data:
            raise ConfigError(key, "is required")
    try:
        loss = LossKind(data["loss"])
    except ValueError:
        raise ConfigError("loss", f"unknown loss {data['loss']!r}, expected one of {[k.value for k in LossKind]}")
    try:
        mode = Mode(data["mode"])
    except ValueError:
        raise ConfigError("mode", f"unknown mode {data['mode']!r}, expected one of {[m.value for m in Mode]}")

    obs = _section(data, "observable")
    grad = _section(data, "grad")
    samples = _section(data, "samples")
    target = _section(data, "target")
    raw = _section(data, "raw")
    theta = _section(data, "theta")

    index = grad.get("index", 1)
    if index != "all":
        index = _int(index, "grad.index")

    eps = data.get("chebyshev_eps", [0.01, 0.05])
    if not isinstance(eps, list):
        raise ConfigError("chebyshev_eps", "must be a list of numbers")

    return ExperimentConfig(
        n=_int(data["n"], "n"),
        d=_int(data["d"], "d"),
        D=_int(data["D"], "D"),
        loss=loss,
        mode=mode,
        samples=SampleSpec(
            budget=_int(samples.get("budget", config.get_sample_budget()), "samples.budget"),
            block=_int(samples.get("block", config.get_block_size()), "samples.block"),
            rel_tol=_float(samples.get("rel_tol", config.get_rel_tol()), "samples.rel_tol"),
        ),
        seed=_int(data.get("seed", config.get_seed()), "seed"),
        observable=ObservableSpec(
            name=str(obs.get("name", "x")),
            site=_optional_int(obs.get("site"), "observable.site"),
        ),
        grad=GradSpec(site=_optional_int(grad.get("site"), "grad.site"), index=index),
        target=TargetSpec(
            normalize=_bool(target.get("normalize", True), "target.normalize"),
            bond=_int(target.get("bond", 1), "target.bond"),
        ),
        raw_complex=_bool(raw.get("complex", True), "raw.complex"),
        split=_optional_int(theta.get("split"), "theta.split"),
        chebyshev_eps=tuple(_float(e, "chebyshev_eps") for e in eps),
        output_dir=data.get("output_dir"),
        threads=_optional_int(data.get("threads"), "threads"),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError("--config", f"no such file {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}", e.msg)
    return config_from_dict(data)
