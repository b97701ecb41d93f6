import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from jinja2 import BaseLoader, Environment

TOOL_VERSION = "0.1.0"

CSV_COLUMNS = [
    "run_id", "n", "d", "D", "loss", "mode", "delta",
    "mean_grad", "var_grad", "std_error", "samples", "converged", "bound",
]

PLOT_TEMPLATE = open(os.path.join(os.path.dirname(__file__), "plot.svg.jinja2")).read().strip()


@dataclass
class RunManifest:
    run_id: str
    command: str
    config: Dict[str, Any]
    config_hash: str
    started_at: str
    version: str = TOOL_VERSION
    finished_at: Optional[str] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_row(run_id: str, report) -> List[str]:
    return [
        _fmt(v)
        for v in (
            run_id, report.n, report.d, report.D, report.loss, report.mode, report.delta,
            report.mean_grad, report.var_grad, report.std_error, report.samples_used,
            report.converged, report.bound_value,
        )
    ]


def append_csv(path: str, rows: Sequence[Sequence[str]], columns: Sequence[str] = CSV_COLUMNS):
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "a", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if new:
            writer.writerow(columns)
        writer.writerows(rows)


def write_json(path: str, payload) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def write_manifest(out_dir: str, manifest: RunManifest) -> str:
    return write_json(os.path.join(out_dir, f"{manifest.run_id}.manifest.json"), manifest.to_dict())


def _decades(lo: float, hi: float) -> List[int]:
    return list(range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1))


def render_svg(
    xs: Sequence[float],
    ys: Sequence[float],
    errors: Optional[Sequence[float]] = None,
    x_label: str = "n",
    y_label: str = "Var(dL)",
    title: str = "",
    bound: Optional[Sequence[float]] = None,
    bound_label: str = "bound",
    width: int = 640,
    height: int = 420,
) -> str:
    """Single-panel plot with a log-scale y axis. Non-positive values are not drawn."""
    errors = list(errors) if errors is not None else [0.0] * len(ys)
    positive = [y for y in ys if y > 0] + [b for b in (bound or []) if b > 0]
    if not positive:
        positive = [1.0]
    decades = _decades(min(positive), max(positive))
    if len(decades) < 2:
        decades = [decades[0], decades[0] + 1]
    y_lo, y_hi = decades[0], decades[-1]

    left, right, top, bottom = 80, width - 20, 40, height - 50
    x_min, x_max = min(xs), max(xs)
    x_span = (x_max - x_min) or 1.0

    def px(x):
        return round(left + (x - x_min) / x_span * (right - left), 2)

    def py(y):
        y = max(y, 10.0**y_lo)
        return round(bottom - (math.log10(y) - y_lo) / (y_hi - y_lo) * (bottom - top), 2)

    series = [f"{px(x)},{py(y)}" for x, y in zip(xs, ys) if y > 0]
    markers = [
        {"x": px(x), "y": py(y), "lo": py(max(y - e, 10.0**y_lo)), "hi": py(y + e)}
        for x, y, e in zip(xs, ys, errors)
        if y > 0
    ]
    bound_points = [f"{px(x)},{py(b)}" for x, b in zip(xs, bound or []) if b > 0]

    env = Environment(loader=BaseLoader())
    template = env.from_string(PLOT_TEMPLATE)
    return template.render(
        width=width,
        height=height,
        left=left,
        right=right,
        top=top,
        bottom=bottom,
        title=title,
        x_label=x_label,
        y_label=y_label,
        x_ticks=[{"pos": px(x), "label": f"{x:g}"} for x in xs],
        y_ticks=[{"pos": py(10.0**k), "label": f"1e{k}"} for k in decades],
        series=series,
        markers=markers,
        bound=bound_points,
        bound_label=bound_label,
    ) + "\n"


def write_svg(path: str, svg: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write(svg)
    return path
