"""Method x problem x stepsize sweeps producing efficiency-curve data."""

from __future__ import annotations

import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .integrator import NonFiniteState, StarterMode, integrate, step_count
from .methods import ADAPTED_METHODS, Family, MethodId, SingularCoefficient
from .problems import (
    SATELLITE_BASE_STEP,
    BenchmarkId,
    InvalidParams,
    OracleNotConverged,
    cubic_reference,
    make_problem,
    satellite_reference,
)

__all__ = [
    "ConfigError",
    "EfficiencyRecord",
    "SweepConfig",
    "CSV_HEADER",
    "default_j_range",
    "default_base",
    "load_config",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "plot_script",
    "write_outputs",
    "apply_setting",
    "prepare_problem",
    "report_errors",
]

CSV_HEADER = ("method", "problem", "h", "steps", "g_evals", "max_global_error", "wall_time_s")


class ConfigError(ValueError):
    """The sweep configuration is malformed."""


@dataclass(frozen=True)
class EfficiencyRecord:
    method: str
    problem: str
    h: float
    steps: int
    g_evals: int
    max_global_error: float
    wall_time_s: float = 0.0
    # "ok" or "error"; reason is one of blowup, singular, oracle, invalid
    status: str = "ok"
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


_BASES = {
    BenchmarkId.SATELLITE: SATELLITE_BASE_STEP,
    BenchmarkId.CUBIC: math.pi / 8,
    BenchmarkId.HARMONIC: 0.1,
}


def default_base(problem: BenchmarkId) -> float:
    return _BASES.get(problem, 1.0)


def default_j_range(method: MethodId, problem: BenchmarkId) -> tuple[int, ...]:
    """Stepsize exponents j of h = base * 2^-j used in the reference experiments."""
    if problem is BenchmarkId.INHOMOGENEOUS:
        lo = 3 if method.classical else 1
    elif problem is BenchmarkId.STIEFEL_BETTIS:
        if method.classical:
            lo = 0
        elif method.family is Family.ATSH5_PL8:
            lo = -1
        else:
            lo = -2
    elif problem is BenchmarkId.SATELLITE:
        lo = 0 if method.classical else -2
    elif problem is BenchmarkId.FRANCO_SYSTEM:
        lo = 2
    else:
        lo = 0
    return tuple(range(lo, lo + (4 if problem in (BenchmarkId.CUBIC, BenchmarkId.HARMONIC) else 5)))


@dataclass
class SweepConfig:
    methods: list[MethodId] = field(
        default_factory=lambda: list(ADAPTED_METHODS) + [m.companion() for m in ADAPTED_METHODS]
    )
    problems: list[BenchmarkId] = field(
        default_factory=lambda: [
            BenchmarkId.INHOMOGENEOUS,
            BenchmarkId.STIEFEL_BETTIS,
            BenchmarkId.SATELLITE,
            BenchmarkId.FRANCO_SYSTEM,
        ]
    )
    # overrides keyed by (method name, problem name); missing keys use the defaults
    j_ranges: dict[tuple[str, str], tuple[int, ...]] = field(default_factory=dict)
    bases: dict[str, float] = field(default_factory=dict)
    # None picks exact where available and the oracle otherwise
    starter: StarterMode | None = None
    count_starter: bool = False
    workers: int = 1
    timing: bool = False
    output: str | None = None

    def j_range(self, method: MethodId, problem: BenchmarkId) -> tuple[int, ...]:
        js = self.j_ranges.get((method.name, problem.value))
        if js is None:
            js = self.j_ranges.get(("*", problem.value), default_j_range(method, problem))
        if not js:
            raise ConfigError(f"empty j range for {method.name} on {problem.value}")
        return tuple(js)

    def base(self, problem: BenchmarkId) -> float:
        b = self.bases.get(problem.value, default_base(problem))
        if not b > 0:
            raise ConfigError(f"base stepsize for {problem.value} must be positive, got {b}")
        return b

    def cells(self) -> list[tuple[MethodId, BenchmarkId, float]]:
        return [
            (m, p, self.base(p) * 2.0 ** -j)
            for m in self.methods
            for p in self.problems
            for j in self.j_range(m, p)
        ]


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_j(text: str) -> tuple[int, ...]:
    """'1..5' or '1,2,3'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"bad j range {text!r}") from None


def _split_names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def apply_setting(config: SweepConfig, key: str, value: str) -> None:
    """Apply one key = value setting (shared by config files and CLI overrides)."""
    key = key.strip()
    try:
        if key == "methods":
            config.methods = [MethodId.parse(n) for n in _split_names(value)]
        elif key == "problems":
            config.problems = [BenchmarkId.parse(n) for n in _split_names(value)]
        elif key == "starter":
            config.starter = None if value.strip() == "auto" else StarterMode(value.strip())
        elif key == "count_starter":
            config.count_starter = _parse_bool(value)
        elif key == "timing":
            config.timing = _parse_bool(value)
        elif key == "workers":
            config.workers = int(value)
            if config.workers < 1:
                raise ConfigError("workers must be at least 1")
        elif key == "output":
            config.output = value.strip()
        elif key.startswith("base."):
            config.bases[BenchmarkId.parse(key[5:]).value] = float(value)
        elif key.startswith("j."):
            method, _, problem = key[2:].rpartition(".")
            if method != "*":
                method = MethodId.parse(method).name
            config.j_ranges[(method, BenchmarkId.parse(problem).value)] = _parse_j(value)
        else:
            raise ConfigError(f"unknown setting {key!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(path: str | os.PathLike, config: SweepConfig | None = None) -> SweepConfig:
    """Read a key = value file; blank lines and '#' comments are ignored.

    Keys: methods, problems, starter, count_starter, timing, workers, output,
    base.<problem>, j.<method>.<problem> (method may be '*').
    """
    config = config or SweepConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        try:
            apply_setting(config, key, value)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return config


def prepare_problem(pid: BenchmarkId, h_min: float):
    """Problem with an exact (or grid-reference) solution attached, and its default starter."""
    problem = make_problem(pid)
    if pid is BenchmarkId.SATELLITE:
        return problem.with_exact(satellite_reference(h_min=h_min)), StarterMode.ORACLE
    if pid is BenchmarkId.CUBIC:
        return problem.with_exact(cubic_reference(h_min=h_min)), StarterMode.ORACLE
    return problem, StarterMode.EXACT


def _run_cell(method, pid, h, problem, starter, config) -> EfficiencyRecord:
    base = dict(method=method.name, problem=pid.value, h=h)
    if step_count(problem.x0, problem.x_end, h) < 2:
        # stepsize too coarse for the interval
        return EfficiencyRecord(**base, steps=0, g_evals=0, max_global_error=math.nan,
                                status="error", reason="invalid")
    try:
        res = integrate(method, problem, h, starter)
    except NonFiniteState:
        return EfficiencyRecord(**base, steps=0, g_evals=0, max_global_error=math.nan,
                                status="error", reason="blowup")
    except SingularCoefficient:
        return EfficiencyRecord(**base, steps=0, g_evals=0, max_global_error=math.nan,
                                status="error", reason="singular")
    if not math.isfinite(res.max_global_error):
        # finite states whose error overflows
        return EfficiencyRecord(**base, steps=res.steps, g_evals=0, max_global_error=math.nan,
                                status="error", reason="blowup")
    return EfficiencyRecord(
        method=method.name,
        problem=pid.value,
        h=res.h,
        steps=res.steps,
        g_evals=res.total_evals(config.count_starter),
        max_global_error=res.max_global_error,
        wall_time_s=res.wall_time_s if config.timing else 0.0,
    )


def _sort_key(r: EfficiencyRecord):
    return (r.method, r.problem, r.h)


def run_sweep(config: SweepConfig) -> list[EfficiencyRecord]:
    """One record per (method, problem, h), in canonical order.

    Failing cells become error rows instead of aborting the sweep.
    """
    cells = config.cells()
    prepared = {}
    for pid in config.problems:
        hs = [h for _, p, h in cells if p is pid]
        if not hs:
            continue
        try:
            prepared[pid] = prepare_problem(pid, min(hs))
        except (OracleNotConverged, InvalidParams) as exc:
            prepared[pid] = exc

    def work(cell):
        method, pid, h = cell
        prep = prepared[pid]
        if isinstance(prep, Exception):
            reason = "oracle" if isinstance(prep, OracleNotConverged) else "invalid"
            return EfficiencyRecord(method.name, pid.value, h, 0, 0, math.nan,
                                    status="error", reason=reason)
        problem, default_starter = prep
        return _run_cell(method, pid, h, problem, config.starter or default_starter, config)

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            records = list(pool.map(work, cells))
    else:
        records = [work(c) for c in cells]
    return sorted(records, key=_sort_key)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def emit_csv(records, stream) -> None:
    """Write records with the fixed header; floats use 17 significant digits."""
    stream.write(",".join(CSV_HEADER) + "\n")
    for r in records:
        row = (r.method, r.problem, _fmt(float(r.h)), _fmt(r.steps), _fmt(r.g_evals),
               _fmt(float(r.max_global_error)), _fmt(float(r.wall_time_s)))
        stream.write(",".join(row) + "\n")


def read_csv(stream) -> list[EfficiencyRecord]:
    """Parse emitted CSV back into records; rows with a nan error are error rows."""
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        err = float(row["max_global_error"])
        out.append(EfficiencyRecord(
            method=row["method"],
            problem=row["problem"],
            h=float(row["h"]),
            steps=int(row["steps"]),
            g_evals=int(row["g_evals"]),
            max_global_error=err,
            wall_time_s=float(row["wall_time_s"]),
            status="error" if math.isnan(err) else "ok",
        ))
    return out


_PLOT_TEMPLATE = '''\
"""Efficiency curves: log10(max global error) against g evaluations."""
import csv
import math
import os
from collections import defaultdict

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_NAME = {csv_name!r}

curves = defaultdict(lambda: defaultdict(list))
with open(os.path.join(HERE, CSV_NAME)) as fh:
    for row in csv.DictReader(fh):
        err = float(row["max_global_error"])
        if math.isnan(err) or err <= 0:
            continue
        curves[row["problem"]][row["method"]].append((int(row["g_evals"]), math.log10(err)))

problems = sorted(curves)
fig, axes = plt.subplots(1, max(len(problems), 1), figsize=(5 * max(len(problems), 1), 4), squeeze=False)
for ax, problem in zip(axes[0], problems):
    for method, pts in sorted(curves[problem].items()):
        pts.sort()
        style = "--" if method.startswith("classical:") else "-"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style, marker="o", label=method)
    ax.set_title(problem)
    ax.set_xlabel("function evaluations")
    ax.set_ylabel("log10(max global error)")
    ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png_name!r}))
'''


def plot_script(csv_name: str) -> str:
    """Source of a standalone matplotlib script reading ``csv_name`` next to itself."""
    stem = os.path.splitext(os.path.basename(csv_name))[0]
    return _PLOT_TEMPLATE.format(csv_name=os.path.basename(csv_name), png_name=stem + ".png")


def write_outputs(records, csv_path: str | os.PathLike, with_plot: bool = False) -> list[Path]:
    """Write the CSV (and optionally its plot script) and return the paths written."""
    csv_path = Path(csv_path)
    buf = io.StringIO()
    emit_csv(records, buf)
    written = []
    try:
        csv_path.write_text(buf.getvalue())
        written.append(csv_path)
        if with_plot:
            if not records:
                raise ValueError("no records to plot")
            script = csv_path.with_name(csv_path.stem + "_plot.py")
            script.write_text(plot_script(csv_path.name))
            written.append(script)
    except OSError as exc:
        raise OSError(f"cannot write {exc.filename or csv_path}: {exc.strerror}") from exc
    return written


def report_errors(records, stream=None) -> int:
    """Print one line per error row (to stderr by default); return their count."""
    stream = stream or sys.stderr
    bad = [r for r in records if not r.ok]
    for r in bad:
        print(f"error row: {r.method} {r.problem} h={r.h:.6g} reason={r.reason}", file=stream)
    return len(bad)
