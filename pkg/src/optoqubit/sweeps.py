"""Point evaluation, parameter sweeps, onset bisection and CSV output."""

from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics, lyapunov, measures
from .params import FIELDS, ReducedParams, baseline

MODES = ("point", "stability-map", "sweep-detuning", "sweep-coupling", "sweep-thermal")
WORKERS_ENV = "OPTOQUBIT_WORKERS"
CSV_HEADER = ("axis", "eta", "stable", "E_N", "I_M", "D_G", "nu_tilde_minus", "cond_flag")
MAP_HEADER = ("delta", "g", "stable", "max_re_eig")
NA = "NA"

DEFAULT_ETAS = (0.0, 0.2, 0.4, 0.6)
# (name, min, max, step)
DEFAULT_AXES = {
    "sweep-detuning": ("delta", 0.05, 1.2, 0.005),
    "sweep-coupling": ("g_eff", 0.0, 0.6, 0.0025),
    "sweep-thermal": ("n_th", 0.0, 14000.0, 50.0),
    "stability-map": ("delta", 0.0, 1.2, 0.005),
}
DEFAULT_MAP_G_AXIS = ("g_eff", 0.0, 1.2, 0.005)
COUPLING_MARGIN = 1e-6


class PipelineError(RuntimeError):
    """A numerical failure inside one stage of the point pipeline."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.name not in FIELDS:
            raise ValueError(f"unknown axis field {self.name!r}; expected one of {FIELDS}")
        if self.steps < 2:
            raise ValueError("axis needs at least 2 steps")
        if not self.min < self.max:
            raise ValueError("axis min must be below max")

    @classmethod
    def from_step(cls, name, lo, hi, step):
        return cls(name, lo, hi, int(round((hi - lo) / step)) + 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass
class SweepConfig:
    mode: str
    fixed: dict = field(default_factory=dict)
    axis: Axis | None = None
    axis2: Axis | None = None  # coupling axis of a stability map
    eta_list: list = field(default_factory=lambda: list(DEFAULT_ETAS))
    output_path: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        unknown = set(self.fixed) - set(FIELDS)
        if unknown:
            raise ValueError(f"unknown fixed fields {sorted(unknown)}")
        if self.axis is not None and self.axis.name in self.fixed:
            raise ValueError(f"axis field {self.axis.name!r} is also fixed")
        if self.mode == "stability-map" and self.axis is not None and self.axis.name != "delta":
            raise ValueError("stability-map axis must be delta (axis2 is the coupling)")

    def template(self) -> ReducedParams:
        return baseline(**self.fixed)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    eta: float
    stable: bool
    e_n: float | None = None
    i_m: float | None = None
    d_g: float | None = None
    nu_tilde_minus: float | None = None
    condition_flag: bool = False


def run_point(p: ReducedParams, axis_value: float | None = None) -> SweepRow:
    """Full pipeline for one parameter set: stability, covariance, measures."""
    x = p.delta if axis_value is None else axis_value
    try:
        verdict = dynamics.stability(p)
    except Exception as exc:
        raise PipelineError("dynamics", exc) from exc
    if not verdict.stable:
        return SweepRow(x, p.eta, False)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", lyapunov.IllConditionedWarning)
            v, cond = lyapunov.solve_lyapunov(
                dynamics.build_drift(p), dynamics.build_diffusion(p), full_output=True
            )
    except Exception as exc:
        raise PipelineError("lyapunov", exc) from exc
    try:
        r = measures.report(v)
    except Exception as exc:
        raise PipelineError("measures", exc) from exc
    return SweepRow(x, p.eta, True, r.e_n, r.i_m, r.d_g, r.nu_tilde_minus, cond > lyapunov.ILL_CONDITIONED)


def _run(args):
    p, x = args
    return run_point(p, x)


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_points(jobs: list[tuple[ReducedParams, float]], workers: int | None = None) -> list[SweepRow]:
    """Evaluate jobs, concurrently when ``workers`` > 1; output order follows ``jobs``."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) < 64:
        return [_run(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run, jobs, chunksize=chunk))


def _sweep(cfg: SweepConfig, default_axis, workers, clip=None) -> list[SweepRow]:
    base = cfg.template()
    jobs = []
    for eta in cfg.eta_list:
        p_eta = base.replace(eta=float(eta))
        if cfg.axis is not None:
            xs = cfg.axis.values()
            name = cfg.axis.name
        else:
            name, lo, hi, step = default_axis
            if clip is not None:
                hi = min(hi, clip(p_eta))
            xs = lo + step * np.arange(int(math.floor((hi - lo) / step + 1e-9)) + 1)
        jobs.extend((p_eta.replace(**{name: float(x)}), float(x)) for x in xs)
    return run_points(jobs, workers)


def sweep_detuning(cfg: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """Rows over the detuning grid, eta outer and detuning inner."""
    return _sweep(cfg, DEFAULT_AXES["sweep-detuning"], workers)


def _coupling_ceiling(p: ReducedParams) -> float:
    if p.delta > 0 and p.eta < 1:
        return dynamics.threshold_coupling(p.delta, p.kappa, p.eta) - COUPLING_MARGIN
    return math.inf


def sweep_coupling(cfg: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """Rows over G; the default grid stops short of the instability threshold."""
    return _sweep(cfg, DEFAULT_AXES["sweep-coupling"], workers, clip=_coupling_ceiling)


def sweep_thermal(cfg: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    return _sweep(cfg, DEFAULT_AXES["sweep-thermal"], workers)


def run_stability_map(cfg: SweepConfig) -> list[dynamics.StabilityMap]:
    """One map per eta in ``cfg.eta_list``."""
    d_axis = cfg.axis or Axis.from_step(*DEFAULT_AXES["stability-map"])
    g_axis = cfg.axis2 or Axis.from_step(*DEFAULT_MAP_G_AXIS)
    base = cfg.template()
    return [
        dynamics.stability_map(d_axis.values(), g_axis.values(), base.replace(eta=float(eta)))
        for eta in cfg.eta_list
    ]


SWEEPS = {
    "sweep-detuning": sweep_detuning,
    "sweep-coupling": sweep_coupling,
    "sweep-thermal": sweep_thermal,
}


def is_entangled(p: ReducedParams) -> bool:
    row = run_point(p)
    return row.stable and row.nu_tilde_minus < 0.5


def is_stable(p: ReducedParams) -> bool:
    return dynamics.stability(p).stable


PREDICATES = {"entangled": is_entangled, "stable": is_stable}


def find_onset(axis: str, template: ReducedParams, bracket: tuple[float, float], predicate="entangled", tol=None) -> float:
    """Bisect ``axis`` for the point where ``predicate`` changes truth value.

    Parameters
    ----------
    axis : str
        ReducedParams field to vary.
    bracket : (lo, hi)
        The predicate must differ at the two ends; either orientation works.
    predicate : str or callable
        ``"entangled"`` (stable and nu_tilde_minus < 1/2), ``"stable"`` or a
        callable on ReducedParams.
    tol : float, optional
        Final bracket width; 1 for ``n_th``, 1e-4 otherwise.

    Returns
    -------
    float
        Midpoint of the final bracket.
    """
    if axis not in FIELDS:
        raise ValueError(f"unknown axis field {axis!r}")
    test = PREDICATES[predicate] if isinstance(predicate, str) else predicate
    if tol is None:
        tol = 1.0 if axis == "n_th" else 1e-4
    lo, hi = map(float, bracket)
    at_lo = test(template.replace(**{axis: lo}))
    at_hi = test(template.replace(**{axis: hi}))
    if at_lo == at_hi:
        raise ValueError(f"no sign change in bracket [{lo}, {hi}] for {axis}")
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if test(template.replace(**{axis: mid})) == at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def locate_maximum(x, y) -> tuple[float, float]:
    """Peak of sampled ``y`` refined by a parabola through the three points around it.

    NaNs (unstable points) are ignored. At a grid edge the sample itself is returned.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.nanargmax(y))
    if i == 0 or i == len(y) - 1 or not np.isfinite(y[i - 1 : i + 2]).all():
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1 : i + 2]
    y0, y1, y2 = y[i - 1 : i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    c = y1 - a * x1 * x1 - b * x1
    return float(xv), float(a * xv * xv + b * xv + c)


def column(rows: list[SweepRow], name: str, eta: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(axis values, field values) for one eta; unstable entries become NaN."""
    sel = [r for r in rows if eta is None or math.isclose(r.eta, eta, abs_tol=1e-12)]
    xs = np.array([r.axis_value for r in sel])
    ys = np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in sel], dtype=float)
    return xs, ys


def _fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, bool):
        return str(int(x))
    return f"{x:.9g}"


def emit_csv(rows: list[SweepRow], path) -> None:
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow(
                    [
                        _fmt(r.axis_value),
                        _fmt(r.eta),
                        _fmt(r.stable),
                        _fmt(r.e_n),
                        _fmt(r.i_m),
                        _fmt(r.d_g),
                        _fmt(r.nu_tilde_minus),
                        _fmt(r.condition_flag),
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_map_csv(maps: list[dynamics.StabilityMap], etas, path) -> None:
    """Stability maps as delta,g,stable,max_re_eig rows; an eta column is prepended when several maps are written."""
    path = Path(path)
    header = MAP_HEADER if len(maps) == 1 else ("eta",) + MAP_HEADER
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for eta, m in zip(etas, maps):
                for d, g, s, re in m.rows():
                    row = [_fmt(d), _fmt(g), _fmt(s), _fmt(re)]
                    w.writerow(row if len(maps) == 1 else [_fmt(float(eta))] + row)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> list[dict]:
    """Parse an emitted sweep CSV back into dicts of floats (None for NA)."""
    with open(path, encoding="utf-8") as fh:
        return [{k: None if v == NA else float(v) for k, v in row.items()} for row in csv.DictReader(fh)]
