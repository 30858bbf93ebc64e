"""Grid sweeps over protocol parameters with deterministic CSV output.

A sweep walks a 2-D parameter grid, evaluates the requested quantities at
every point (in parallel if asked), and writes one CSV row per point in
axis1-major order.  Output bytes are identical no matter how many workers
ran the grid: each point's result is keyed by its index, and formatting is
fixed at 17 significant digits.
"""
from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import math
import multiprocessing
import sys

from . import asymptotics
from .elements import ProtocolParams, lab, laa_closed, m_element, m_pm
from .measures import comm_ratio, mutual_info, negativity_pert, n_pm
from .precision import (
    DEFAULT_PRECISION,
    ConvergenceError,
    DomainError,
    NumericsError,
    PrecisionConfig,
)
from .scaling import ScaledComplex

AXIS_NAMES = ("delta_dim", "lbar", "dbar", "t_omega")

# quantities emitting _re/_im/_abs column triples; everything else is one column
COMPLEX_QUANTITIES = frozenset({
    "laa", "lab", "m", "m_plus", "m_minus",
    "lab_asym1", "lab_asym2", "m_far1", "m_far2",
    "m_near_lc0", "m_near_lc1", "m_near_lc2",
    "m_plus_sl", "m_minus_sl", "m_plus_tl", "m_minus_tl", "m_endpoint",
})
REAL_QUANTITIES = frozenset({
    "negativity", "mutual_info", "n_plus", "n_minus", "comm_ratio",
    "laa_asym1", "laa_asym2",
    "negativity_far1", "negativity_far2", "negativity_near_lc",
    "n_plus_sl", "n_minus_sl", "n_plus_tl", "n_minus_tl",
    "mi_full", "mi_bigl",
})
KNOWN_QUANTITIES = COMPLEX_QUANTITIES | REAL_QUANTITIES

_LIGHTCONE_EPS = 1e-9


@dataclasses.dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: a uniform, inclusive grid over a parameter."""

    name: str      # one of AXIS_NAMES
    lo: float
    hi: float
    steps: int     # number of grid points, >= 2

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise DomainError(f"axis over unknown parameter {self.name!r}")
        if self.steps < 2:
            raise DomainError("axis needs at least 2 steps")
        if not self.hi > self.lo:
            raise DomainError("axis needs hi > lo")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.steps - 1)

    def values(self) -> list[float]:
        return [self.lo + i * self.step for i in range(self.steps)]


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    """A reproducible sweep: fixed params, two axes, and quantity list."""

    fixed: ProtocolParams
    axis1: AxisSpec
    axis2: AxisSpec
    quantities: tuple[str, ...]
    scaling: str = "unscaled"  # "unscaled" divides out e^{-W^2/2}; "raw" keeps it

    def __post_init__(self) -> None:
        if self.axis1.name == self.axis2.name:
            raise DomainError("sweep axes must name distinct parameters")
        if not self.quantities:
            raise DomainError("sweep needs at least one quantity")
        for q in self.quantities:
            if q not in KNOWN_QUANTITIES:
                raise DomainError(f"unknown quantity {q!r}")
        if self.scaling not in ("unscaled", "raw"):
            raise DomainError(f"unknown scaling {self.scaling!r}")

    # -- JSON round-trip ---------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "fixed": dataclasses.asdict(self.fixed),
            "axis1": dataclasses.asdict(self.axis1),
            "axis2": dataclasses.asdict(self.axis2),
            "quantities": list(self.quantities),
            "scaling": self.scaling,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        doc = json.loads(text)
        return cls(
            fixed=ProtocolParams(**doc["fixed"]),
            axis1=AxisSpec(**doc["axis1"]),
            axis2=AxisSpec(**doc["axis2"]),
            quantities=tuple(doc["quantities"]),
            scaling=doc.get("scaling", "unscaled"),
        )


def dodge_lightcone(params: ProtocolParams, step: float) -> ProtocolParams:
    """Nudge a grid point off the exact lightcone |dbar| = lbar.

    The kernels are genuinely singular there; a half-step shift keeps the
    grid spacing intact while never sampling the cone itself.
    """
    if abs(abs(params.dbar) - params.lbar) > _LIGHTCONE_EPS:
        return params
    shift = 0.5 * step if step > 0 else 0.5
    return dataclasses.replace(params, dbar=params.dbar + shift)


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def _scale_shift(params: ProtocolParams, scaling: str) -> float:
    return 0.0 if scaling == "raw" else params.t_omega ** 2 / 2


def _emit(value: ScaledComplex, shift: float) -> complex:
    return ScaledComplex(value.mantissa, value.log_scale + shift).to_complex()


class _PointCache:
    """Lazy per-point element evaluation: compute only what's requested."""

    def __init__(self, params: ProtocolParams, cfg: PrecisionConfig) -> None:
        self.params = params
        self.cfg = cfg
        self._store: dict[str, object] = {}

    def _get(self, key: str, producer):
        if key not in self._store:
            self._store[key] = producer()
        return self._store[key]

    @property
    def laa(self) -> ScaledComplex:
        return self._get("laa", lambda: laa_closed(self.params, self.cfg))

    @property
    def lab(self) -> ScaledComplex:
        return self._get("lab", lambda: lab(self.params, "auto", self.cfg))

    @property
    def m(self) -> ScaledComplex:
        return self._get("m", lambda: m_element(self.params, self.cfg))

    @property
    def m_split(self):
        return self._get("m_split", lambda: m_pm(self.params, self.cfg))

    @property
    def n_split(self):
        plus, minus = self.m_split
        return self._get("n_split", lambda: n_pm(plus, minus, self.laa))


def _evaluate_quantity(cache: _PointCache, name: str):
    """One quantity at one point -> ScaledComplex, or float for ratios."""
    p, cfg = cache.params, cache.cfg
    if name == "laa":
        return cache.laa
    if name == "lab":
        return cache.lab
    if name == "m":
        return cache.m
    if name == "m_plus":
        return cache.m_split[0]
    if name == "m_minus":
        return cache.m_split[1]
    if name == "negativity":
        return negativity_pert(cache.laa, cache.m, cfg)
    if name == "mutual_info":
        return mutual_info(cache.laa, cache.lab)
    if name == "n_plus":
        return cache.n_split[0]
    if name == "n_minus":
        return cache.n_split[1]
    if name == "comm_ratio":
        total = negativity_pert(cache.laa, cache.m, cfg)
        ratio = comm_ratio(cache.n_split[1], total)
        return math.nan if ratio is None else ratio
    if name in ("laa_asym1", "laa_asym2"):
        return asymptotics.laa_asym(p, int(name[-1]), cfg=cfg)[0]
    if name in ("lab_asym1", "lab_asym2"):
        return asymptotics.lab_asym(p, int(name[-1]), cfg=cfg)[0]
    if name in ("m_far1", "m_far2"):
        return asymptotics.m_asym_far(p, int(name[-1]), cfg=cfg)[0]
    if name.startswith("m_near_lc"):
        return asymptotics.m_asym_near_lc(p, int(name[-1]), cfg=cfg)[0]
    if name in ("m_plus_sl", "m_minus_sl"):
        plus, minus, _ = asymptotics.m_pm_asym(p, "SL", cfg=cfg)
        return plus if name == "m_plus_sl" else minus
    if name in ("m_plus_tl", "m_minus_tl"):
        plus, minus, _ = asymptotics.m_pm_asym(p, "TL", cfg=cfg)
        return plus if name == "m_plus_tl" else minus
    if name == "m_endpoint":
        return asymptotics.m_endpoint_asym(p, cfg=cfg)[0]
    if name.startswith("negativity_"):
        variant = name[len("negativity_"):]
        variant = {"far1": "far_1", "far2": "far_2", "near_lc": "near_lc"}[variant]
        return asymptotics.negativity_asym(p, variant, cfg=cfg)[0]
    if name in ("n_plus_sl", "n_minus_sl", "n_plus_tl", "n_minus_tl"):
        which = "SL" if name.endswith("sl") else "TL"
        plus, minus, _ = asymptotics.npm_asym(p, which, cfg=cfg)
        return plus if "plus" in name else minus
    if name in ("mi_full", "mi_bigl"):
        variant = "full" if name == "mi_full" else "bigL"
        return asymptotics.mi_asym(p, variant, cfg=cfg)[0]
    raise DomainError(f"unknown quantity {name!r}")


def evaluate_point(params: ProtocolParams, quantities: tuple[str, ...],
                   scaling: str, cfg: PrecisionConfig = DEFAULT_PRECISION
                   ) -> tuple[list[float], list[str]]:
    """All requested cell values at one point, plus any failure messages.

    A failed quantity contributes nan cells; the sweep keeps going.
    """
    cache = _PointCache(params, cfg)
    shift = _scale_shift(params, scaling)
    cells: list[float] = []
    failures: list[str] = []
    for name in quantities:
        width = 3 if name in COMPLEX_QUANTITIES else 1
        try:
            value = _evaluate_quantity(cache, name)
        except (DomainError, NumericsError, ConvergenceError) as exc:
            failures.append(f"{name}: {exc}")
            cells.extend([math.nan] * width)
            continue
        if isinstance(value, ScaledComplex):
            z = _emit(value, shift)
            if width == 3:
                cells.extend([z.real, z.imag, abs(z)])
            else:
                cells.append(z.real)
        else:
            cells.append(float(value))
    return cells, failures


# ---------------------------------------------------------------------------
# grid execution
# ---------------------------------------------------------------------------


def _grid_points(spec: SweepSpec) -> list[ProtocolParams]:
    # the dodge shift should be half a step of whichever axis moves the
    # point relative to the cone, so the shifted point stays between rows
    by_name = {spec.axis1.name: spec.axis1.step, spec.axis2.name: spec.axis2.step}
    dodge_step = by_name.get("dbar", by_name.get(
        "lbar", min(spec.axis1.step, spec.axis2.step)))
    pts = []
    for v1 in spec.axis1.values():
        for v2 in spec.axis2.values():
            params = dataclasses.replace(
                spec.fixed, **{spec.axis1.name: v1, spec.axis2.name: v2}
            )
            pts.append(dodge_lightcone(params, dodge_step))
    return pts


def _worker(task):
    params, quantities, scaling, cfg = task
    return evaluate_point(params, quantities, scaling, cfg)


def header_for(spec: SweepSpec) -> list[str]:
    cols = [spec.axis1.name, spec.axis2.name]
    for q in spec.quantities:
        if q in COMPLEX_QUANTITIES:
            cols.extend([f"{q}_re", f"{q}_im", f"{q}_abs"])
        else:
            cols.append(q)
    return cols


def format_cell(x: float) -> str:
    return f"{x:.17g}"


def run_grid(spec: SweepSpec, threads: int = 1,
             cfg: PrecisionConfig = DEFAULT_PRECISION
             ) -> tuple[list[ProtocolParams], list[list[float]], list[str]]:
    """Evaluate every grid point; returns (points, cell rows, warnings)."""
    points = _grid_points(spec)
    tasks = [(p, spec.quantities, spec.scaling, cfg) for p in points]
    if threads > 1:
        ctx = multiprocessing.get_context("fork")
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=threads, mp_context=ctx
        ) as pool:
            results = list(pool.map(_worker, tasks, chunksize=4))
    else:
        results = [_worker(t) for t in tasks]
    rows: list[list[float]] = []
    warnings: list[str] = []
    for params, (cells, failures) in zip(points, results):
        rows.append(cells)
        for msg in failures:
            warnings.append(
                f"({spec.axis1.name}={getattr(params, spec.axis1.name):g}, "
                f"{spec.axis2.name}={getattr(params, spec.axis2.name):g}) {msg}"
            )
    return points, rows, warnings


def csv_lines(spec: SweepSpec, points: list[ProtocolParams],
              rows: list[list[float]]) -> list[str]:
    """Format grid output as CSV lines (header first), 17 significant digits."""
    lines = [",".join(header_for(spec))]
    for params, cells in zip(points, rows):
        axis_vals = [getattr(params, spec.axis1.name), getattr(params, spec.axis2.name)]
        lines.append(",".join(format_cell(v) for v in axis_vals + cells))
    return lines


def run_sweep(spec: SweepSpec, threads: int = 1,
              cfg: PrecisionConfig = DEFAULT_PRECISION,
              warn_stream=None) -> tuple[list[str], int]:
    """Execute a sweep; returns (CSV lines including header, failure count)."""
    points, rows, warnings = run_grid(spec, threads, cfg)
    stream = warn_stream if warn_stream is not None else sys.stderr
    for msg in warnings:
        print(f"warning: {msg}", file=stream)
    return csv_lines(spec, points, rows), len(warnings)
