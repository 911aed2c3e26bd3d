"""Delay, impedance and skew versus transverse trace offset.

Each offset is handled by cutting one lattice period (along the trace) into
``n_slices`` slices, solving cross-sections with the laminate and in vacuum,
and averaging.  Time of flight adds along the line, so the per-unit length
delay of the period is the plain mean of the slice delays.  A slice that
straddles a bundle edge is split there and its pieces are length-weighted.

Cross-sections repeat a lot: a slice only depends on whether it cuts through
a y-running bundle, and the solve domain moves with the trace so shifts by
whole periods give the same raster.  Solves are therefore cached by the
content of the raster.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import threading
from collections import OrderedDict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .fieldsolver import (SOLVER_VERSION, DielectricRaster, Grid2D, SolverError,
                          capacitance, effective_params, solve_laplace)
from .lattice import LatticeModel, TraceLayout, raster_slice


class SweepError(SolverError):
    """A solve failed during a sweep; carries where it happened and what finished."""

    def __init__(self, message, offset=None, slice_index=None, residual=None, partial=None):
        super().__init__(message, residual=residual)
        self.offset = offset
        self.slice_index = slice_index
        self.partial = partial or []


def default_offsets() -> tuple:
    return tuple(float(o) for o in range(-12, 13))


@dataclass(frozen=True)
class SweepConfig:
    offsets: tuple = field(default_factory=default_offsets)
    n_slices: int = 8
    grid: float = 0.25  # cell size, mil
    margin_periods: float = 3.0
    top_factor: float = 10.0
    tol: float = 1e-8
    max_iter: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        if not self.offsets:
            raise ValueError("offsets must not be empty")
        if self.n_slices < 1:
            raise ValueError("n_slices must be >= 1")
        if not self.grid > 0:
            raise ValueError("grid spacing must be positive")

    def key(self) -> dict:
        return asdict(self)


@dataclass
class DelayProfile:
    style: str
    offsets: np.ndarray
    delay: np.ndarray  # ps/inch
    z0: np.ndarray  # ohm, mean over slices
    period: float
    z0_min: np.ndarray | None = None
    z0_max: np.ndarray | None = None

    kind = "delay"

    @property
    def values(self) -> np.ndarray:
        return self.delay


@dataclass
class SkewProfile:
    style: str
    offsets: np.ndarray
    skew: np.ndarray  # ps/inch, left minus right
    delay_left: np.ndarray
    delay_right: np.ndarray
    period: float

    kind = "skew"

    @property
    def values(self) -> np.ndarray:
        return self.skew


# -- single cross-section solves ---------------------------------------------

class _SolveCache:
    """Bounded map from raster content to extracted capacitance."""

    def __init__(self, maxsize=4096):
        self._data = OrderedDict()
        self._lock = threading.Lock()
        self.maxsize = maxsize
        self.hits = 0
        self.misses = 0

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                return self._data[key]
            self.misses += 1
            return None

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0


solve_cache = _SolveCache()


def _raster_key(raster: DielectricRaster, tol) -> str:
    h = hashlib.sha256()
    g = raster.grid
    h.update(repr((g.ny, g.nz, g.dy, g.dz, tol, SOLVER_VERSION)).encode())
    h.update(np.ascontiguousarray(raster.eps).tobytes())
    for name, mask in raster.conductors.items():
        h.update(name.encode())
        h.update(np.packbits(mask).tobytes())
    return h.hexdigest()


def single_capacitance(raster: DielectricRaster, tol=1e-8, max_iter=None) -> float:
    """Capacitance of the raster's only conductor, cached by raster content."""
    (name,) = raster.conductors
    key = _raster_key(raster, tol)
    c = solve_cache.get(key)
    if c is None:
        sol = solve_laplace(raster, {name: 1.0}, tol, max_iter)
        c = capacitance(sol, raster, name)
        solve_cache.put(key, c)
    return c


def trace_grid(model: LatticeModel, trace_center: float, w: float, cfg: SweepConfig) -> Grid2D:
    """Solve window centred on the trace.

    Side walls sit ``margin_periods`` transverse lattice periods beyond the
    trace edges (rounded up to whole cells), the lid at ``top_factor * h``.
    """
    d = cfg.grid
    half = 0.5 * w + cfg.margin_periods * model.style.y3
    ny_half = int(np.ceil(half / d - 1e-9))
    nz = int(np.ceil(cfg.top_factor * model.laminate.h / d - 1e-9))
    return Grid2D(2 * ny_half, nz, d, d, trace_center - ny_half * d, 0.0)


def slice_positions(model: LatticeModel, n_slices: int) -> np.ndarray:
    return (np.arange(n_slices) + 0.5) * model.style.x3 / n_slices


def slice_pieces(model: LatticeModel, n_slices: int) -> list:
    """Split each slice interval at the y-running bundle edges.

    Returns, per slice, a list of ``(x_mid, weight)`` pieces whose weights sum
    to one.  The cross-section is constant on each piece, so the weighted mean
    is the exact average over the slice.
    """
    x3, half = model.style.x3, 0.5 * model.style.x2
    edges = np.array([half, x3 - half])
    bounds = np.arange(n_slices + 1) * x3 / n_slices
    out = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        cuts = np.concatenate([[a], edges[(edges > a) & (edges < b)], [b]])
        cuts = np.unique(cuts)
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        out.append(list(zip(mids, np.diff(cuts) / (b - a))))
    return out


def trace_raster(model: LatticeModel, x: float, trace_center: float, w: float,
                 cfg: SweepConfig) -> DielectricRaster:
    grid = trace_grid(model, trace_center, w, cfg)
    r = raster_slice(model, x, grid)
    h, t = model.laminate.h, model.laminate.t
    r.add_rectangle("trace", trace_center - 0.5 * w, trace_center + 0.5 * w, h, h + t)
    return r


@dataclass
class OffsetResult:
    delay: float
    z0: float
    z0_min: float
    z0_max: float
    slice_delay: np.ndarray


def solve_offset(model: LatticeModel, trace_center: float, w: float,
                 cfg: SweepConfig) -> OffsetResult:
    delays, z0s = [], []
    c0 = None
    for k, pieces in enumerate(slice_pieces(model, cfg.n_slices)):
        tau = z = 0.0
        for x, weight in pieces:
            r = trace_raster(model, x, trace_center, w, cfg)
            try:
                if c0 is None:
                    c0 = single_capacitance(r.with_eps(1.0), cfg.tol, cfg.max_iter)
                c = single_capacitance(r, cfg.tol, cfg.max_iter)
            except SolverError as exc:
                raise SweepError(f"offset {trace_center:g} mil, slice {k}: {exc}",
                                 offset=trace_center, slice_index=k,
                                 residual=exc.residual) from exc
            p = effective_params(c, c0)
            tau += weight * p.delay
            z += weight * p.z0
        delays.append(tau)
        z0s.append(z)
    z0s = np.array(z0s)
    return OffsetResult(float(np.mean(delays)), float(np.mean(z0s)),
                        float(z0s.min()), float(z0s.max()), np.array(delays))


def delay_at_offset(model: LatticeModel, trace_center: float, cfg: SweepConfig | None = None,
                    w: float = 4.0) -> tuple[float, float]:
    """Period-averaged delay (ps/inch) and impedance (ohm) of one trace."""
    res = solve_offset(model, trace_center, w, cfg or SweepConfig())
    return res.delay, res.z0


def run_single_sweep(model: LatticeModel, layout: TraceLayout,
                     cfg: SweepConfig | None = None) -> DelayProfile:
    if layout.kind != "single":
        raise ValueError("run_single_sweep needs a single-ended layout")
    cfg = cfg or SweepConfig()
    rows = []
    for o in cfg.offsets:
        try:
            res = solve_offset(model, o, layout.w, cfg)
        except SweepError as exc:
            exc.partial = rows
            raise
        rows.append((o, res.delay, res.z0, res.z0_min, res.z0_max))
    a = np.array(rows, dtype=float)
    return DelayProfile(model.style.name, a[:, 0], a[:, 1], a[:, 2], model.style.y3,
                        a[:, 3], a[:, 4])


def run_diff_sweep(model: LatticeModel, layout: TraceLayout,
                   cfg: SweepConfig | None = None) -> SkewProfile:
    """Skew of a pair as the difference of two isolated single-trace delays."""
    if layout.kind != "differential":
        raise ValueError("run_diff_sweep needs a differential layout")
    cfg = cfg or SweepConfig()
    half = layout.half_pitch
    rows = []
    for o in cfg.offsets:
        try:
            left = solve_offset(model, o - half, layout.w, cfg).delay
            right = solve_offset(model, o + half, layout.w, cfg).delay
        except SweepError as exc:
            exc.partial = rows
            raise
        rows.append((o, left - right, left, right))
    a = np.array(rows, dtype=float)
    return SkewProfile(model.style.name, a[:, 0], a[:, 1], a[:, 2], a[:, 3], model.style.y3)


# -- files -------------------------------------------------------------------

SINGLE_HEADER = ("offset_mil", "delay_ps_per_in", "z0_ohm")
DIFF_HEADER = ("offset_mil", "skew_ps_per_in", "delay_left", "delay_right")


def _fmt(v: float) -> str:
    return repr(float(v))


def profile_to_csv(profile) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    if isinstance(profile, DelayProfile):
        wr.writerow(SINGLE_HEADER)
        for row in zip(profile.offsets, profile.delay, profile.z0):
            wr.writerow([_fmt(v) for v in row])
    else:
        wr.writerow(DIFF_HEADER)
        for row in zip(profile.offsets, profile.skew, profile.delay_left, profile.delay_right):
            wr.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def profile_from_csv(text: str, style: str, period: float):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError("empty profile file")
    header = tuple(rows[0])
    data = np.array(rows[1:], dtype=float).reshape(-1, len(header))
    if header == SINGLE_HEADER:
        return DelayProfile(style, data[:, 0], data[:, 1], data[:, 2], period)
    if header == DIFF_HEADER:
        return SkewProfile(style, data[:, 0], data[:, 1], data[:, 2], data[:, 3], period)
    raise ValueError(f"unrecognised profile header {header}")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def cache_key(model: LatticeModel, layout: TraceLayout, cfg: SweepConfig) -> str:
    lay = asdict(layout)
    lay.pop("offset")
    return "-".join([_digest(model.describe()), _digest(lay),
                     _digest({"cfg": cfg.key(), "solver": SOLVER_VERSION})])


class ProfileCache:
    """On-disk sweep cache, one file per (model, layout, config) hash."""

    def __init__(self, root):
        self.root = Path(root)

    def path(self, model, layout, cfg) -> Path:
        return self.root / f"{cache_key(model, layout, cfg)}.csv"

    def load(self, model, layout, cfg):
        p = self.path(model, layout, cfg)
        if not p.exists():
            return None
        return profile_from_csv(p.read_text(), model.style.name, model.style.y3)

    def store(self, model, layout, cfg, profile) -> Path:
        p = self.path(model, layout, cfg)
        meta = {"style": model.style.name, "model": model.describe(),
                "layout": asdict(layout), "config": cfg.key(), "solver": SOLVER_VERSION}
        header = "# " + json.dumps(meta, sort_keys=True) + "\n"
        atomic_write(p, header + profile_to_csv(profile))
        return p
