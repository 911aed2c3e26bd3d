"""Woven-glass laminate as a periodic, piecewise-constant permittivity field.

Axes: the trace runs along x, the transverse offset is y, z is height above
the ground plane.  All lengths are in mils.

Two glass layers of equal thickness sit back to back, the pair centred in the
laminate.  One layer holds bundles running along x (they repeat along y with
pitch ``y3``), the other bundles running along y (repeat along x with pitch
``x3``).  By default the x-running layer is the lower one, away from the
trace; ``x_running_on_top=True`` swaps them.  Bundles are centred on
multiples of their pitch, so offset 0 is directly over an x-running bundle.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .fieldsolver import DielectricRaster, Grid2D


class CatalogError(ValueError):
    """Malformed or invalid fabric catalog."""


@dataclass(frozen=True)
class FabricStyle:
    name: str
    x1: float
    x2: float
    x3: float
    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        dims = (self.x1, self.x2, self.x3, self.y1, self.y2, self.y3)
        if not all(d > 0 for d in dims):
            raise ValueError(f"style {self.name}: all dimensions must be positive")
        if self.x2 > self.x3 or self.y2 > self.y3:
            raise ValueError(f"style {self.name}: bundle exceeds pitch")
        if self.x1 != self.y1:
            raise ValueError(f"style {self.name}: x1 and y1 must be equal")


@dataclass(frozen=True)
class Laminate:
    h: float = 4.0
    t: float = 0.75
    eps_glass: float = 6.0
    eps_resin: float = 3.5

    def __post_init__(self):
        if not (self.h > 0 and self.t > 0):
            raise ValueError("laminate and trace thickness must be positive")
        if not (self.eps_glass >= self.eps_resin >= 1.0):
            raise ValueError("need eps_glass >= eps_resin >= 1")

    def homogenized(self, eps: float | None = None) -> "Laminate":
        """Copy with glass and resin set to one value (resin by default)."""
        e = self.eps_resin if eps is None else eps
        return replace(self, eps_glass=e, eps_resin=e)


@dataclass(frozen=True)
class TraceLayout:
    kind: str = "single"
    w: float = 4.0
    s: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in ("single", "differential"):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        if not self.w > 0:
            raise ValueError("trace width must be positive")
        if self.kind == "differential" and not self.s > 0:
            raise ValueError("differential pair needs a positive separation")

    @property
    def half_pitch(self) -> float:
        """Distance from the pair midpoint to each trace centre."""
        return 0.5 * (self.w + self.s)

    def trace_centers(self) -> list[float]:
        if self.kind == "single":
            return [self.offset]
        return [self.offset - self.half_pitch, self.offset + self.half_pitch]


@dataclass(frozen=True)
class LatticeModel:
    style: FabricStyle
    laminate: Laminate
    x_running_on_top: bool = False

    @property
    def layer_bounds(self) -> tuple[float, float, float]:
        """z of the lower layer bottom, the layer interface, and the upper layer top."""
        mid = 0.5 * self.laminate.h
        return mid - self.style.x1, mid, mid + self.style.x1

    @property
    def hill_offset(self) -> float:
        return 0.0

    @property
    def valley_offset(self) -> float:
        return 0.5 * self.style.y3

    def describe(self) -> dict:
        return {"style": asdict(self.style), "laminate": asdict(self.laminate),
                "x_running_on_top": self.x_running_on_top}


def make_lattice(style: FabricStyle, laminate: Laminate,
                 x_running_on_top: bool = False) -> LatticeModel:
    if style.x2 > style.x3 or style.y2 > style.y3:
        raise ValueError("bundle exceeds pitch")
    if style.x1 != style.y1:
        raise ValueError("x1 and y1 must be equal")
    if 2.0 * style.x1 > laminate.h:
        raise ValueError("layers exceed laminate height")
    return LatticeModel(style, laminate, x_running_on_top)


def _in_bundle(coord, pitch, width):
    # distance to the nearest bundle centre (multiples of pitch)
    d = np.abs(np.asarray(coord, dtype=float) - pitch * np.round(np.asarray(coord) / pitch))
    return d <= 0.5 * width


def eps_at(model: LatticeModel, x, y, z):
    """Relative permittivity at (x, y, z); broadcasts over array arguments.

    Below the ground plane (z < 0) the resin value is returned; the solver
    never samples there.
    """
    st, lam = model.style, model.laminate
    x, y, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float),
                                  np.asarray(z, float))
    z_lo, z_mid, z_hi = model.layer_bounds
    x_run = _in_bundle(y, st.y3, st.y2)
    y_run = _in_bundle(x, st.x3, st.x2)
    lower_glass, upper_glass = (y_run, x_run) if model.x_running_on_top else (x_run, y_run)
    lower = (z >= z_lo) & (z < z_mid) & lower_glass
    upper = (z >= z_mid) & (z <= z_hi) & upper_glass
    out = np.where(lower | upper, lam.eps_glass, lam.eps_resin)
    out = np.where(z > lam.h, 1.0, out)
    return out[()] if out.ndim == 0 else out


def glass_fraction(model: LatticeModel) -> float:
    """Glass volume fraction of one unit cell (x3 by y3 by h)."""
    st = model.style
    return st.x1 * (st.x2 / st.x3 + st.y2 / st.y3) / model.laminate.h


def raster_slice(model: LatticeModel, x: float, grid: Grid2D) -> DielectricRaster:
    """Sample the permittivity at cell centres of a cross-section at position ``x``.

    No conductors are added.
    """
    if not math.isfinite(x):
        raise ValueError(f"slice position must be finite, got {x}")
    y = grid.y_centers[None, :]
    z = grid.z_centers[:, None]
    return DielectricRaster(grid, eps_at(model, x, y, z))


# -- catalog -----------------------------------------------------------------

BUILTIN_STYLES = (
    FabricStyle("1035", 0.8, 9.0, 14.0, 0.8, 12.0, 14.0),
    FabricStyle("1080", 1.35, 8.0, 17.0, 1.35, 12.0, 22.0),
    FabricStyle("1078", 1.2, 14.0, 16.0, 1.2, 17.0, 18.0),
    FabricStyle("3313", 1.7, 13.0, 16.0, 1.7, 11.0, 16.0),
)

_STYLE_KEYS = ("x1", "x2", "x3", "y1", "y2", "y3")
_LAMINATE_KEYS = ("h", "t", "eps_glass", "eps_resin")


@dataclass(frozen=True)
class CatalogEntry:
    style: FabricStyle
    laminate: Laminate

    def model(self) -> LatticeModel:
        return make_lattice(self.style, self.laminate)


def builtin_catalog() -> dict[str, CatalogEntry]:
    return {s.name: CatalogEntry(s, Laminate()) for s in BUILTIN_STYLES}


def parse_catalog(text: str, source: str = "<catalog>") -> dict[str, CatalogEntry]:
    """Parse an INI catalog: one ``[name]`` section per style.

    Each section needs ``x1 .. y3``; ``h``, ``t``, ``eps_glass`` and
    ``eps_resin`` are optional overrides of the laminate defaults, either per
    section or in ``[DEFAULT]``.
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise CatalogError(str(exc)) from exc
    entries = {}
    defaults = Laminate()
    for name in cp.sections():
        sec = cp[name]
        unknown = set(sec) - set(_STYLE_KEYS) - set(_LAMINATE_KEYS)
        if unknown:
            raise CatalogError(f"style {name}: unknown keys {sorted(unknown)}")
        try:
            missing = [k for k in _STYLE_KEYS if k not in sec]
            if missing:
                raise ValueError(f"missing keys {missing}")
            style = FabricStyle(name, *(sec.getfloat(k) for k in _STYLE_KEYS))
            lam = Laminate(**{k: sec.getfloat(k, getattr(defaults, k)) for k in _LAMINATE_KEYS})
            make_lattice(style, lam)
        except ValueError as exc:
            raise CatalogError(f"style {name}: {exc}") from exc
        entries[name] = CatalogEntry(style, lam)
    return entries


def load_catalog(path) -> dict[str, CatalogEntry]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    return parse_catalog(text, source=str(path))


def format_catalog(entries: dict[str, CatalogEntry]) -> str:
    lines = []
    for name, e in entries.items():
        lines.append(f"[{name}]")
        lines += [f"{k} = {getattr(e.style, k):g}" for k in _STYLE_KEYS]
        lines += [f"{k} = {getattr(e.laminate, k):g}" for k in _LAMINATE_KEYS]
        lines.append("")
    return "\n".join(lines)
