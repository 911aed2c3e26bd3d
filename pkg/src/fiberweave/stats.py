"""Delay/skew statistics: deviation samples, densities, exceedance curves.

Offsets are taken as uniformly distributed over one lattice period.  The
exceedance P(T >= t) of the delay deviation (DDE) or the skew magnitude
(DSE) is the measure of interest; the arcsine law gives a one-parameter
closed form for it, and a Kumaraswamy fit gives a two-parameter one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize

DEFAULT_SAMPLES = 100_000
DEFAULT_BINS = 20


@dataclass
class InterpolatedProfile:
    """Periodic cubic spline of a delay or skew profile over one period."""

    profile: object
    spline: CubicSpline
    period: float
    mean: float
    knots: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return self.spline(np.mod(x, self.period))

    def derivative(self, x, nu=1):
        return self.spline(np.mod(x, self.period), nu)


@dataclass
class DeviationSample:
    values: np.ndarray
    n: int
    seed: int | None
    kind: str = "delay"


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])


@dataclass
class ExceedanceCurve:
    thresholds: np.ndarray
    probability: np.ndarray
    kind: str = "DDE"

    def at(self, t: float) -> float:
        i = int(np.searchsorted(self.thresholds, t))
        if i == len(self.thresholds) or not np.isclose(self.thresholds[i], t):
            raise KeyError(f"threshold {t} not on the curve")
        return float(self.probability[i])


@dataclass
class ArcsineModel:
    delta_t: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.delta_t < 0:
            raise ValueError("delta_t must be non-negative")

    def ccdf(self, t):
        return arcsine_ccdf(self, t)

    def pdf(self, t):
        return arcsine_pdf(self, t)


@dataclass
class KumaraswamyModel:
    a: float
    b: float
    delta_t: float
    iterations: int = field(default=0, compare=False)

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Kumaraswamy shapes must be positive")

    def ccdf(self, t):
        x = np.clip(np.asarray(t, dtype=float) / self.delta_t, 0.0, 1.0)
        return (1.0 - x ** self.a) ** self.b


# -- interpolation -----------------------------------------------------------

def _fold(offsets, values, period):
    """Fold offsets into [0, period) and average samples that land together."""
    step = np.min(np.diff(np.unique(offsets))) if len(offsets) > 1 else period
    folded = np.mod(offsets, period)
    # snap to the sampling lattice so float noise does not split duplicates
    key = np.round(folded / step * 1e6).astype(np.int64)
    key[key == int(round(period / step * 1e6))] = 0
    uniq, inv = np.unique(key, return_inverse=True)
    sums = np.bincount(inv, weights=values)
    cnt = np.bincount(inv)
    return uniq / 1e6 * step, sums / cnt, step


def build_spline(profile, period: float | None = None) -> InterpolatedProfile:
    """Periodic cubic spline through the profile folded onto one period."""
    period = float(profile.period if period is None else period)
    offsets = np.asarray(profile.offsets, dtype=float)
    values = np.asarray(profile.values, dtype=float)
    if len(offsets) < 4:
        raise ValueError("need at least 4 knots")
    if np.ptp(offsets) + np.min(np.diff(np.sort(offsets))) < period - 1e-9:
        raise ValueError("profile does not span a full period")
    x, y, step = _fold(offsets, values, period)
    n_per = period / step
    if abs(n_per - round(n_per)) > 1e-6 or len(x) != round(n_per):
        raise ValueError("offsets do not cover the period on a uniform grid")
    if len(x) < 4:
        raise ValueError("need at least 4 knots per period")
    xs = np.append(x, period)
    ys = np.append(y, y[0])
    cs = CubicSpline(xs, ys, bc_type="periodic")
    mean = float(cs.integrate(0.0, period) / period)
    return InterpolatedProfile(profile, cs, period, mean, x, y)


def _extrema(sp: InterpolatedProfile, n_dense: int = 4000):
    """Locations and values of the spline's max and min over one period."""
    xs = np.linspace(0.0, sp.period, n_dense, endpoint=False)
    roots = sp.spline.derivative().roots(extrapolate=False)
    roots = roots[np.isfinite(roots)]
    cand = np.concatenate([xs, np.mod(roots, sp.period)])
    vals = sp(cand)
    i, j = int(np.argmax(vals)), int(np.argmin(vals))
    return cand[i], float(vals[i]), cand[j], float(vals[j])


# -- sampling ----------------------------------------------------------------

def deviation_series(sp: InterpolatedProfile, kind: str = "delay", n: int = DEFAULT_SAMPLES,
                     seed: int | None = 0) -> DeviationSample:
    """Deviation magnitudes at ``n`` offsets drawn uniformly over one period.

    Delay: ``|tau(x) - mean(tau)|``.  Skew: ``|skew(x)|``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind not in ("delay", "skew"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, sp.period, n)
    v = sp(x)
    vals = np.abs(v - sp.mean) if kind == "delay" else np.abs(v)
    return DeviationSample(vals, n, seed, kind)


def density(sample: DeviationSample, bins: int = DEFAULT_BINS) -> Histogram:
    """Uniform-bin density over [0, max]."""
    v = np.asarray(sample.values)
    if v.size == 0:
        raise ValueError("empty sample")
    if v.size < bins:
        raise ValueError("fewer samples than bins")
    hi = float(v.max())
    if hi <= 0.0:
        hi = 1e-12  # all values zero; keep a non-degenerate first bin
    counts, edges = np.histogram(v, bins=bins, range=(0.0, hi))
    dens = counts / (v.size * np.diff(edges))
    return Histogram(edges, counts, dens)


def value_density(sp: InterpolatedProfile, n: int = DEFAULT_SAMPLES, bins: int = DEFAULT_BINS,
                  seed: int | None = 0) -> Histogram:
    """Density of the profile value itself (not its deviation) over [min, max].

    Uses the same offset draws as ``deviation_series`` for a given seed.
    """
    rng = np.random.default_rng(seed)
    v = sp(rng.uniform(0.0, sp.period, n))
    lo, hi = float(v.min()), float(v.max())
    if hi - lo <= 0.0:
        hi = lo + 1e-12
    counts, edges = np.histogram(v, bins=bins, range=(lo, hi))
    return Histogram(edges, counts, counts / (v.size * np.diff(edges)))


def is_u_shaped(hist: Histogram) -> bool:
    """True when both end bins hold more than any interior bin."""
    c = np.asarray(hist.counts)
    if c.size < 3:
        return False
    return bool(min(c[0], c[-1]) > c[1:-1].max())


def exceedance(sample: DeviationSample, thresholds, kind: str = "DDE") -> ExceedanceCurve:
    """Empirical P(T >= t) at each threshold."""
    t = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(t) < 0) or np.any(t < 0):
        raise ValueError("thresholds must be ascending and non-negative")
    s = np.sort(sample.values)
    p = (s.size - np.searchsorted(s, t, side="left")) / s.size
    return ExceedanceCurve(t, p, kind)


def default_thresholds(delta_t: float, step: float = 0.25) -> np.ndarray:
    top = max(np.ceil(delta_t), step)
    return np.arange(0.0, top + 0.5 * step, step)


# -- arcsine law -------------------------------------------------------------

def arcsine_pdf(model: ArcsineModel, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t >= model.delta_t):
        raise ValueError("arcsine density defined for 0 <= t < delta_t only")
    d = model.delta_t
    out = 2.0 / (np.pi * d * np.sqrt(1.0 - (t / d) ** 2))
    return out[()] if out.ndim == 0 else out


def arcsine_ccdf(model: ArcsineModel, t):
    """P(T >= t) = 1 - (2/pi) arcsin(t / delta_t); zero past delta_t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("threshold must be non-negative")
    d = model.delta_t
    if d == 0:
        out = np.where(t > 0, 0.0, 1.0)
    else:
        out = 1.0 - 2.0 / np.pi * np.arcsin(np.minimum(t / d, 1.0))
    return out[()] if out.ndim == 0 else out


def fit_arcsine(sp: InterpolatedProfile, kind: str = "delay") -> ArcsineModel:
    """Amplitude from the spline extremes.

    Delay: half the peak-to-peak swing.  Skew: largest magnitude.  The phase
    is where the profile peaks, as a fraction of the period in radians.
    """
    xmax, vmax, xmin, vmin = _extrema(sp)
    if kind == "delay":
        dt = 0.5 * (vmax - vmin)
        peak = xmax
    elif kind == "skew":
        if abs(vmin) > abs(vmax):
            dt, peak = -vmin, xmin
        else:
            dt, peak = vmax, xmax
    else:
        raise ValueError(f"unknown kind {kind!r}")
    alpha = float(np.mod(np.pi / 2 - 2 * np.pi * peak / sp.period, 2 * np.pi))
    return ArcsineModel(max(float(dt), 0.0), alpha)


def two_point_delta_t(delay_hill: float, delay_valley: float) -> float:
    """Worst-case deviation from one trace over a glass hill and one over a resin valley."""
    return 0.5 * abs(delay_hill - delay_valley)


# -- Kumaraswamy -------------------------------------------------------------

def _empirical_ccdf_grid(values, grid):
    s = np.sort(values)
    return (s.size - np.searchsorted(s, grid, side="left")) / s.size


def fit_kumaraswamy(sample: DeviationSample, n_grid: int = 101) -> KumaraswamyModel:
    """Least-squares fit of (1 - x^a)^b to the empirical CCDF on [0, 1].

    A log-spaced grid search over a, b in [0.1, 10] seeds a bounded
    Nelder-Mead polish that stops when the parameter step drops below 1e-4.
    """
    v = np.asarray(sample.values, dtype=float)
    if v.size < 100:
        raise ValueError("need at least 100 samples")
    if np.ptp(v) == 0.0:
        raise ValueError("degenerate sample")
    dt = float(v.max())
    x = np.linspace(0.0, 1.0, n_grid)
    target = _empirical_ccdf_grid(v / dt, x)

    def sse(p):
        a, b = p
        return float(np.sum(((1.0 - x ** a) ** b - target) ** 2))

    grid = np.logspace(-1, 1, 41)
    A, B = np.meshgrid(grid, grid, indexing="ij")
    model = (1.0 - x[None, None, :] ** A[..., None]) ** B[..., None]
    err = np.sum((model - target) ** 2, axis=-1)
    i, j = np.unravel_index(np.argmin(err), err.shape)
    res = minimize(sse, x0=[A[i, j], B[i, j]], method="Nelder-Mead",
                   bounds=[(1e-3, 100.0), (1e-3, 100.0)],
                   options={"xatol": 1e-4, "fatol": 1e-14, "maxiter": 4000})
    return KumaraswamyModel(float(res.x[0]), float(res.x[1]), dt, int(res.nit))


# -- goodness of fit ---------------------------------------------------------

def ks_statistic(sample: DeviationSample, model_ccdf) -> float:
    """Largest gap between the empirical CCDF and ``model_ccdf``.

    Both sides are compared at each distinct sample value and just above it,
    which covers the jump of the empirical step function.
    """
    s = np.sort(np.asarray(sample.values, dtype=float))
    u = np.unique(s)
    at = (s.size - np.searchsorted(s, u, side="left")) / s.size
    above = (s.size - np.searchsorted(s, u, side="right")) / s.size
    u_up = np.nextafter(u, np.inf)
    d1 = np.abs(np.asarray(model_ccdf(u), dtype=float) - at)
    d2 = np.abs(np.asarray(model_ccdf(u_up), dtype=float) - above)
    return float(max(d1.max(), d2.max()))


def ccdf_distance(ccdf_a, ccdf_b, upper: float, n: int = 20001) -> float:
    """Sup distance between two CCDFs on a dense grid over [0, upper]."""
    t = np.linspace(0.0, upper, n)
    return float(np.max(np.abs(np.asarray(ccdf_a(t)) - np.asarray(ccdf_b(t)))))
