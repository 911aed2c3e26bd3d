"""Closed-form checks for the field solver.

The microstrip reference is Hammerstad and Jensen (1980), including their
strip-thickness correction.  Parallel plates have an exact answer.  Grid
convergence compares a production-grid delay with the same solve on a grid
twice as fine.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import physical_constants

from .fieldsolver import (DielectricRaster, Grid2D, capacitance, effective_params,
                          solve_laplace)

ETA0 = physical_constants["characteristic impedance of vacuum"][0]


def _z01(u):
    f = 6.0 + (2.0 * np.pi - 6.0) * np.exp(-(30.666 / u) ** 0.7528)
    return ETA0 / (2.0 * np.pi) * np.log(f / u + np.sqrt(1.0 + 4.0 / u ** 2))


def _eps_eff0(u, er):
    a = (1.0 + np.log((u ** 4 + (u / 52.0) ** 2) / (u ** 4 + 0.432)) / 49.0
         + np.log(1.0 + (u / 18.1) ** 3) / 18.7)
    b = 0.564 * ((er - 0.9) / (er + 3.0)) ** 0.053
    return 0.5 * (er + 1.0) + 0.5 * (er - 1.0) * (1.0 + 10.0 / u) ** (-a * b)


def hammerstad_jensen(u: float, er: float, t_over_h: float = 0.0) -> tuple[float, float]:
    """Microstrip (eps_eff, z0) for width ratio ``u = w/h`` and strip thickness ``t/h``."""
    if t_over_h <= 0.0:
        e = _eps_eff0(u, er)
        return float(e), float(_z01(u) / np.sqrt(e))
    th = t_over_h
    du1 = th / np.pi * np.log(1.0 + 4.0 * np.e / (th / np.tanh(np.sqrt(6.517 * u)) ** 2))
    dur = 0.5 * (1.0 + 1.0 / np.cosh(np.sqrt(er - 1.0))) * du1
    u1, ur = u + du1, u + dur
    e_r = _eps_eff0(ur, er)
    eps_eff = e_r * (_z01(u1) / _z01(ur)) ** 2
    return float(eps_eff), float(_z01(ur) / np.sqrt(e_r))


def microstrip_raster(w: float, h: float, er: float, t: float, d: float,
                      side: float = 15.0, top: float = 10.0) -> DielectricRaster:
    """Uniform-substrate microstrip; walls ``side*h`` past each edge, lid at ``top*h``."""
    half = 0.5 * w + side * h
    ny = 2 * int(np.ceil(half / d - 1e-9))
    nz = int(np.ceil(top * h / d - 1e-9))
    g = Grid2D(ny, nz, d, d, -0.5 * ny * d, 0.0)
    eps = np.where(g.z_centers[:, None] < h, er, 1.0) * np.ones((1, ny))
    r = DielectricRaster(g, eps)
    r.add_rectangle("strip", -0.5 * w, 0.5 * w, h, h + t)
    return r


def microstrip_line(w, h, er, t, d, tol=1e-8):
    r = microstrip_raster(w, h, er, t, d)
    c = capacitance(solve_laplace(r, {"strip": 1.0}, tol), r, "strip")
    r0 = r.with_eps(1.0)
    c0 = capacitance(solve_laplace(r0, {"strip": 1.0}, tol), r0, "strip")
    return effective_params(c, c0)


def parallel_plate(b: float, h: float, er: float, d: float, t: float | None = None):
    """Capacitance of a full-width plate at height ``h`` over ground, and the exact value."""
    t = d if t is None else t
    ny = int(round(b / d))
    nz = int(round((h + t) / d)) + 4
    g = Grid2D(ny, nz, d, d, 0.0, 0.0)
    r = DielectricRaster(g, np.full((nz, ny), float(er)))
    r.add_rectangle("plate", -1.0, b + 1.0, h, h + t)
    sol = solve_laplace(r, {"plate": 1.0})
    # b, h in the same length unit; per-unit-length value is b/h times eps
    return capacitance(sol, r, "plate"), EPS0 * er * b / h


@dataclass
class ValidationCase:
    name: str
    value: float
    reference: float
    tolerance: float  # relative

    @property
    def error(self) -> float:
        return abs(self.value / self.reference - 1.0)

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag}  {self.name:<38s} value={self.value:.6g} ref={self.reference:.6g} "
                f"err={100 * self.error:.3f}% tol={100 * self.tolerance:.2f}%")


MICROSTRIP_CASES = [(u, er) for u in (0.5, 1.0, 2.0) for er in (2.2, 4.0, 6.0)]


def microstrip_cases(h: float = 1.0, cells_per_h: int = 16) -> list[ValidationCase]:
    d = h / cells_per_h
    t = d
    out = []
    for u, er in MICROSTRIP_CASES:
        p = microstrip_line(u * h, h, er, t, d)
        e_ref, z_ref = hammerstad_jensen(u, er, t / h)
        out.append(ValidationCase(f"microstrip w/h={u:g} er={er:g} eps_eff", p.eps_eff, e_ref, 0.03))
        out.append(ValidationCase(f"microstrip w/h={u:g} er={er:g} z0", p.z0, z_ref, 0.05))
    return out


def parallel_plate_cases() -> list[ValidationCase]:
    out = []
    for er in (1.0, 4.0):
        c, ref = parallel_plate(b=20.0, h=4.0, er=er, d=0.25)
        out.append(ValidationCase(f"parallel plate er={er:g}", c, ref, 0.005))
    return out


def grid_convergence_case(style: str = "1035", w: float = 4.0, offset: float = 0.0) -> ValidationCase:
    from .lattice import builtin_catalog
    from .sweep import SweepConfig, delay_at_offset

    model = builtin_catalog()[style].model()
    coarse = SweepConfig()
    fine = SweepConfig(grid=coarse.grid / 2)
    d1, _ = delay_at_offset(model, offset, coarse, w)
    d2, _ = delay_at_offset(model, offset, fine, w)
    return ValidationCase(f"grid halving {style} w={w:g} delay", d1, d2, 0.005)


def run_validation(log=print) -> list[ValidationCase]:
    cases = []
    for label, fn in (("parallel plate", parallel_plate_cases),
                      ("Hammerstad-Jensen microstrip", microstrip_cases),
                      ("grid convergence", lambda: [grid_convergence_case()])):
        t0 = time.perf_counter()
        batch = fn()
        for c in batch:
            log(c.line())
        log(f"      {label}: {time.perf_counter() - t0:.1f} s")
        cases += batch
    return cases
