"""Quasi-static 2D electrostatic solver for transmission-line cross-sections.

The cross-section is a uniform grid of rectangular cells.  Each cell carries
a relative permittivity, and conductors are sets of cells held at a fixed
potential.  Potentials live at cell centres (finite volume form of
div(eps grad phi) = 0); the flux through a shared face uses the harmonic mean
of the two cell permittivities.  The ground plane is the bottom edge of the
grid, the other three edges are zero-flux walls.

Geometry is in mils.  Capacitances come out per metre because the
face conductances are ratios of lengths and so are unit free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.sparse as sp
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0

#: One inch of free-space propagation, in picoseconds (~84.7253 ps).
PS_PER_INCH_VACUUM = 0.0254 / C_LIGHT * 1e12

SOLVER_VERSION = "fd5-harmonic-amgcg-1"


class SolverError(RuntimeError):
    """Raised when a solve cannot be set up or does not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Grid2D:
    """Uniform cell grid; y is transverse, z is height above ground."""

    ny: int
    nz: int
    dy: float
    dz: float
    y0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if self.ny < 8 or self.nz < 8:
            raise ValueError(f"grid needs at least 8 cells per axis, got {self.ny}x{self.nz}")
        if not (self.dy > 0 and self.dz > 0):
            raise ValueError("grid spacing must be positive")

    @property
    def y_centers(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def z_centers(self) -> np.ndarray:
        return self.z0 + (np.arange(self.nz) + 0.5) * self.dz

    @property
    def width(self) -> float:
        return self.ny * self.dy

    @property
    def height(self) -> float:
        return self.nz * self.dz

    def refined(self, factor: int = 2) -> "Grid2D":
        return Grid2D(self.ny * factor, self.nz * factor, self.dy / factor,
                      self.dz / factor, self.y0, self.z0)


@dataclass
class DielectricRaster:
    """Per-cell relative permittivity, shape ``(nz, ny)``, plus conductor masks."""

    grid: Grid2D
    eps: np.ndarray
    conductors: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eps = np.asarray(self.eps, dtype=float)
        if self.eps.shape != (self.grid.nz, self.grid.ny):
            raise ValueError(f"eps shape {self.eps.shape} does not match grid "
                             f"({self.grid.nz}, {self.grid.ny})")
        if np.any(self.eps < 1.0) or not np.all(np.isfinite(self.eps)):
            raise ValueError("relative permittivity must be finite and >= 1")

    def add_conductor(self, name: str, mask: np.ndarray) -> None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.eps.shape:
            raise ValueError("conductor mask shape mismatch")
        if not mask.any():
            raise ValueError(f"conductor {name!r} covers no cells")
        for other, m in self.conductors.items():
            if np.any(m & mask):
                raise ValueError(f"conductor {name!r} overlaps {other!r}")
        self.conductors[name] = mask

    def add_rectangle(self, name: str, y_lo: float, y_hi: float,
                      z_lo: float, z_hi: float) -> None:
        """Add a conductor made of every cell whose centre lies in the box."""
        yc = self.grid.y_centers
        zc = self.grid.z_centers
        mask = ((zc[:, None] > z_lo) & (zc[:, None] < z_hi)
                & (yc[None, :] > y_lo) & (yc[None, :] < y_hi))
        self.add_conductor(name, mask)

    def with_eps(self, eps) -> "DielectricRaster":
        """Same grid and conductors, different dielectric (e.g. vacuum)."""
        eps = np.broadcast_to(np.asarray(eps, dtype=float), self.eps.shape).copy()
        return DielectricRaster(self.grid, eps, dict(self.conductors))

    def conductor_labels(self) -> np.ndarray:
        """Integer map: -1 for dielectric, otherwise index into ``conductors``."""
        labels = np.full(self.eps.shape, -1, dtype=np.int64)
        for i, mask in enumerate(self.conductors.values()):
            labels[mask] = i
        return labels


@dataclass
class FieldSolution:
    potential: np.ndarray
    residual: float
    iterations: int
    excitation: dict


@dataclass(frozen=True)
class LineParams:
    c: float
    c0: float
    eps_eff: float
    delay: float  # ps/inch
    z0: float  # ohm


def _face_conductances(raster: DielectricRaster):
    """Unit-free conductances of every interior face and of the ground faces.

    Conductor cells behave as infinite permittivity, so a face between metal
    and dielectric only sees the dielectric half cell.
    """
    g = raster.grid
    eps = raster.eps
    metal = raster.conductor_labels() >= 0

    def series(e1, e2, m1, m2, ratio):
        # ratio = face length / centre distance
        out = np.where(m1 & m2, 0.0, 2.0 * e1 * e2 / (e1 + e2))
        out = np.where(m1 & ~m2, 2.0 * e2, out)
        out = np.where(~m1 & m2, 2.0 * e1, out)
        return out * ratio

    gy = series(eps[:, :-1], eps[:, 1:], metal[:, :-1], metal[:, 1:], g.dz / g.dy)
    gz = series(eps[:-1, :], eps[1:, :], metal[:-1, :], metal[1:, :], g.dy / g.dz)
    # bottom cell centre sits dz/2 above the ground plane
    gb = 2.0 * eps[0, :] * g.dy / g.dz
    return gy, gz, gb


def _check_topology(raster: DielectricRaster) -> None:
    labels = raster.conductor_labels()
    if np.any(labels[0, :] >= 0):
        raise SolverError("conductor touches the ground plane")
    for a, b in ((labels[:, :-1], labels[:, 1:]), (labels[:-1, :], labels[1:, :])):
        if np.any((a >= 0) & (b >= 0) & (a != b)):
            raise SolverError("two different conductors share a face")


def _fixed_potential(raster: DielectricRaster, excitation: dict) -> np.ndarray:
    phi = np.zeros(raster.eps.shape)
    for name in excitation:
        if name not in raster.conductors:
            raise SolverError(f"unknown conductor {name!r}")
    for name, mask in raster.conductors.items():
        phi[mask] = float(excitation.get(name, 0.0))
    return phi


def solve_laplace(raster: DielectricRaster, excitation: dict, tol: float = 1e-8,
                  max_iter: int | None = None) -> FieldSolution:
    """Solve for the cell-centre potential with conductors at fixed voltages.

    The linear system is symmetric positive definite once conductor cells are
    eliminated; it is solved with conjugate gradients preconditioned by
    smoothed-aggregation AMG.  ``tol`` is the relative residual
    ``||b - A x|| / ||b||``.
    """
    if not raster.conductors:
        raise SolverError("no conductors in raster")
    if not (0.0 < tol <= 1e-3):
        raise ValueError("tol must lie in (0, 1e-3]")
    _check_topology(raster)
    g = raster.grid
    if max_iter is None:
        max_iter = 200 * max(g.ny, g.nz)

    phi = _fixed_potential(raster, excitation)
    metal = (raster.conductor_labels() >= 0).ravel()
    free = ~metal
    nfree = int(free.sum())
    index = np.full(metal.size, -1, dtype=np.int64)
    index[free] = np.arange(nfree)

    gy, gz, gb = _face_conductances(raster)
    cell = np.arange(metal.size).reshape(raster.eps.shape)
    pairs = [
        (cell[:, :-1].ravel(), cell[:, 1:].ravel(), gy.ravel()),
        (cell[:-1, :].ravel(), cell[1:, :].ravel(), gz.ravel()),
    ]
    diag = np.zeros(metal.size)
    diag[cell[0, :]] += gb
    rows, cols, vals = [], [], []
    rhs = np.zeros(metal.size)
    flat_phi = phi.ravel()
    for a, b, w in pairs:
        np.add.at(diag, a, w)
        np.add.at(diag, b, w)
        both = free[a] & free[b]
        rows += [index[a[both]], index[b[both]]]
        cols += [index[b[both]], index[a[both]]]
        vals += [-w[both], -w[both]]
        # Dirichlet neighbours move to the right-hand side
        fa = free[a] & metal[b]
        np.add.at(rhs, a[fa], w[fa] * flat_phi[b[fa]])
        fb = free[b] & metal[a]
        np.add.at(rhs, b[fb], w[fb] * flat_phi[a[fb]])

    rows.append(np.arange(nfree))
    cols.append(np.arange(nfree))
    vals.append(diag[free])
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nfree, nfree))
    b = rhs[free]

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return FieldSolution(phi, 0.0, 0, dict(excitation))

    # pyamg draws its spectral-radius start vector from the global RNG;
    # pin it so repeated solves are bit-identical, then restore the caller's state
    rng_state = np.random.get_state()
    try:
        np.random.seed(0x5eed)
        ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric", max_coarse=500)
        residuals: list = []
        x = ml.solve(b, tol=tol, accel="cg", maxiter=max_iter, residuals=residuals)
    finally:
        np.random.set_state(rng_state)
    resid = float(np.linalg.norm(b - A @ x) / bnorm)
    if resid > tol:
        raise SolverError(f"no convergence after {len(residuals) - 1} iterations, "
                          f"relative residual {resid:.3e}", residual=resid)
    flat_phi = flat_phi.copy()
    flat_phi[free] = x
    return FieldSolution(flat_phi.reshape(phi.shape), resid, len(residuals) - 1,
                         dict(excitation))


def field_energy(solution: FieldSolution, raster: DielectricRaster) -> float:
    """Electrostatic energy per unit length, J/m, from the discrete field."""
    phi = solution.potential
    if phi.shape != raster.eps.shape:
        raise SolverError("solution does not match raster")
    gy, gz, gb = _face_conductances(raster)
    s = (np.sum(gy * np.diff(phi, axis=1) ** 2)
         + np.sum(gz * np.diff(phi, axis=0) ** 2)
         + np.sum(gb * phi[0, :] ** 2))
    return 0.5 * EPS0 * s


def conductor_charge(solution: FieldSolution, raster: DielectricRaster, conductor: str) -> float:
    """Charge per unit length, C/m, from the flux leaving the conductor's cells."""
    phi = solution.potential
    if phi.shape != raster.eps.shape:
        raise SolverError("solution does not match raster")
    mask = raster.conductors[conductor]
    gy, gz, _ = _face_conductances(raster)
    q = 0.0
    # faces between columns j and j+1
    d = phi[:, :-1] - phi[:, 1:]
    q += np.sum((gy * d)[mask[:, :-1] & ~mask[:, 1:]])
    q -= np.sum((gy * d)[~mask[:, :-1] & mask[:, 1:]])
    d = phi[:-1, :] - phi[1:, :]
    q += np.sum((gz * d)[mask[:-1, :] & ~mask[1:, :]])
    q -= np.sum((gz * d)[~mask[:-1, :] & mask[1:, :]])
    return EPS0 * q


def capacitance(solution: FieldSolution, raster: DielectricRaster, conductor: str) -> float:
    """Self capacitance per unit length by the energy method, ``C = 2 W / V^2``.

    The solution must have ``conductor`` at 1 V and every other conductor at 0 V.
    """
    v = float(solution.excitation.get(conductor, 0.0))
    others = [k for k, val in solution.excitation.items() if k != conductor and val != 0.0]
    if v == 0.0 or others:
        raise SolverError("capacitance needs the conductor driven alone")
    return 2.0 * field_energy(solution, raster) / v ** 2


def capacitance_matrix(raster: DielectricRaster, tol: float = 1e-8,
                       max_iter: int | None = None) -> np.ndarray:
    """2x2 Maxwell capacitance matrix, F/m.

    Diagonal terms use the energy method, off-diagonal terms the induced
    charge on the undriven conductor.
    """
    names = list(raster.conductors)
    if len(names) != 2:
        raise SolverError(f"capacitance matrix needs exactly 2 conductors, got {len(names)}")
    cm = np.zeros((2, 2))
    for j, drive in enumerate(names):
        sol = solve_laplace(raster, {n: float(n == drive) for n in names}, tol, max_iter)
        cm[j, j] = capacitance(sol, raster, drive)
        i = 1 - j
        cm[i, j] = conductor_charge(sol, raster, names[i])
    return cm


def effective_params(c: float, c0: float) -> LineParams:
    """Line parameters from loaded and vacuum capacitance per unit length."""
    if not (c0 > 0):
        raise ValueError("vacuum capacitance must be positive")
    if c < c0 * (1.0 - 1e-9):
        raise SolverError(f"loaded capacitance {c:.6e} below vacuum value {c0:.6e}")
    eps_eff = max(c / c0, 1.0)
    return LineParams(
        c=c,
        c0=c0,
        eps_eff=eps_eff,
        delay=np.sqrt(eps_eff) * PS_PER_INCH_VACUUM,
        z0=1.0 / (C_LIGHT * np.sqrt(c * c0)),
    )
