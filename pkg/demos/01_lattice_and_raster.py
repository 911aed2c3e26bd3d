"""
The glass-resin lattice and its cross-sections
==============================================

Build the 1035 lattice, probe it at a few points and dump one solver
cross-section as an SVG heat map.
"""

from pathlib import Path

import numpy as np

from fiberweave import Laminate, builtin_catalog, eps_at, glass_fraction, make_lattice
from fiberweave.plots import raster_svg
from fiberweave.sweep import SweepConfig, trace_raster

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

entry = builtin_catalog()["1035"]
model = make_lattice(entry.style, Laminate())
print(model.describe())

# Glass volume fraction from the closed form
print(f"glass fraction {glass_fraction(model):.3f}")

# Point queries: a glass hill (both bundles) and a resin valley (neither)
z_lo, z_mid, z_hi = model.layer_bounds
for label, x, y in (("hill", 0.0, model.hill_offset), ("valley", 7.0, model.valley_offset)):
    lower = eps_at(model, x, y, 0.5 * (z_lo + z_mid))
    upper = eps_at(model, x, y, 0.5 * (z_mid + z_hi))
    print(f"{label:6s} y={y:5.1f}: lower layer {lower}, upper layer {upper}")

# One cross-section as the solver sees it, with the trace over the hill
r = trace_raster(model, 0.0, 0.0, 4.0, SweepConfig())
print(f"raster {r.grid.nz} x {r.grid.ny} cells, values {np.unique(r.eps)}")
(out / "1035_raster.svg").write_text(raster_svg(r))
