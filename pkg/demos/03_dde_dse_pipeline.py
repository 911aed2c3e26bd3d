"""
From delay profile to exceedance probability
============================================

Sweep a 4 mil trace and a 4/4 mil pair across 1080, fit the arcsine law and
compare it with the sampled exceedance.
"""

from pathlib import Path

import numpy as np

from fiberweave import Laminate, TraceLayout, builtin_catalog, make_lattice
from fiberweave.plots import exceedance_svg, profile_svg
from fiberweave.report import build_report
from fiberweave.sweep import run_diff_sweep, run_single_sweep

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

model = make_lattice(builtin_catalog()["1080"].style, Laminate())

# Delay versus offset, -12..12 mil
single = run_single_sweep(model, TraceLayout("single", 4.0))
print("delay, ps/inch:", np.round(single.delay, 3))

# The report fits the arcsine law, samples 100k offsets and tabulates DDE
dde = build_report(single, 4.0, kumaraswamy=True)
print(f"DDE dt = {dde['delta_t_ps_per_in']:.3f} ps/inch, "
      f"KS to arcsine {dde['arcsine_ks']:.4f}, "
      f"Kumaraswamy a={dde['kumaraswamy']['a']:.3f} b={dde['kumaraswamy']['b']:.3f}")
for t, e, a in zip(dde["thresholds"], dde["empirical_exceedance"], dde["arcsine_exceedance"]):
    print(f"  t={t:5.2f}  sampled {e:.3f}  arcsine {a:.3f}")

# Same for the skew of a pair
pair = run_diff_sweep(model, TraceLayout("differential", 4.0, 4.0))
dse = build_report(pair, 4.0, 4.0)
print(f"DSE dt = {dse['delta_t_ps_per_in']:.3f} ps/inch")

(out / "1080_delay.svg").write_text(profile_svg(single, dde))
(out / "1080_DDE.svg").write_text(exceedance_svg(dde))
(out / "1080_DSE.svg").write_text(exceedance_svg(dse))
