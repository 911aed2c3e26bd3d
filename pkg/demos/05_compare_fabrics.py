"""
Comparing fabric styles
=======================

Skew of a 4/4 mil differential pair on the four built-in styles, side by side
at integer thresholds, with published 3 ps/inch values where available.
"""

from pathlib import Path

from fiberweave import TraceLayout, builtin_catalog
from fiberweave.plots import comparison_svg
from fiberweave.report import build_report, compare_reports
from fiberweave.sweep import run_diff_sweep

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

pair = TraceLayout("differential", 4.0, 4.0)
reports = []
for name, entry in builtin_catalog().items():
    prof = run_diff_sweep(entry.model(), pair)
    reports.append(build_report(prof, pair.w, pair.s))

table = compare_reports(reports)
print(table.format())
print("smallest skew dt:", table.smallest_delta_t())
(out / "compare_DSE.svg").write_text(comparison_svg(table))
