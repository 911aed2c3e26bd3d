"""Static SVG figures: profiles, densities, exceedance bars, raster heatmaps.

Output is byte-stable: the SVG date stamp is dropped and element ids are
salted with a constant.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import stats  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "fiberweave"
matplotlib.rcParams["svg.fonttype"] = "none"

STAR = dict(marker="*", color="tab:blue", linestyle="none", markersize=8)
LINE = dict(color="saddlebrown", linewidth=1.5)


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def profile_svg(profile, report: dict | None = None) -> str:
    """Values vs offset (stars) with the spline (line); density on the right."""
    sp = stats.build_spline(profile)
    ncols = 2 if report else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5 * ncols, 3.6), squeeze=False)
    ax = axes[0, 0]
    x = np.linspace(profile.offsets.min(), profile.offsets.max(), 600)
    ax.plot(x, sp(x), **LINE)
    ax.plot(profile.offsets, profile.values, **STAR)
    ax.set_xlabel("offset, mil")
    ax.set_ylabel(("delay" if profile.kind == "delay" else "skew") + ", ps/inch")
    ax.set_title(f"{profile.style}")
    ax.grid(True, alpha=0.3)
    if report:
        ax = axes[0, 1]
        dens = report.get("value_density") or report["density"]
        e = np.asarray(dens["edges"])
        ax.bar(e[:-1], dens["density"], width=np.diff(e), align="edge",
               color="tab:blue", edgecolor="white")
        ax.set_xlabel("ps/inch")
        ax.set_ylabel("probability density")
    fig.tight_layout()
    return _svg(fig)


def exceedance_svg(report: dict) -> str:
    """Deviation density (left) and empirical vs arcsine exceedance bars (right)."""
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 3.6))
    e = np.asarray(report["density"]["edges"])
    a1.bar(e[:-1], report["density"]["density"], width=np.diff(e), align="edge",
           color="tab:blue", edgecolor="white")
    a1.set_xlabel("deviation, ps/inch")
    a1.set_ylabel("probability density")
    it = report["integer_thresholds"]
    t = np.asarray(it["thresholds"])
    a2.bar(t - 0.2, it["empirical"], width=0.4, color="tab:blue", label="numerical")
    a2.bar(t + 0.2, it["arcsine"], width=0.4, color="saddlebrown", label="arcsine")
    a2.set_xlabel("threshold, ps/inch")
    a2.set_ylabel(f"{report['kind']}")
    a2.set_ylim(0, 1)
    a2.legend()
    fig.suptitle(f"{report['style']} {report['kind']}")
    fig.tight_layout()
    return _svg(fig)


def comparison_svg(table) -> str:
    """Grouped bars, one group per threshold, one bar per style."""
    fig, ax = plt.subplots(figsize=(8, 3.8))
    t = np.asarray(table.thresholds)
    k = len(table.rows)
    width = 0.8 / k
    for i, row in enumerate(table.rows):
        ax.bar(t - 0.4 + (i + 0.5) * width, row["empirical"], width=width, label=row["style"])
    ax.set_xlabel("threshold, ps/inch")
    ax.set_ylabel(table.kind)
    ax.set_ylim(0, 1)
    ax.legend(title="style")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return _svg(fig)


def raster_svg(raster) -> str:
    g = raster.grid
    fig, ax = plt.subplots(figsize=(8, 3))
    extent = (g.y0, g.y0 + g.width, g.z0, g.z0 + g.height)
    im = ax.imshow(raster.eps, origin="lower", extent=extent, aspect="auto",
                   cmap="viridis", interpolation="nearest")
    for mask in raster.conductors.values():
        ax.contour(g.y_centers, g.z_centers, mask.astype(float), levels=[0.5], colors="red")
    ax.set_xlabel("y, mil")
    ax.set_ylabel("z, mil")
    fig.colorbar(im, ax=ax, label="relative permittivity")
    fig.tight_layout()
    return _svg(fig)
