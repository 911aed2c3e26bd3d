"""``fwe`` command line: catalog, sweep, stats, compare, validate, raster.

Exit codes: 0 ok, 2 bad configuration, 3 solver failure, 4 missing sweep
data, 5 validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import report as rep
from . import stats
from .fieldsolver import SolverError
from .lattice import (CatalogError, TraceLayout, builtin_catalog, format_catalog,
                      load_catalog, make_lattice)
from .sweep import (ProfileCache, SweepConfig, SweepError, atomic_write, profile_from_csv,
                    profile_to_csv, run_diff_sweep, run_single_sweep, trace_raster)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_MISSING, EXIT_VALIDATION = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def parse_range(text: str) -> np.ndarray:
    """``min:max:step`` (inclusive of max) or a comma list."""
    try:
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(np.floor((hi - lo) / step + 1e-9)) + 1
            return lo + step * np.arange(n)
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise CliError(f"bad range {text!r}, expected min:max:step", EXIT_CONFIG) from None


# -- configuration helpers ---------------------------------------------------

def _catalog(args):
    try:
        if getattr(args, "builtin", False) or not args.catalog:
            return builtin_catalog()
        return load_catalog(args.catalog)
    except CatalogError as exc:
        raise CliError(f"catalog error: {exc}", EXIT_CONFIG) from exc


def _styles(args, catalog) -> list[str]:
    sel = args.styles
    if sel in (None, "all"):
        return list(catalog)
    names = [s.strip() for s in sel.split(",") if s.strip()]
    missing = [n for n in names if n not in catalog]
    if missing:
        raise CliError(f"unknown styles {missing}; catalog has {list(catalog)}", EXIT_CONFIG)
    return names


def _model(args, entry):
    return make_lattice(entry.style, entry.laminate, x_running_on_top=args.x_running_on_top)


def _layout(args) -> TraceLayout:
    try:
        if args.diff:
            return TraceLayout("differential", args.w, args.s)
        return TraceLayout("single", args.w)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc


def _sweep_cfg(args) -> SweepConfig:
    offsets = parse_range(args.offsets) if args.offsets else None
    kw = {"n_slices": args.slices, "grid": args.grid}
    if offsets is not None:
        kw["offsets"] = tuple(offsets)
    try:
        return SweepConfig(**kw)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc


def _cache_dir(args) -> Path:
    if args.cache:
        return Path(args.cache)
    if os.environ.get("FWE_CACHE_DIR"):
        return Path(os.environ["FWE_CACHE_DIR"])
    return Path(args.out) / ".cache"


def _tag(layout: TraceLayout) -> str:
    if layout.kind == "single":
        return f"single_w{layout.w:g}"
    return f"diff_w{layout.w:g}_s{layout.s:g}"


def profile_path(out, style, layout) -> Path:
    return Path(out) / f"{style}_{_tag(layout)}.csv"


def report_path(out, style, layout, ext="json") -> Path:
    kind = "DDE" if layout.kind == "single" else "DSE"
    return Path(out) / f"{style}_{kind}_{_tag(layout)}.{ext}"


# -- commands ----------------------------------------------------------------

def cmd_catalog(args) -> int:
    cat = _catalog(args)
    print(f"{len(cat)} styles")
    if cat:
        print(f"{'name':>6s} {'x1':>6s} {'x2':>6s} {'x3':>6s} {'y1':>6s} {'y2':>6s} {'y3':>6s}"
              f" {'h':>5s} {'t':>5s} {'eps_g':>6s} {'eps_r':>6s}")
    for name, e in cat.items():
        s, lam = e.style, e.laminate
        print(f"{name:>6s} {s.x1:6g} {s.x2:6g} {s.x3:6g} {s.y1:6g} {s.y2:6g} {s.y3:6g}"
              f" {lam.h:5g} {lam.t:5g} {lam.eps_glass:6g} {lam.eps_resin:6g}")
    if args.write:
        atomic_write(args.write, format_catalog(cat))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cat = _catalog(args)
    layout = _layout(args)
    cfg = _sweep_cfg(args)
    cache = ProfileCache(_cache_dir(args))
    out = Path(args.out)
    for name in _styles(args, cat):
        model = _model(args, cat[name])
        dest = profile_path(out, name, layout)
        t0 = time.perf_counter()
        prof = cache.load(model, layout, cfg)
        if prof is not None:
            print(f"{name}: cache hit")
        else:
            try:
                prof = (run_single_sweep if layout.kind == "single" else run_diff_sweep)(
                    model, layout, cfg)
            except SweepError as exc:
                if exc.partial:
                    _write_partial(dest, layout, exc.partial)
                raise CliError(f"{name}: solver failure at offset {exc.offset}, "
                               f"slice {exc.slice_index}: {exc}", EXIT_SOLVER) from exc
            cache.store(model, layout, cfg, prof)
        atomic_write(dest, profile_to_csv(prof))
        if args.svg:
            from .plots import profile_svg
            atomic_write(dest.with_suffix(".svg"), profile_svg(prof))
        print(f"{name}: {len(prof.offsets)} offsets -> {dest} ({time.perf_counter() - t0:.1f} s)")
    return EXIT_OK


def _write_partial(dest, layout, rows):
    from .sweep import DIFF_HEADER, SINGLE_HEADER
    header = SINGLE_HEADER if layout.kind == "single" else DIFF_HEADER
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row[:len(header)]) for row in rows]
    atomic_write(Path(str(dest) + ".partial"), "\n".join(lines) + "\n")


def _load_profile(args, cat, name, layout, cfg):
    path = profile_path(args.out, name, layout)
    period = cat[name].style.y3
    if path.exists():
        return profile_from_csv(path.read_text(), name, period)
    prof = ProfileCache(_cache_dir(args)).load(_model(args, cat[name]), layout, cfg)
    if prof is None:
        raise CliError(f"no sweep data for {name} ({path}); run `fwe sweep` first", EXIT_MISSING)
    return prof


def _stats_one(args, prof, layout):
    thresholds = parse_range(args.thresholds) if args.thresholds else None
    try:
        return rep.build_report(prof, layout.w, layout.s, n=args.samples, bins=args.bins,
                                seed=args.seed, thresholds=thresholds,
                                kumaraswamy=args.kumaraswamy)
    except ValueError as exc:
        raise CliError(f"{prof.style}: {exc}", EXIT_CONFIG) from exc


def _emit_report(args, report, json_path):
    atomic_write(json_path, rep.report_to_json(report))
    if args.csv:
        atomic_write(json_path.with_name(json_path.stem + "_exceedance.csv"),
                     rep.exceedance_csv(report))
    if args.svg:
        from .plots import exceedance_svg
        atomic_write(json_path.with_suffix(".svg"), exceedance_svg(report))


def cmd_stats(args) -> int:
    layout = _layout(args)
    out = Path(args.out)
    if args.profile:
        path = Path(args.profile)
        if not path.exists():
            raise CliError(f"profile {path} not found", EXIT_MISSING)
        if not args.period:
            raise CliError("--profile needs --period", EXIT_CONFIG)
        prof = profile_from_csv(path.read_text(), path.stem, args.period)
        report = _stats_one(args, prof, layout)
        _emit_report(args, report, out / f"{path.stem}_{report['kind']}.json")
        _print_report(report)
        return EXIT_OK
    cat = _catalog(args)
    cfg = _sweep_cfg(args)
    for name in _styles(args, cat):
        prof = _load_profile(args, cat, name, layout, cfg)
        report = _stats_one(args, prof, layout)
        _emit_report(args, report, report_path(out, name, layout))
        _print_report(report)
    return EXIT_OK


def _print_report(r):
    it = r["integer_thresholds"]
    cells = " ".join(f"{t:g}:{e:.3f}" for t, e in zip(it["thresholds"], it["empirical"]))
    print(f"{r['style']} {r['kind']} dt={r['delta_t_ps_per_in']:.4f} ps/inch  {cells}")


def cmd_compare(args) -> int:
    layout = _layout(args)
    cat = _catalog(args)
    names = _styles(args, cat)
    if len(names) < 2:
        raise CliError("need >= 2 styles to compare", EXIT_CONFIG)
    reports = []
    for name in names:
        path = report_path(args.out, name, layout)
        if not path.exists():
            raise CliError(f"no stats report for {name} ({path}); run `fwe stats` first",
                           EXIT_MISSING)
        reports.append(json.loads(path.read_text()))
    table = rep.compare_reports(reports)
    print(table.format(), end="")
    base = Path(args.out) / f"compare_{table.kind}_{_tag(layout)}"
    atomic_write(base.with_suffix(".json"), json.dumps(table.to_dict(), indent=2) + "\n")
    atomic_write(base.with_suffix(".csv"), table.to_csv())
    if args.svg:
        from .plots import comparison_svg
        atomic_write(base.with_suffix(".svg"), comparison_svg(table))
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_validation
    cases = run_validation()
    failed = [c for c in cases if not c.passed]
    print(f"{len(cases) - len(failed)}/{len(cases)} cases passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_raster(args) -> int:
    if not np.isfinite(args.x):
        raise CliError(f"invalid slice position {args.x}", EXIT_CONFIG)
    cat = _catalog(args)
    layout = _layout(args)
    cfg = _sweep_cfg(args)
    out = Path(args.out)
    for name in _styles(args, cat):
        model = _model(args, cat[name])
        r = trace_raster(model, args.x, args.offset, layout.w, cfg)
        if layout.kind == "differential":
            # second trace, same window
            from .lattice import raster_slice
            r = raster_slice(model, args.x, r.grid)
            h, t = model.laminate.h, model.laminate.t
            for i, c in enumerate(TraceLayout("differential", layout.w, layout.s,
                                              args.offset).trace_centers()):
                r.add_rectangle(f"trace{i}", c - 0.5 * layout.w, c + 0.5 * layout.w, h, h + t)
        text = "\n".join(",".join(f"{v:g}" for v in row) for row in r.eps) + "\n"
        dest = out / f"{name}_raster_x{args.x:g}_o{args.offset:g}.txt"
        atomic_write(dest, text)
        if args.svg:
            from .plots import raster_svg
            atomic_write(dest.with_suffix(".svg"), raster_svg(r))
        print(f"{name}: {r.grid.nz}x{r.grid.ny} cells, values {sorted(set(np.unique(r.eps)))}"
              f" -> {dest}")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------

def _common(p):
    p.add_argument("--catalog", help="INI fabric catalog (default: built-in styles)")
    p.add_argument("--styles", default="all", help="comma list of style names, or 'all'")
    p.add_argument("--out", default="fwe_out", help="output directory")
    p.add_argument("--cache", help="cache directory (default $FWE_CACHE_DIR or <out>/.cache)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="JSON output (always written for stats)")
    p.add_argument("--csv", action="store_true", help="also write CSV tables")
    p.add_argument("--svg", action="store_true", help="also write SVG figures")
    p.add_argument("--x-running-on-top", action="store_true",
                   help="put the x-running bundle layer next to the trace")


def _trace(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--single", action="store_true", help="single-ended trace (default)")
    g.add_argument("--diff", action="store_true", help="differential pair")
    p.add_argument("-w", type=float, default=4.0, help="trace width, mil")
    p.add_argument("-s", type=float, default=4.0, help="pair separation, mil")
    p.add_argument("--offsets", help="min:max:step in mil (default -12:12:1)")
    p.add_argument("--slices", type=int, default=8)
    p.add_argument("--grid", type=float, default=0.25, help="cell size, mil")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fwe", description="Fiber weave delay and skew statistics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list fabric styles")
    _common(p)
    p.add_argument("--builtin", action="store_true", help="show the built-in styles")
    p.add_argument("--write", help="write the catalog to this INI file")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("sweep", help="delay or skew versus offset")
    _common(p)
    _trace(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="densities, DDE/DSE and arcsine fits")
    _common(p)
    _trace(p)
    p.add_argument("--samples", type=int, default=stats.DEFAULT_SAMPLES)
    p.add_argument("--bins", type=int, default=stats.DEFAULT_BINS)
    p.add_argument("--thresholds", help="min:max:step in ps/inch (default 0:ceil(dt):0.25)")
    p.add_argument("--kumaraswamy", action="store_true")
    p.add_argument("--profile", help="profile CSV to analyse instead of sweep output")
    p.add_argument("--period", type=float, help="period of --profile, mil")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("compare", help="side-by-side exceedance table")
    _common(p)
    _trace(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="field solver checks against closed forms")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("raster", help="dump the permittivity of one cross-section")
    _common(p)
    _trace(p)
    p.add_argument("--x", type=float, default=0.0, help="slice position along the trace, mil")
    p.add_argument("--offset", type=float, default=0.0, help="trace (or pair) centre, mil")
    p.set_defaults(func=cmd_raster)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SolverError as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
