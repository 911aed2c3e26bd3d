"""Stats reports (JSON) and multi-style comparison tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import stats
from .sweep import DelayProfile

# Published exceedance values at 3 ps/inch, shown next to the model's own.
REFERENCE_AT_3PS = {
    "DDE": {"1080": 0.50, "3313": 0.60},
    "DSE": {"1078": 0.44, "1080": 0.66, "3313": 0.76},
}

DEFAULT_COMPARE_THRESHOLDS = tuple(float(t) for t in range(1, 9))

_num_list = {"type": "array", "items": {"type": "number"}}
_prob_list = {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["style", "kind", "trace", "period_mil", "delta_t_ps_per_in", "thresholds",
                 "empirical_exceedance", "arcsine_exceedance", "kumaraswamy", "sample"],
    "properties": {
        "style": {"type": "string"},
        "kind": {"enum": ["DDE", "DSE"]},
        "trace": {"type": "object", "required": ["w", "s"],
                  "properties": {"w": {"type": "number", "exclusiveMinimum": 0},
                                 "s": {"type": "number", "minimum": 0}}},
        "period_mil": {"type": "number", "exclusiveMinimum": 0},
        "delta_t_ps_per_in": {"type": "number", "minimum": 0},
        "thresholds": _num_list,
        "empirical_exceedance": _prob_list,
        "arcsine_exceedance": _prob_list,
        "kumaraswamy": {"oneOf": [
            {"type": "null"},
            {"type": "object", "required": ["a", "b", "ks"],
             "properties": {"a": {"type": "number", "exclusiveMinimum": 0},
                            "b": {"type": "number", "exclusiveMinimum": 0},
                            "ks": {"type": "number", "minimum": 0}}},
        ]},
        "sample": {"type": "object", "required": ["n", "bins", "seed"],
                   "properties": {"n": {"type": "integer", "minimum": 1},
                                  "bins": {"type": "integer", "minimum": 1},
                                  "seed": {"type": ["integer", "null"]}}},
        "integer_thresholds": {"type": "object"},
        "density": {"type": "object"},
    },
}


def _floats(a) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def build_report(profile, w: float, s: float = 0.0, n: int = stats.DEFAULT_SAMPLES,
                 bins: int = stats.DEFAULT_BINS, seed: int | None = 0, thresholds=None,
                 kumaraswamy: bool = False,
                 integer_thresholds=DEFAULT_COMPARE_THRESHOLDS) -> dict:
    """Full DDE (delay profile) or DSE (skew profile) report as a plain dict."""
    kind = "delay" if isinstance(profile, DelayProfile) else "skew"
    label = "DDE" if kind == "delay" else "DSE"
    sp = stats.build_spline(profile)
    model = stats.fit_arcsine(sp, kind)
    sample = stats.deviation_series(sp, kind, n, seed)
    hist = stats.density(sample, bins)
    if thresholds is None:
        thresholds = stats.default_thresholds(model.delta_t)
    curve = stats.exceedance(sample, thresholds, label)
    arc = stats.arcsine_ccdf(model, curve.thresholds)
    ints = np.asarray(integer_thresholds, dtype=float)

    kum = None
    if kumaraswamy and np.ptp(sample.values) > 0 and n >= 100:
        km = stats.fit_kumaraswamy(sample)
        kum = {"a": km.a, "b": km.b, "ks": stats.ks_statistic(sample, km.ccdf)}

    report = {
        "style": profile.style,
        "kind": label,
        "trace": {"w": float(w), "s": float(s)},
        "period_mil": float(sp.period),
        "delta_t_ps_per_in": float(model.delta_t),
        "alpha_rad": float(model.alpha),
        "mean_ps_per_in": float(sp.mean),
        "thresholds": _floats(curve.thresholds),
        "empirical_exceedance": _floats(curve.probability),
        "arcsine_exceedance": _floats(arc),
        "arcsine_ks": stats.ks_statistic(sample, model.ccdf),
        "kumaraswamy": kum,
        "sample": {"n": int(n), "bins": int(bins), "seed": seed},
        "integer_thresholds": {
            "thresholds": _floats(ints),
            "empirical": _floats(stats.exceedance(sample, ints).probability),
            "arcsine": _floats(stats.arcsine_ccdf(model, ints)),
        },
        "density": {"edges": _floats(hist.edges), "density": _floats(hist.density)},
    }
    if kind == "delay":
        vh = stats.value_density(sp, n, bins, seed)
        report["value_density"] = {"edges": _floats(vh.edges), "density": _floats(vh.density),
                                   "u_shaped": stats.is_u_shaped(vh)}
    validate_report(report)
    return report


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)
    p = np.asarray(report["empirical_exceedance"])
    if np.any(np.diff(p) > 0):
        raise jsonschema.ValidationError("empirical exceedance is not non-increasing")
    t = report["thresholds"]
    if t and t[0] == 0.0 and p[0] != 1.0:
        raise jsonschema.ValidationError("exceedance at t=0 must be 1")


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def exceedance_csv(report: dict) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["threshold_ps_per_in", "empirical", "arcsine"])
    for row in zip(report["thresholds"], report["empirical_exceedance"],
                   report["arcsine_exceedance"]):
        wr.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


@dataclass
class ComparisonTable:
    kind: str
    thresholds: list
    rows: list  # dicts: style, delta_t, empirical[], arcsine[], reference_at_3

    def format(self) -> str:
        head = f"{'style':>6s} {'dt':>7s} " + " ".join(f"{f'>={t:g}':>13s}" for t in self.thresholds)
        lines = [f"{self.kind} exceedance, empirical / arcsine", head]
        for r in self.rows:
            cells = " ".join(f"{e:6.3f}/{a:6.3f}" for e, a in zip(r["empirical"], r["arcsine"]))
            lines.append(f"{r['style']:>6s} {r['delta_t']:7.3f} {cells}")
        if 3.0 not in self.thresholds:
            return "\n".join(lines) + "\n"
        lines.append("")
        lines.append("at 3 ps/inch: this model vs reference")
        for r in self.rows:
            ref = r["reference_at_3"]
            ptxt = "   n/a" if ref is None else f"{ref:6.2f}"
            mine = r["at_3"]
            lines.append(f"{r['style']:>6s} {mine:6.3f} {ptxt}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["style", "delta_t_ps_per_in"]
                    + [f"empirical_{t:g}" for t in self.thresholds]
                    + [f"arcsine_{t:g}" for t in self.thresholds])
        for r in self.rows:
            wr.writerow([r["style"], repr(r["delta_t"])] + [repr(v) for v in r["empirical"]]
                        + [repr(v) for v in r["arcsine"]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "thresholds": self.thresholds, "rows": self.rows}

    def smallest_delta_t(self) -> str:
        return min(self.rows, key=lambda r: r["delta_t"])["style"]


def compare_reports(reports: list[dict]) -> ComparisonTable:
    if len(reports) < 2:
        raise ValueError("need >= 2 reports to compare")
    kinds = {r["kind"] for r in reports}
    if len(kinds) != 1:
        raise ValueError(f"cannot mix report kinds {sorted(kinds)}")
    kind = kinds.pop()
    thresholds = reports[0]["integer_thresholds"]["thresholds"]
    rows = []
    for r in reports:
        it = r["integer_thresholds"]
        if it["thresholds"] != thresholds:
            raise ValueError("reports use different integer thresholds")
        model = stats.ArcsineModel(r["delta_t_ps_per_in"])
        sample_at_3 = None
        if 3.0 in thresholds:
            sample_at_3 = it["empirical"][thresholds.index(3.0)]
        rows.append({
            "style": r["style"],
            "delta_t": r["delta_t_ps_per_in"],
            "empirical": it["empirical"],
            "arcsine": _floats(stats.arcsine_ccdf(model, thresholds)),
            "at_3": sample_at_3,
            "reference_at_3": REFERENCE_AT_3PS.get(kind, {}).get(r["style"]),
        })
    return ComparisonTable(kind, list(thresholds), rows)
