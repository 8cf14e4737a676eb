"""JSON and TSV report writers.

JSON is written with sorted keys and a trailing newline so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .evaluation import MetricReport, RankingVector, rank_by_metric, ranking_distance
from .exceptions import ConfigError, ConsistencyError
from .methods.base import method_sort_key


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConsistencyError(f"{path}: not valid JSON ({exc})") from exc


def coverage_label(coverage: float) -> str:
    return f"{coverage * 100:g}%"


def load_evaluation(report: dict) -> dict[float, list[MetricReport]]:
    try:
        raw = report["reports"]
    except KeyError as exc:
        raise ConsistencyError("evaluation report has no 'reports' section") from exc
    return {float(c): [MetricReport.from_dict(r) for r in rows] for c, rows in raw.items()}


def build_rank_report(evaluation: dict, confidence: dict, metric: str = "precision",
                      baseline_coverage: float = 1.0) -> dict:
    """Rank vectors per criterion and their distance to the baseline ranking.

    The baseline is the ``metric`` ranking at ``baseline_coverage``.
    """
    by_cov = load_evaluation(evaluation)
    match = [c for c in by_cov if abs(c - baseline_coverage) < 1e-12]
    if not match:
        have = ", ".join(f"{c:g}" for c in sorted(by_cov))
        raise ConfigError(f"baseline coverage {baseline_coverage:g} not in evaluation report ({have})")
    baseline = rank_by_metric(by_cov[match[0]], metric)
    try:
        conf_rank = RankingVector.from_dict(confidence["ranking"])
    except KeyError as exc:
        raise ConsistencyError("confidence report has no 'ranking' section") from exc

    rankings = {}
    for cov in sorted(by_cov):
        rv = rank_by_metric(by_cov[cov], metric)
        dist, cos = ranking_distance(rv, baseline)
        rankings[f"{cov:g}"] = {**rv.to_dict(), "dist": dist, "cos": cos}
    dist, cos = ranking_distance(conf_rank, baseline)
    return {
        "metric": metric,
        "baseline": {"coverage": match[0], **baseline.to_dict()},
        "coverage_rankings": rankings,
        "confidence_ranking": {**conf_rank.to_dict(), "dist": dist, "cos": cos},
    }


def table_tsv(evaluation: dict, confidence: dict | None = None, metric: str = "precision",
              baseline_coverage: float = 1.0) -> str:
    """Methods by coverage levels, with a C_m column and Dist./Cos. rows.

    The Dist. and Cos. rows compare each column's ranking (the C_m column's
    included) with the baseline ranking.
    """
    by_cov = load_evaluation(evaluation)
    coverages = sorted(by_cov)
    methods = sorted({r.method for rows in by_cov.values() for r in rows}, key=method_sort_key)
    cell = {(r.method, c): r.metric(metric) for c in coverages for r in by_cov[c]}
    conf = confidence["methods"] if confidence else None
    header = ["method"] + [f"{metric[0].upper()}({coverage_label(c)})" for c in coverages]
    if conf is not None:
        header.append("C_m")

    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(header)
    for m in methods:
        row = [m] + [f"{cell[(m, c)]:.3f}" if (m, c) in cell else "" for c in coverages]
        if conf is not None:
            row.append(f"{conf[m]['confidence']:.3f}" if m in conf else "")
        w.writerow(row)
    if any(abs(c - baseline_coverage) < 1e-12 for c in coverages):
        ranks = build_rank_report(evaluation, confidence or _empty_confidence(methods),
                                  metric, baseline_coverage)
        cols = [ranks["coverage_rankings"][f"{c:g}"] for c in coverages]
        if conf is not None:
            cols.append(ranks["confidence_ranking"])
        w.writerow(["Dist."] + [f"{c['dist']:.3f}" for c in cols])
        w.writerow(["Cos."] + [f"{c['cos']:.3f}" for c in cols])
    return buf.getvalue()


def _empty_confidence(methods):
    return {"ranking": {"criterion": "", "ranks": {m: 1 for m in methods}}}
