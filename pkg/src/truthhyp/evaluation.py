"""Ground-truth metrics and ranking comparison.

Each object is scored over the universe of its claimed values plus its
true values.  A value is a positive decision when the method identifies
it and a negative decision otherwise, so in single-valued data a correct
identification yields one true positive and ``|V_o| - 1`` true negatives.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import ClaimDataset, Mode, TruthAssignment
from .exceptions import ConsistencyError, ModeError
from .generator import subsample_truth
from .methods.base import method_sort_key
from .validation import check_fraction, check_positive_int, check_rng

METRICS = ("precision", "recall", "f1", "accuracy", "specificity", "average")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError(f"negative confusion count in {self}")

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _object_counts(identified: frozenset, true: frozenset, claimed) -> ConfusionCounts:
    universe = set(claimed) | true
    tp = len(identified & true)
    fp = len(identified - true)
    fn = len(true - identified)
    return ConfusionCounts(tp, fp, len(universe) - len(identified | true), fn)


def _confusion(output, truth: TruthAssignment, dataset: ClaimDataset, mode: Mode) -> ConfusionCounts:
    if dataset.mode is not mode or Mode(output.mode) is not mode:
        raise ModeError(f"expected {mode.value}-valued dataset and output")
    truth.validate(dataset)
    identified = output.identified_truth
    counts = ConfusionCounts()
    for obj in truth:
        if obj not in identified:
            raise ConsistencyError(f"output of {output.method!r} has no truth for object {obj!r}")
        counts = counts + _object_counts(identified[obj], truth[obj], dataset.values(obj))
    return counts


def confusion_single(output, truth: TruthAssignment, dataset: ClaimDataset) -> ConfusionCounts:
    """Counts over the objects of ``truth``; a wrong pick costs one FP and one FN."""
    return _confusion(output, truth, dataset, Mode.SINGLE)


def confusion_multi(output, truth: TruthAssignment, dataset: ClaimDataset) -> ConfusionCounts:
    """Counts over the objects of ``truth``, each value judged on its own."""
    return _confusion(output, truth, dataset, Mode.MULTI)


def confusion(output, truth, dataset) -> ConfusionCounts:
    if dataset.mode is Mode.SINGLE:
        return confusion_single(output, truth, dataset)
    return confusion_multi(output, truth, dataset)


@dataclass(frozen=True)
class MetricReport:
    """The five ratio metrics plus their overall average.

    ``degenerate`` names the metrics whose denominator was zero; those
    are reported as 0.
    """

    method: str
    coverage: float
    precision: float
    recall: float
    f1: float
    accuracy: float
    specificity: float
    average: float
    degenerate: tuple[str, ...] = ()
    counts: ConfusionCounts | None = None
    reps: int = 1

    def metric(self, name: str) -> float:
        if name not in METRICS:
            raise ValueError(f"unknown metric {name!r}; expected one of {', '.join(METRICS)}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["degenerate"] = list(self.degenerate)
        if self.counts is None:
            del d["counts"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> MetricReport:
        try:
            counts = ConfusionCounts(**d["counts"]) if d.get("counts") else None
            return cls(d["method"], float(d["coverage"]),
                       *(float(d[m]) for m in METRICS),
                       degenerate=tuple(d.get("degenerate", ())), counts=counts,
                       reps=int(d.get("reps", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConsistencyError(f"malformed metric report: {exc}") from exc


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(counts: ConfusionCounts, method: str = "", coverage: float = 1.0) -> MetricReport:
    c = counts
    flags: list[str] = []
    precision = _ratio(c.tp, c.tp + c.fp, "precision", flags)
    recall = _ratio(c.tp, c.tp + c.fn, "recall", flags)
    # same as the harmonic mean, and bit-equal to precision whenever FP == FN
    f1 = _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, "f1", flags)
    accuracy = _ratio(c.tp + c.tn, c.total, "accuracy", flags)
    specificity = _ratio(c.tn, c.fp + c.tn, "specificity", flags)
    average = (precision + recall + accuracy + specificity) / 4
    return MetricReport(method, coverage, precision, recall, f1, accuracy, specificity,
                        average, tuple(flags), counts)


def evaluate(output, truth, dataset, coverage: float = 1.0) -> MetricReport:
    return metrics(confusion(output, truth, dataset), output.method, coverage)


def average_reports(reports: list[MetricReport]) -> MetricReport:
    """Mean of each metric over repeated evaluations of one method."""
    first = reports[0]
    if any(r.method != first.method for r in reports):
        raise ConsistencyError("cannot average reports of different methods")
    mean = {m: float(np.mean([r.metric(m) for r in reports])) for m in METRICS}
    flags = sorted({f for r in reports for f in r.degenerate})
    return MetricReport(first.method, first.coverage, degenerate=tuple(flags),
                        reps=len(reports), **mean)


# -- rankings -----------------------------------------------------------------

def _tied(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def competition_rank(scores: dict[str, float], tol: float = 1e-12) -> dict[str, int]:
    """Rank 1 for the largest score; tied scores share the smallest rank.

    Scores within ``tol`` (relative to their magnitude when it exceeds 1)
    count as tied.  Each score is compared with the first member of the
    current tie group, so ties never chain.
    """
    order = sorted(scores, key=lambda m: (-scores[m], method_sort_key(m)))
    ranks = {}
    leader = None
    for pos, m in enumerate(order):
        if leader is None or not _tied(scores[leader], scores[m], tol):
            leader = m
        ranks[m] = ranks.get(leader, pos + 1)
    return ranks


@dataclass(frozen=True)
class RankingVector:
    ranks: dict[str, int]
    criterion: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ranks", dict(sorted(self.ranks.items(),
                                                      key=lambda kv: method_sort_key(kv[0]))))

    @property
    def methods(self) -> list[str]:
        return list(self.ranks)

    def vector(self, methods=None) -> np.ndarray:
        methods = self.methods if methods is None else methods
        return np.array([self.ranks[m] for m in methods], dtype=float)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "ranks": dict(self.ranks)}

    @classmethod
    def from_dict(cls, data: dict) -> RankingVector:
        return cls({str(k): int(v) for k, v in data["ranks"].items()}, data.get("criterion", ""))


def rank_by_metric(reports: list[MetricReport], metric: str = "precision",
                   tol: float = 1e-12) -> RankingVector:
    scores = {}
    for r in reports:
        if r.method in scores:
            raise ConsistencyError(f"two reports for method {r.method!r}")
        scores[r.method] = r.metric(metric)
    label = metric if not reports else f"{metric}@{reports[0].coverage:g}"
    return RankingVector(competition_rank(scores, tol), label)


def ranking_distance(a: RankingVector, b: RankingVector) -> tuple[float, float]:
    """Euclidean distance and cosine similarity of two rank vectors.

    Both vectors are laid out in canonical method order, so the result is
    independent of how either ranking was constructed.
    """
    if set(a.ranks) != set(b.ranks):
        only_a = sorted(set(a.ranks) - set(b.ranks))
        only_b = sorted(set(b.ranks) - set(a.ranks))
        raise ConsistencyError(f"rankings cover different methods: {only_a} vs {only_b}")
    methods = a.methods
    x, y = a.vector(methods), b.vector(methods)
    dist = math.sqrt(float(np.sum((x - y) ** 2)))
    cos = float(x @ y) / (float(np.linalg.norm(x)) * float(np.linalg.norm(y)))
    return dist, cos


# -- coverage experiments -----------------------------------------------------

@dataclass
class SweepResult:
    """Reports indexed by coverage, each a list in canonical method order."""

    coverages: list[float]
    reports: dict[float, list[MetricReport]] = field(default_factory=dict)
    seed: int | None = None
    reps: int = 1

    def ranking(self, coverage: float, metric: str = "precision") -> RankingVector:
        return rank_by_metric(self.reports[coverage], metric)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "reps": self.reps,
            "coverages": self.coverages,
            "reports": {f"{c:g}": [r.to_dict() for r in self.reports[c]] for c in self.coverages},
        }


def coverage_sweep(outputs, complete_truth: TruthAssignment, coverages, seed=0,
                   dataset: ClaimDataset | None = None, reps: int = 1) -> SweepResult:
    """Evaluate every output against seeded partial truths.

    For each coverage level, ``reps`` subsamples are drawn from one
    generator in (coverage, repetition) order; all methods are scored on
    the same subsample and their metrics averaged over repetitions.
    """
    outputs = sorted(outputs, key=lambda o: method_sort_key(o.method))
    if dataset is None:
        raise ConsistencyError("coverage_sweep needs the claims dataset to size |V_o|")
    reps = check_positive_int(reps, "reps")
    coverages = [check_fraction(c) for c in coverages]
    rng = check_rng(seed)
    result = SweepResult(coverages, seed=seed if isinstance(seed, int) else None, reps=reps)
    for cov in coverages:
        per_rep = []
        for _ in range(reps):
            truth = subsample_truth(complete_truth, cov, rng)
            per_rep.append([evaluate(o, truth, dataset, cov) for o in outputs])
        if reps == 1:
            result.reports[cov] = per_rep[0]
        else:
            result.reports[cov] = [average_reports([rep[i] for rep in per_rep])
                                   for i in range(len(outputs))]
    return result


def parse_coverages(text: str) -> list[float]:
    """Parse a coverage list such as ``"0.01..0.1,0.2..1.0"`` or ``"0.1..0.5:0.2"``.

    A range ``a..b`` without an explicit step advances by the power of ten
    of ``a`` (``0.01..0.1`` gives 0.01, 0.02, ..., 0.1).
    """
    out: list[float] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." not in part:
            out.append(float(part))
            continue
        span, _, step_text = part.partition(":")
        lo_text, hi_text = span.split("..", 1)
        lo, hi = float(lo_text), float(hi_text)
        if not 0 < lo <= hi:
            raise ValueError(f"bad coverage range {part!r}")
        step = float(step_text) if step_text else 10.0 ** math.floor(math.log10(lo))
        if step <= 0:
            raise ValueError(f"bad coverage step in {part!r}")
        n = int(math.floor((hi - lo) / step + 1e-9))
        out.extend(round(lo + k * step, 12) for k in range(n + 1))
    seen = []
    for c in out:
        check_fraction(c)
        if c not in seen:
            seen.append(c)
    return seen
