"""Seeded synthetic single-valued claim corpora with complete ground truth.

Scale is set by the number of sources, objects and candidate values per
object.  Character is set by three distributions: how many objects each
source covers, how often each source tells the truth, and which false
values liars pick.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pathlib import Path

import numpy as np

from .data import ClaimDataset, Mode, TruthAssignment, write_claims, write_truth
from .exceptions import ConfigError
from .validation import check_fraction, check_positive_int, check_rng


class _CodedEnum(str, Enum):
    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        for member in cls:
            if key.lower() in (member.value.lower(), member.name.lower()):
                return member
        valid = ", ".join(m.value for m in cls)
        raise ConfigError(f"unknown {cls.__name__} {value!r}; expected one of {valid}")


class CoverageDist(_CodedEnum):
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"


class ConfusionDist(_CodedEnum):
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"


class GTDist(_CodedEnum):
    """Per-source true-claim rate profiles."""

    U25 = "U25"
    U75 = "U75"
    EIGHTY_PESSIMISTIC = "80P"
    EIGHTY_OPTIMISTIC = "80O"
    FULL_PESSIMISTIC = "FP"
    FULL_OPTIMISTIC = "FO"
    RANDOM = "R"
    EXPONENTIAL = "Exp"


# (rate of the first floor(80%) sources, rate of the remaining sources)
_GROUP_RATES = {
    GTDist.EIGHTY_PESSIMISTIC: (0.2, 0.8),
    GTDist.EIGHTY_OPTIMISTIC: (0.8, 0.2),
    GTDist.FULL_PESSIMISTIC: (0.0, 1.0),
    GTDist.FULL_OPTIMISTIC: (1.0, 0.0),
}


@dataclass(frozen=True)
class GeneratorConfig:
    num_sources: int = 50
    num_objects: int = 1000
    values_per_object: int = 20
    coverage_dist: CoverageDist = CoverageDist.EXPONENTIAL
    coverage_p: float = 0.1
    gt_dist: GTDist = GTDist.EIGHTY_PESSIMISTIC
    confusion_dist: ConfusionDist = ConfusionDist.EXPONENTIAL
    seed: int = 0
    # fraction of objects covered by the least-covered source (exponential coverage)
    coverage_floor: float = 0.01
    # pick-probability of the k-th false value is proportional to exp(-confusion_decay * k)
    confusion_decay: float = 0.5
    # steepness of the exponential true-rate profile
    gt_decay: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "coverage_dist", CoverageDist.parse(self.coverage_dist))
        object.__setattr__(self, "confusion_dist", ConfusionDist.parse(self.confusion_dist))
        object.__setattr__(self, "gt_dist", GTDist.parse(self.gt_dist))
        check_positive_int(self.num_sources, "num_sources")
        check_positive_int(self.num_objects, "num_objects")
        check_positive_int(self.values_per_object, "values_per_object", minimum=2)
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) \
                or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        check_fraction(self.coverage_p, "coverage_p")
        check_fraction(self.coverage_floor, "coverage_floor")
        if not self.confusion_decay >= 0 or not self.gt_decay > 0:
            raise ConfigError("confusion_decay must be >= 0 and gt_decay > 0")

    @classmethod
    def from_dict(cls, data: dict) -> GeneratorConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown generator fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("coverage_dist", "confusion_dist", "gt_dist"):
            d[key] = d[key].value
        return d

    def replace(self, **changes) -> GeneratorConfig:
        return GeneratorConfig.from_dict({**self.to_dict(), **changes})


@dataclass
class GeneratedCorpus:
    dataset: ClaimDataset
    complete_truth: TruthAssignment
    per_source_true_rate: dict[str, float]
    target_true_rate: dict[str, float]
    config: GeneratorConfig
    candidate_values: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    def manifest(self) -> dict:
        n_true = sum(1 for s, o, v in self.dataset.claims if v in self.complete_truth[o])
        return {
            "config": self.config.to_dict(),
            "seed": self.config.seed,
            "stats": self.dataset.stats(),
            "realized_true_rate": n_true / self.dataset.n_claims,
            "per_source_true_rate": self.per_source_true_rate,
            "target_true_rate": self.target_true_rate,
        }


def assign_true_rates(gt_dist, num_sources: int, rng=None, decay: float = 3.0) -> list[float]:
    """Per-source probability of claiming the true value, in source order.

    Two-group profiles put ``floor(0.8 * num_sources)`` sources in the first
    group and the rest in the second.  The exponential profile has one
    always-true source, one always-false source, and the others decaying
    exponentially within [0.01, 0.99].
    """
    gt_dist = GTDist.parse(gt_dist)
    n = check_positive_int(num_sources, "num_sources")
    if gt_dist is GTDist.U25:
        return [0.25] * n
    if gt_dist is GTDist.U75:
        return [0.75] * n
    if gt_dist in _GROUP_RATES:
        first, second = _GROUP_RATES[gt_dist]
        k = math.floor(0.8 * n)
        return [first] * k + [second] * (n - k)
    rng = check_rng(rng)
    if gt_dist is GTDist.RANDOM:
        return [float(x) for x in rng.uniform(0.0, 1.0, size=n)]
    # exponential
    if n == 1:
        return [1.0]
    middle = n - 2
    if middle == 0:
        inner = []
    elif middle == 1:
        inner = [0.5]
    else:
        profile = np.exp(-decay * np.arange(middle) / (middle - 1))
        lo, hi = profile.min(), profile.max()
        inner = list(0.01 + 0.98 * (profile - lo) / (hi - lo))
    return [1.0] + [float(x) for x in inner] + [0.0]


def _coverage_counts(config: GeneratorConfig) -> list[int]:
    n_s, n_o = config.num_sources, config.num_objects
    if config.coverage_dist is CoverageDist.UNIFORM:
        return [max(1, int(math.floor(config.coverage_p * n_o + 0.5)))] * n_s
    if n_s == 1:
        return [n_o]
    lam = math.log(1.0 / config.coverage_floor) * n_s / (n_s - 1)
    return [max(1, int(math.floor(n_o * math.exp(-lam * i / n_s) + 0.5))) for i in range(n_s)]


def _confusion_cdf(config: GeneratorConfig) -> np.ndarray:
    k = config.values_per_object - 1
    if config.confusion_dist is ConfusionDist.UNIFORM:
        weights = np.ones(k)
    else:
        weights = np.exp(-config.confusion_decay * np.arange(k))
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0
    return cdf


def _ids(prefix, n):
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def generate(config: GeneratorConfig, max_coverage_attempts: int = 1000) -> GeneratedCorpus:
    """Draw one corpus; a pure function of ``config`` (including its seed)."""
    rng = np.random.default_rng(config.seed)
    n_s, n_o, n_v = config.num_sources, config.num_objects, config.values_per_object

    # quality is independent of coverage: shuffle the profile over sources
    rates = [float(r) for r in rng.permutation(
        assign_true_rates(config.gt_dist, n_s, rng, decay=config.gt_decay))]
    sources = _ids("s", n_s)
    objects = _ids("o", n_o)
    values = _ids("v", n_v)

    true_idx = rng.integers(n_v, size=n_o)
    # per-object random order of the false values; position k has confusion weight k
    false_order = np.empty((n_o, n_v - 1), dtype=np.int64)
    for i in range(n_o):
        pool = np.delete(np.arange(n_v), true_idx[i])
        false_order[i] = rng.permutation(pool)

    counts = _coverage_counts(config)
    for _ in range(max_coverage_attempts):
        covered = [np.sort(rng.choice(n_o, size=k, replace=False)) for k in counts]
        if np.unique(np.concatenate(covered)).size == n_o:
            break
    else:
        raise ConfigError(
            f"could not cover all {n_o} objects in {max_coverage_attempts} draws; raise coverage_p")

    cdf = _confusion_cdf(config)
    claims = []
    realized = {}
    for s, rate, objs in zip(sources, rates, covered):
        says_true = rng.random(objs.size) < rate
        picks = np.searchsorted(cdf, rng.random(objs.size), side="right")
        picks = np.minimum(picks, n_v - 2)
        chosen = np.where(says_true, true_idx[objs], false_order[objs, picks])
        claims.extend((s, objects[o], values[v]) for o, v in zip(objs, chosen))
        realized[s] = float(says_true.mean())

    dataset = ClaimDataset(claims, Mode.SINGLE)
    truth = TruthAssignment({objects[i]: values[true_idx[i]] for i in range(n_o)})
    return GeneratedCorpus(
        dataset=dataset,
        complete_truth=truth,
        per_source_true_rate=realized,
        target_true_rate=dict(zip(sources, rates)),
        config=config,
        candidate_values={o: tuple(values) for o in objects},
    )


def subsample_truth(complete: TruthAssignment, coverage: float, rng=None) -> TruthAssignment:
    """Truth for ``ceil(coverage * |O|)`` objects drawn without replacement."""
    coverage = check_fraction(coverage)
    rng = check_rng(rng)
    objects = list(complete)
    # guard against 0.07 * 100 == 7.000000000000001
    k = max(1, math.ceil(round(coverage * len(objects), 9)))
    if k >= len(objects):
        return TruthAssignment(complete)
    picked = rng.choice(len(objects), size=k, replace=False)
    return complete.restrict(objects[i] for i in sorted(picked))


def write_corpus(corpus: GeneratedCorpus, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "claims": write_claims(corpus.dataset, out / "claims.csv"),
        "truth": write_truth(corpus.complete_truth, out / "truth.csv"),
        "manifest": out / "manifest.json",
    }
    paths["manifest"].write_text(json.dumps(corpus.manifest(), indent=2, sort_keys=True) + "\n",
                                 encoding="utf-8")
    return paths
