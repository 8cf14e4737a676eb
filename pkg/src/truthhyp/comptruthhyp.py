"""Ground-truth-free comparison of truth discovery methods.

Each method's identified truth is treated as a hypothesis.  Under a
hypothesis, every source gets a precision-style trust, every object a
distribution over its true and false values, and the observed claims a
log-likelihood.  Methods are ranked by that log-likelihood.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .data import ClaimDataset, Mode
from .evaluation import RankingVector, competition_rank
from .exceptions import ConsistencyError, ContractError, ModeError, NumericalError
from .validation import check_dataset, check_output

logger = logging.getLogger(__name__)


@dataclass
class NormalizedTrust:
    """Per-source precision of the claims under one method's hypothesis."""

    method: str
    tp: dict[str, int]
    fp: dict[str, int]

    @property
    def tau(self) -> dict[str, float]:
        return {s: self.tp[s] / (self.tp[s] + self.fp[s]) for s in self.tp if self.tp[s] + self.fp[s] > 0}

    def __getitem__(self, source) -> float:
        return self.tp[source] / (self.tp[source] + self.fp[source])


@dataclass
class ValueDistributions:
    """Pick probabilities of true and false values, keyed by (object, value)."""

    method: str
    true_prob: dict[tuple[str, str], float]
    false_prob: dict[tuple[str, str], float]


@dataclass
class MethodConfidence:
    method: str
    confidence: float
    true_terms: int
    false_terms: int

    def to_dict(self) -> dict:
        return {"confidence": self.confidence, "true_terms": self.true_terms,
                "false_terms": self.false_terms}


# -- source trustworthiness ---------------------------------------------------

def _require_mode(dataset, mode):
    if dataset.mode is not mode:
        raise ModeError(f"expected a {mode.value}-valued dataset, got {dataset.mode.value}")


def _finish_trust(method, tp, fp):
    for s in [s for s in tp if tp[s] + fp[s] == 0]:
        logger.warning("source %s has no claims and is ignored", s)
        del tp[s], fp[s]
    return NormalizedTrust(method, tp, fp)


def normalize_trust_single(dataset: ClaimDataset, output) -> NormalizedTrust:
    """A source's claim on ``o`` is a true positive iff it equals the identified truth."""
    _require_mode(dataset, Mode.SINGLE)
    truth = check_output(dataset, output)
    tp, fp = {}, {}
    for s in dataset.sources:
        tp[s] = fp[s] = 0
        for o in dataset.objects_of(s):
            if dataset.claimed(s, o) == truth[o]:
                tp[s] += 1
            else:
                fp[s] += 1
    return _finish_trust(output.method, tp, fp)


def normalize_trust_multi(dataset: ClaimDataset, output) -> NormalizedTrust:
    """Each claimed value counts on its own: true positive iff in the identified set."""
    _require_mode(dataset, Mode.MULTI)
    truth = check_output(dataset, output)
    tp, fp = {}, {}
    for s in dataset.sources:
        tp[s] = fp[s] = 0
        for o in dataset.objects_of(s):
            for v in dataset.claimed(s, o):
                if v in truth[o]:
                    tp[s] += 1
                else:
                    fp[s] += 1
    return _finish_trust(output.method, tp, fp)


def normalize_trust(dataset, output) -> NormalizedTrust:
    if dataset.mode is Mode.SINGLE:
        return normalize_trust_single(dataset, output)
    return normalize_trust_multi(dataset, output)


# -- value distributions ------------------------------------------------------

def _split_values(dataset, truth, obj):
    true_vals = [v for v in dataset.values(obj) if v in truth[obj]]
    false_vals = [v for v in dataset.values(obj) if v not in truth[obj]]
    return true_vals, false_vals


def false_value_distribution_single(dataset: ClaimDataset, trust: NormalizedTrust, output) -> ValueDistributions:
    """False values are picked in proportion to their claimants' untrustworthiness.

    Only claimed values exist; an object whose false values all come from
    perfectly trusted sources falls back to a uniform distribution.
    """
    _require_mode(dataset, Mode.SINGLE)
    truth = check_output(dataset, output)
    tau = trust.tau
    true_prob, false_prob = {}, {}
    for o in dataset.objects:
        true_vals, false_vals = _split_values(dataset, truth, o)
        for v in true_vals:
            true_prob[(o, v)] = 1.0
        if not false_vals:
            continue
        mass = np.array([sum(1.0 - tau[s] for s in dataset.claimants(o, v)) for v in false_vals])
        total = mass.sum()
        probs = mass / total if total > 0 else np.full(len(false_vals), 1.0 / len(false_vals))
        for v, p in zip(false_vals, probs):
            false_prob[(o, v)] = float(p)
    return ValueDistributions(output.method, true_prob, false_prob)


def build_cooccurrence_matrix(dataset: ClaimDataset, trust: NormalizedTrust, output, obj: str,
                              polarity: bool, beta: float = 0.1):
    """Smoothed column-stochastic co-occurrence matrix of one polarity class.

    Entry ``(a, b)``, ``a != b``, accumulates ``tau_s`` (true class) or
    ``1 - tau_s`` (false class) over sources claiming both values.  Every
    entry, diagonal included, is then mapped to ``beta + (1 - beta) * x``
    and columns are normalized.

    Returns
    -------
    values : list of str
        Row/column labels.  Empty when the class is empty, in which case
        ``matrix`` is ``None``.
    matrix : ndarray or None
    """
    truth = check_output(dataset, output)
    true_vals, false_vals = _split_values(dataset, truth, obj)
    values = true_vals if polarity else false_vals
    if not values:
        return [], None
    tau = trust.tau
    pos = {v: i for i, v in enumerate(values)}
    n = len(values)
    raw = np.zeros((n, n))
    for s in dataset.sources_of(obj):
        members = sorted(pos[v] for v in dataset.claimed(s, obj) if v in pos)
        if len(members) < 2:
            continue
        w = tau[s] if polarity else 1.0 - tau[s]
        for i in members:
            for j in members:
                if i != j:
                    raw[i, j] += w
    smoothed = beta + (1.0 - beta) * raw
    return values, smoothed / smoothed.sum(axis=0, keepdims=True)


def stationary_distribution(matrix, tol: float = 1e-10, max_iter: int = 1_000_000) -> np.ndarray:
    """Fixed point of ``pi = M @ pi`` by power iteration from the uniform vector.

    ``matrix`` must be strictly positive with columns summing to one.
    Iteration stops once the L1 change between successive vectors drops
    below ``tol``.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ContractError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(M > 0):
        raise ContractError("matrix must be strictly positive")
    if np.max(np.abs(M.sum(axis=0) - 1.0)) > 1e-12:
        raise ContractError("matrix columns must sum to 1")
    n = M.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = M @ pi
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    raise NumericalError(f"power iteration did not reach L1 change {tol} in {max_iter} steps")


def value_distributions_multi(dataset: ClaimDataset, trust: NormalizedTrust, output,
                              beta: float = 0.1, tol: float = 1e-10) -> ValueDistributions:
    """Stationary pick probabilities of true and false values per object."""
    _require_mode(dataset, Mode.MULTI)
    true_prob, false_prob = {}, {}
    for o in dataset.objects:
        for polarity, target in ((True, true_prob), (False, false_prob)):
            values, M = build_cooccurrence_matrix(dataset, trust, output, o, polarity, beta)
            if M is None:
                continue
            for v, p in zip(values, stationary_distribution(M, tol)):
                target[(o, v)] = float(p)
    return ValueDistributions(output.method, true_prob, false_prob)


def value_distributions(dataset, trust, output, beta=0.1, tol=1e-10) -> ValueDistributions:
    if dataset.mode is Mode.SINGLE:
        return false_value_distribution_single(dataset, trust, output)
    return value_distributions_multi(dataset, trust, output, beta, tol)


# -- method confidence --------------------------------------------------------

def confidence(dataset: ClaimDataset, output, trust: NormalizedTrust, dists: ValueDistributions,
               clamp: float = 1e-6) -> MethodConfidence:
    """Log-likelihood of all observed claims under the method's hypothesis.

    A claim ``(s, o, v)`` contributes ``ln(tau_s * P_o(v))`` when ``v`` is
    identified true and ``ln((1 - tau_s) * P_o(v))`` otherwise, with
    ``tau_s`` clamped to ``[clamp, 1 - clamp]``.
    """
    truth = check_output(dataset, output)
    tau = {s: min(max(t, clamp), 1.0 - clamp) for s, t in trust.tau.items()}
    total = 0.0
    n_true = n_false = 0
    for s, o, v in dataset.claims:
        if v in truth[o]:
            p = dists.true_prob.get((o, v))
            weight = tau[s]
            n_true += 1
        else:
            p = dists.false_prob.get((o, v))
            weight = 1.0 - tau[s]
            n_false += 1
        if p is None:
            raise ConsistencyError(f"no pick probability for value {v!r} of object {o!r}")
        total += math.log(weight) + math.log(p)
    return MethodConfidence(output.method, total, n_true, n_false)


def rank_by_confidence(confidences) -> RankingVector:
    """Competition ranking by descending confidence (rank 1 = largest)."""
    confidences = list(confidences)
    scores = {c.method: c.confidence for c in confidences}
    return RankingVector(competition_rank(scores), "confidence")


class CompTruthHyp(BaseEstimator):
    """Rank truth discovery outputs by how well they explain the claims.

    Parameters
    ----------
    beta : float
        Smoothing weight mixed into every co-occurrence matrix entry.
    clamp : float
        Source trust is clamped to ``[clamp, 1 - clamp]`` before logs.
    tol : float
        L1 stopping tolerance of the stationary-distribution solver.

    Attributes
    ----------
    trust_ : dict of NormalizedTrust
    distributions_ : dict of ValueDistributions
    confidences_ : dict of MethodConfidence
    ranking_ : RankingVector
    """

    def __init__(self, beta=0.1, clamp=1e-6, tol=1e-10):
        self.beta = beta
        self.clamp = clamp
        self.tol = tol

    def score_output(self, dataset, output) -> tuple[NormalizedTrust, ValueDistributions, MethodConfidence]:
        trust = normalize_trust(dataset, output)
        dists = value_distributions(dataset, trust, output, self.beta, self.tol)
        return trust, dists, confidence(dataset, output, trust, dists, self.clamp)

    def fit(self, X, outputs):
        dataset = check_dataset(X)
        outputs = list(outputs)
        names = [o.method for o in outputs]
        if len(set(names)) != len(names):
            raise ConsistencyError(f"duplicate method names among outputs: {names}")
        self.trust_, self.distributions_, self.confidences_ = {}, {}, {}
        for out in outputs:
            t, d, c = self.score_output(dataset, out)
            self.trust_[out.method] = t
            self.distributions_[out.method] = d
            self.confidences_[out.method] = c
        self.ranking_ = rank_by_confidence(self.confidences_.values())
        return self

    def transform(self, outputs=None) -> dict[str, float]:
        """Confidence per method."""
        check_is_fitted(self, "confidences_")
        return {m: c.confidence for m, c in self.confidences_.items()}

    def predict(self, outputs=None) -> RankingVector:
        check_is_fitted(self, "ranking_")
        return self.ranking_

    def report(self, verbose=False) -> dict:
        """JSON-ready confidence report."""
        check_is_fitted(self, "confidences_")
        methods = {}
        for m, c in self.confidences_.items():
            entry = c.to_dict()
            if verbose:
                t = self.trust_[m]
                entry["source_trust"] = {s: {"tau": t[s], "tp": t.tp[s], "fp": t.fp[s]} for s in sorted(t.tp)}
            methods[m] = entry
        return {
            "params": self.get_params(),
            "methods": methods,
            "ranking": self.ranking_.to_dict(),
        }

