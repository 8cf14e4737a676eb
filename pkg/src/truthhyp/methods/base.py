"""Shared machinery for the truth discovery estimators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..data import ClaimDataset, Mode, TruthAssignment, explode_truths, to_joint_view
from ..exceptions import ConfigError, ConsistencyError, NumericalError
from ..validation import check_dataset


class MethodId(str, Enum):
    VOTING = "voting"
    SUMS = "sums"
    AVERAGE_LOG = "average_log"
    INVESTMENT = "investment"
    POOLED_INVESTMENT = "pooled_investment"
    TRUTHFINDER = "truthfinder"
    TWO_ESTIMATES = "two_estimates"
    THREE_ESTIMATES = "three_estimates"
    ACCU = "accu"
    CRH = "crh"
    SIMPLE_LCA = "simple_lca"
    GUESS_LCA = "guess_lca"

    @classmethod
    def parse(cls, name) -> MethodId:
        if isinstance(name, cls):
            return name
        # "GuessLCA", "guess-lca" and "guess_lca" all name the same method
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        for m in cls:
            if key == m.value.replace("_", ""):
                return m
        raise ConfigError(f"unknown method {name!r}; valid names: {', '.join(m.value for m in cls)}")


METHOD_ORDER = tuple(MethodId)


def method_sort_key(name: str):
    """Canonical MethodId order first, unknown names after, alphabetically."""
    try:
        return (0, METHOD_ORDER.index(MethodId(name)), name)
    except ValueError:
        return (1, 0, name)


@dataclass
class MethodOutput:
    """One method's hypothesis about the truth, plus its intermediate scores."""

    method: str
    mode: Mode
    identified_truth: TruthAssignment
    value_confidence: dict[tuple[str, str], float]
    native_trust: dict[str, float]
    iterations: int = 1
    converged: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        conf: dict[str, dict[str, float]] = {}
        for (o, v), c in sorted(self.value_confidence.items()):
            conf.setdefault(o, {})[v] = float(c)
        return {
            "method": self.method,
            "mode": Mode(self.mode).value,
            "identified_truth": {o: sorted(vs) for o, vs in self.identified_truth.items()},
            "value_confidence": conf,
            "native_trust": {s: float(t) for s, t in sorted(self.native_trust.items())},
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }

    @classmethod
    def from_dict(cls, d: dict) -> MethodOutput:
        try:
            return cls(
                method=d["method"],
                mode=Mode(d["mode"]),
                identified_truth=TruthAssignment(d["identified_truth"]),
                value_confidence={(o, v): float(c)
                                  for o, vc in d.get("value_confidence", {}).items()
                                  for v, c in vc.items()},
                native_trust={s: float(t) for s, t in d.get("native_trust", {}).items()},
                iterations=int(d.get("iterations", 1)),
                converged=bool(d.get("converged", True)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConsistencyError(f"malformed method output: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, directory) -> Path:
        path = Path(directory) / f"{self.method}.output.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> MethodOutput:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def iterate_to_fixpoint(update, init, max_iter=200, tol=1e-6, trust=None):
    """Apply ``update`` until the trust vector stops moving.

    Parameters
    ----------
    update : callable
        Deterministic map ``state -> state``.
    init : object
        Initial state.
    max_iter : int
        Upper bound on the number of ``update`` calls.
    tol : float
        Convergence threshold on the L-infinity change of the trust vector.
    trust : callable, optional
        Extracts the trust vector from a state; the state itself by default.

    Returns
    -------
    state, iterations, converged
    """
    key = trust if trust is not None else (lambda st: st)
    state = init
    prev = np.asarray(key(state), dtype=float)
    for it in range(1, max_iter + 1):
        state = update(state)
        cur = np.asarray(key(state), dtype=float)
        if cur.shape == prev.shape and (cur.size == 0 or np.max(np.abs(cur - prev)) < tol):
            return state, it, True
        prev = cur
    return state, max_iter, False


class _Arrays:
    """Integer-indexed view of a single-valued dataset for vectorized updates."""

    def __init__(self, ds: ClaimDataset):
        self.cs = ds.claim_source
        self.cf = ds.claim_fact
        self.co = ds.claim_object
        self.fo = ds.fact_object
        self.n_s, self.n_f, self.n_o = ds.n_sources, ds.n_facts, ds.n_objects
        self.src_claims = np.bincount(self.cs, minlength=self.n_s).astype(float)   # |V_s|
        self.fact_claims = np.bincount(self.cf, minlength=self.n_f).astype(float)  # |S_v|
        self.obj_claims = np.bincount(self.co, minlength=self.n_o).astype(float)   # |S_o|
        self.obj_values = np.bincount(self.fo, minlength=self.n_o).astype(float)   # |V_o|
        self.fact_values = self.obj_values[self.fo]
        self.values = [v for _, v in ds.facts]

    def per_fact(self, claim_weights):
        return np.bincount(self.cf, weights=claim_weights, minlength=self.n_f)

    def per_source(self, claim_weights):
        return np.bincount(self.cs, weights=claim_weights, minlength=self.n_s)

    def per_object(self, weights, over="facts"):
        idx = self.fo if over == "facts" else self.co
        return np.bincount(idx, weights=weights, minlength=self.n_o)

    def source_mean(self, fact_scores):
        return self.per_source(fact_scores[self.cf]) / self.src_claims

    def object_softmax(self, scores):
        """Normalize ``exp(scores)`` within each object (max-subtracted)."""
        peak = np.full(self.n_o, -np.inf)
        np.maximum.at(peak, self.fo, scores)
        e = np.exp(scores - peak[self.fo])
        return e / self.per_object(e)[self.fo]

    def voting_shares(self):
        return self.fact_claims / self.obj_claims[self.fo]

    def winners(self, conf):
        """Winning fact per object: max confidence, ties to the smaller value."""
        order = np.lexsort((np.arange(self.n_f), -conf, self.fo))
        first = np.ones(order.size, dtype=bool)
        first[1:] = self.fo[order][1:] != self.fo[order][:-1]
        return order[first]


def max_normalize(x):
    m = np.max(x) if x.size else 0.0
    return x / m if m > 0 else x


def minmax_rescale(x):
    if x.size == 0:
        return x
    lo, hi = np.min(x), np.max(x)
    if hi - lo <= 0:
        return x
    return (x - lo) / (hi - lo)


class TruthDiscoverer(BaseEstimator):
    """Base estimator: ``fit`` a claim dataset, read the truths off it.

    Multi-valued datasets are reduced to joint values first; the winning
    joint value of each object is exploded back into its member values.

    Fitted attributes
    -----------------
    output_ : MethodOutput
    truths_ : TruthAssignment
    value_confidence_ : dict
    source_trust_ : dict
    n_iter_ : int
    converged_ : bool
    """

    method_id: MethodId

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6):
        self.max_iter = max_iter
        self.tol = tol
        self.clamp = clamp

    # subclasses return (fact confidences, source trust, iterations, converged)
    def _solve(self, A: _Arrays):
        raise NotImplementedError

    def _check_params(self):
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        if not 0 < self.clamp < 0.5:
            raise ConfigError("clamp must lie in (0, 0.5)")

    def _clip(self, t):
        return np.clip(t, self.clamp, 1.0 - self.clamp)

    def _iterate(self, update, init, trust=None):
        name = self.method_id.value
        counter = [0]

        def checked(state):
            counter[0] += 1
            new = update(state)
            parts = new if isinstance(new, tuple) else (new,)
            for p in parts:
                if not np.all(np.isfinite(p)):
                    raise NumericalError(f"{name}: non-finite values at iteration {counter[0]}")
            return new

        return iterate_to_fixpoint(checked, init, self.max_iter, self.tol, trust)

    def fit(self, X, y=None):
        self._check_params()
        dataset = check_dataset(X)
        work, view = (to_joint_view(dataset) if dataset.mode is Mode.MULTI else (dataset, None))
        A = _Arrays(work)
        conf, trust, n_iter, converged = self._solve(A)
        conf = np.asarray(conf, dtype=float)
        if not (np.all(np.isfinite(conf)) and np.all(np.isfinite(trust))):
            raise NumericalError(f"{self.method_id.value}: non-finite output")

        winners = A.winners(conf)
        joint_truth = {work.objects[work.fact_object[f]]: work.facts[f][1] for f in winners}
        fact_conf = {work.facts[f]: float(conf[f]) for f in range(A.n_f)}
        if view is None:
            truth = TruthAssignment(joint_truth)
            value_conf = fact_conf
        else:
            truth = explode_truths(joint_truth, view)
            # a member value scores as its best-scoring joint value
            value_conf = {}
            for (o, jv), c in fact_conf.items():
                for v in view.explode(o, jv):
                    value_conf[(o, v)] = max(c, value_conf.get((o, v), -np.inf))

        self.output_ = MethodOutput(
            method=self.method_id.value,
            mode=dataset.mode,
            identified_truth=truth,
            value_confidence=value_conf,
            native_trust={s: float(t) for s, t in zip(work.sources, trust)},
            iterations=int(n_iter),
            converged=bool(converged),
        )
        self.truths_ = truth
        self.value_confidence_ = value_conf
        self.source_trust_ = self.output_.native_trust
        self.n_iter_ = self.output_.iterations
        self.converged_ = self.output_.converged
        self.mode_ = dataset.mode
        return self

    def predict(self, X=None) -> TruthAssignment:
        """Identified truths, restricted to the objects of ``X`` when given."""
        check_is_fitted(self, "output_")
        if X is None:
            return self.truths_
        dataset = check_dataset(X, self.mode_)
        unknown = [o for o in dataset.objects if o not in self.truths_]
        if unknown:
            raise ConsistencyError(f"objects not seen during fit: {unknown[:3]}")
        return self.truths_.restrict(dataset.objects)

    def fit_predict(self, X, y=None) -> TruthAssignment:
        return self.fit(X).truths_
