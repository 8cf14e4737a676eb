import numpy as np

from .base import MethodId, TruthDiscoverer


class TruthFinder(TruthDiscoverer):
    """Bayesian-flavoured TruthFinder.

    Parameters
    ----------
    gamma : float
        Dampening factor of the logistic value confidence.
    rho : float
        Weight of the influence between values of the same object.
    init_trust : float
        Starting trust of every source.
    similarity : callable, optional
        ``similarity(a, b) -> float in [-1, 1]``; how much value ``a``
        supports value ``b``.  ``None`` treats values as unrelated
        categories, so the influence term vanishes.
    """

    method_id = MethodId.TRUTHFINDER

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, gamma=0.3, rho=0.5,
                 init_trust=0.9, similarity=None):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.gamma = gamma
        self.rho = rho
        self.init_trust = init_trust
        self.similarity = similarity

    def _influence_pairs(self, A):
        """(source fact, target fact, weight) for every ordered pair within an object."""
        src, dst, w = [], [], []
        facts_by_obj = {}
        for f, o in enumerate(A.fo):
            facts_by_obj.setdefault(int(o), []).append(f)
        for facts in facts_by_obj.values():
            for a in facts:
                for b in facts:
                    if a != b:
                        weight = float(self.similarity(A.values[a], A.values[b]))
                        if weight:
                            src.append(a)
                            dst.append(b)
                            w.append(weight)
        return np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(w)

    def _solve(self, A):
        pairs = self._influence_pairs(A) if self.similarity is not None else None

        def step(state):
            trust, _ = state
            sigma = A.per_fact(-np.log1p(-self._clip(trust))[A.cs])
            if pairs is not None:
                a, b, w = pairs
                sigma = sigma + self.rho * np.bincount(b, weights=sigma[a] * w, minlength=A.n_f)
            conf = 1.0 / (1.0 + np.exp(-self.gamma * sigma))
            return A.source_mean(conf), conf

        init = (np.full(A.n_s, float(self.init_trust)), np.zeros(A.n_f))
        (trust, conf), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        return conf, trust, it, ok
