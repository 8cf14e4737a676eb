"""Hub/authority style methods: Sums, Average-Log, Investment, PooledInvestment.

All four alternate between value scores and source scores, dividing each
vector by its maximum every round so the scores stay bounded.
"""

import numpy as np

from .base import MethodId, TruthDiscoverer, max_normalize


def _safe_div(num, den):
    return np.divide(num, den, out=np.zeros_like(num, dtype=float), where=den > 0)


class Sums(TruthDiscoverer):
    method_id = MethodId.SUMS

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_trust=0.5):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.init_trust = init_trust

    def _source_scores(self, A, conf):
        return A.per_source(conf[A.cf])

    def _solve(self, A):
        def step(state):
            trust, _ = state
            conf = max_normalize(A.per_fact(trust[A.cs]))
            return max_normalize(self._source_scores(A, conf)), conf

        init = (np.full(A.n_s, float(self.init_trust)), np.zeros(A.n_f))
        (trust, conf), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        return conf, trust, it, ok


class AverageLog(Sums):
    """Sums with source score ``ln|V_s| * mean(confidence of V_s)``.

    A source with a single claim gets ``ln 1 = 0`` and carries no weight.
    """

    method_id = MethodId.AVERAGE_LOG

    def _source_scores(self, A, conf):
        return np.log(A.src_claims) * A.source_mean(conf)


class Investment(TruthDiscoverer):
    """Sources spread their trust evenly over their claims and collect returns.

    A value's pooled investment ``H_v = sum(trust_s / |V_s|)`` is passed
    through ``G(x) = x ** exponent``.
    """

    method_id = MethodId.INVESTMENT

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_trust=1.0, exponent=1.2):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.init_trust = init_trust
        self.exponent = exponent

    def _invested(self, A, trust):
        return A.per_fact((trust / A.src_claims)[A.cs])

    def _value_scores(self, A, invested):
        return invested ** self.exponent

    def _solve(self, A):
        def step(state):
            trust, conf = state
            share = trust / A.src_claims
            invested = self._invested(A, trust)
            # share_s <= H_v, so the ratio is bounded by 1 even when H_v underflows
            returns = conf[A.cf] * _safe_div(share[A.cs], invested[A.cf])
            trust = max_normalize(A.per_source(returns))
            conf = max_normalize(self._value_scores(A, self._invested(A, trust)))
            return trust, conf

        t0 = np.full(A.n_s, float(self.init_trust))
        c0 = max_normalize(self._value_scores(A, self._invested(A, t0)))
        (trust, conf), it, ok = self._iterate(step, (t0, c0), trust=lambda st: st[0])
        return conf, trust, it, ok


class PooledInvestment(Investment):
    """Investment with per-object pooling ``c_v = H_v G(H_v) / sum_{V_o} G(H)``.

    ``exponent=1.0`` gives the purely linear variant.
    """

    method_id = MethodId.POOLED_INVESTMENT

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_trust=1.0, exponent=1.4):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp,
                         init_trust=init_trust, exponent=exponent)

    def _value_scores(self, A, invested):
        g = invested ** self.exponent
        return invested * _safe_div(g, A.per_object(g)[A.fo])
