import numpy as np

from .base import MethodId, TruthDiscoverer


class CRH(TruthDiscoverer):
    """Conflict resolution on heterogeneous data, restricted to categorical 0-1 loss.

    Truths are weighted majorities; a source's weight is
    ``-ln((loss_s + delta) / (sum(loss) + delta * |S|))`` where ``loss_s``
    counts its claims that disagree with the current truths.
    """

    method_id = MethodId.CRH

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, delta=1e-9):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.delta = delta

    def _shares(self, A, weight):
        votes = A.per_fact(weight[A.cs])
        total = A.per_object(votes)[A.fo]
        uniform = 1.0 / A.fact_values
        return votes, np.divide(votes, total, out=uniform, where=total > 0)

    def _solve(self, A):
        def step(state):
            weight, _ = state
            votes, shares = self._shares(A, weight)
            win = A.winners(votes)
            truth_of_obj = np.empty(A.n_o, dtype=np.int64)
            truth_of_obj[A.fo[win]] = win
            loss = A.per_source((A.cf != truth_of_obj[A.co]).astype(float))
            weight = -np.log((loss + self.delta) / (loss.sum() + self.delta * A.n_s))
            return weight, shares

        init = (np.ones(A.n_s), np.zeros(A.n_f))
        (weight, _), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        _, shares = self._shares(A, weight)
        return shares, weight, it, ok
