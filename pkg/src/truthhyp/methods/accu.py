import numpy as np

from .base import MethodId, TruthDiscoverer


class Accu(TruthDiscoverer):
    """Accu without copy detection.

    Each claimant adds ``ln(n * A_s / (1 - A_s))`` to a value's vote count,
    with ``n = |V_o| - 1`` equally likely false values; confidences are the
    per-object softmax of the vote counts, and a source's accuracy ``A_s``
    is the mean confidence of its claims.
    """

    method_id = MethodId.ACCU

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_trust=0.8):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.init_trust = init_trust

    def _solve(self, A):
        n_false = np.maximum(A.obj_values - 1.0, 1.0)

        def step(state):
            trust, _ = state
            t = self._clip(trust)[A.cs]
            votes = A.per_fact(np.log(n_false[A.co] * t / (1.0 - t)))
            conf = A.object_softmax(votes)
            return A.source_mean(conf), conf

        init = (np.full(A.n_s, float(self.init_trust)), np.zeros(A.n_f))
        (trust, conf), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        return conf, trust, it, ok
