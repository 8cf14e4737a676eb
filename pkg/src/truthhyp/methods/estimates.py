"""2-Estimates and 3-Estimates corroboration.

Both use mutual exclusion: a source claiming one value of an object votes
against every other value of that object.  Each half-step is followed by
a linear rescale of the updated vector onto [0, 1].
"""

import numpy as np

from .base import MethodId, TruthDiscoverer, minmax_rescale


class TwoEstimates(TruthDiscoverer):
    method_id = MethodId.TWO_ESTIMATES

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)

    def _solve(self, A):
        def step(state):
            _, conf = state
            # claim on v contributes c_v plus (1 - c_w) for every other value w of the object
            against = A.per_object(1.0 - conf)
            num = A.per_source(2.0 * conf[A.cf] - 1.0 + against[A.co])
            trust = minmax_rescale(num / A.per_source(A.obj_values[A.co]))

            distrust = A.per_object((1.0 - trust)[A.cs], over="claims")
            conf = (A.per_fact((2.0 * trust - 1.0)[A.cs]) + distrust[A.fo]) / A.obj_claims[A.fo]
            return trust, minmax_rescale(conf)

        c0 = A.voting_shares()
        (trust, conf), it, ok = self._iterate(step, (A.source_mean(c0), c0),
                                              trust=lambda st: st[0])
        return conf, trust, it, ok


class ThreeEstimates(TruthDiscoverer):
    """2-Estimates plus a per-value hardness ``d_v``.

    A source with error factor ``eps_s`` is right about value ``v`` with
    probability ``1 - eps_s * d_v``.  ``source_trust_`` reports ``1 - eps_s``.
    """

    method_id = MethodId.THREE_ESTIMATES

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_error=0.2,
                 init_hardness=0.5, floor=1e-3):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.init_error = init_error
        self.init_hardness = init_hardness
        self.floor = floor

    def _solve(self, A):
        floor = self.floor

        def step(state):
            _, hard, conf = state
            err = A.source_mean((1.0 - conf) / np.maximum(hard, floor))
            err = minmax_rescale(err)

            inv_err = A.per_fact((1.0 / np.maximum(err, floor))[A.cs]) / A.fact_claims
            hard = minmax_rescale((1.0 - conf) * inv_err)

            err_v = A.per_fact(err[A.cs])                        # sum of eps over S_v
            err_o = A.per_object(err[A.cs], over="claims")[A.fo]  # sum of eps over S_o
            conf = (A.fact_claims - hard * err_v + hard * (err_o - err_v)) / A.obj_claims[A.fo]
            return err, hard, minmax_rescale(conf)

        init = (np.full(A.n_s, float(self.init_error)),
                np.full(A.n_f, float(self.init_hardness)),
                A.voting_shares())
        (err, _, conf), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        return conf, 1.0 - err, it, ok
