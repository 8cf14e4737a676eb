"""Latent credibility analysis: SimpleLCA and GuessLCA.

Value posteriors are products over the object's claimants, computed in
log space and normalized per object.
"""

import numpy as np

from .base import MethodId, TruthDiscoverer


class SimpleLCA(TruthDiscoverer):
    """A source asserts the truth with probability ``H_s``, otherwise one of
    the ``|V_o| - 1`` other values uniformly."""

    method_id = MethodId.SIMPLE_LCA

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6, init_trust=0.8):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)
        self.init_trust = init_trust

    def _claim_probs(self, A, t):
        """Per-claim (P(claim | value true), P(claim | other value true))."""
        n_false = np.maximum(A.obj_values - 1.0, 1.0)[A.co]
        return t, (1.0 - t) / n_false

    def _solve(self, A):
        def step(state):
            trust, _ = state
            hit, miss = self._claim_probs(A, self._clip(trust)[A.cs])
            log_hit, log_miss = np.log(hit), np.log(miss)
            # every claimant of o contributes log_miss, except claimants of v who contribute log_hit
            log_post = A.per_fact(log_hit - log_miss) + A.per_object(log_miss, over="claims")[A.fo]
            conf = A.object_softmax(log_post)
            return A.source_mean(conf), conf

        init = (np.full(A.n_s, float(self.init_trust)), np.zeros(A.n_f))
        (trust, conf), it, ok = self._iterate(step, init, trust=lambda st: st[0])
        return conf, trust, it, ok


class GuessLCA(SimpleLCA):
    """A source knows the truth with probability ``H_s``; otherwise it guesses
    uniformly among the ``|V_o|`` values, and may still guess right."""

    method_id = MethodId.GUESS_LCA

    def _claim_probs(self, A, t):
        guess = 1.0 / A.obj_values[A.co]
        return t + (1.0 - t) * guess, (1.0 - t) * guess
