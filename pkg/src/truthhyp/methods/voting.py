from .base import MethodId, TruthDiscoverer


class Voting(TruthDiscoverer):
    """Majority voting: a value's confidence is its share of the object's claimants.

    Sources are all equally reliable; ``source_trust_`` is only the mean
    confidence of each source's claims, reported for information.
    """

    method_id = MethodId.VOTING

    def __init__(self, max_iter=200, tol=1e-6, clamp=1e-6):
        super().__init__(max_iter=max_iter, tol=tol, clamp=clamp)

    def _solve(self, A):
        conf = A.voting_shares()
        return conf, A.source_mean(conf), 1, True
