"""Twelve truth discovery methods behind one estimator interface."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exceptions import ConfigError, TruthHypError
from .accu import Accu
from .base import (
    METHOD_ORDER,
    MethodId,
    MethodOutput,
    TruthDiscoverer,
    iterate_to_fixpoint,
    method_sort_key,
)
from .crh import CRH
from .estimates import ThreeEstimates, TwoEstimates
from .hubs import AverageLog, Investment, PooledInvestment, Sums
from .lca import GuessLCA, SimpleLCA
from .truthfinder import TruthFinder
from .voting import Voting

ESTIMATORS: dict[MethodId, type[TruthDiscoverer]] = {
    MethodId.VOTING: Voting,
    MethodId.SUMS: Sums,
    MethodId.AVERAGE_LOG: AverageLog,
    MethodId.INVESTMENT: Investment,
    MethodId.POOLED_INVESTMENT: PooledInvestment,
    MethodId.TRUTHFINDER: TruthFinder,
    MethodId.TWO_ESTIMATES: TwoEstimates,
    MethodId.THREE_ESTIMATES: ThreeEstimates,
    MethodId.ACCU: Accu,
    MethodId.CRH: CRH,
    MethodId.SIMPLE_LCA: SimpleLCA,
    MethodId.GUESS_LCA: GuessLCA,
}


@dataclass(frozen=True)
class MethodConfig:
    """Settings shared by all methods, plus per-method parameter overrides.

    ``params`` maps a method name to keyword arguments of its estimator,
    e.g. ``{"pooled_investment": {"exponent": 1.0}}``.
    """

    max_iterations: int = 200
    convergence_epsilon: float = 1e-6
    trust_clamp_epsilon: float = 1e-6
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if not 0 < self.convergence_epsilon < 1:
            raise ConfigError("convergence_epsilon must lie in (0, 1)")
        if not 0 < self.trust_clamp_epsilon < 0.5:
            raise ConfigError("trust_clamp_epsilon must lie in (0, 0.5)")
        for name in self.params:
            MethodId.parse(name)


def make_estimator(method, config: MethodConfig | None = None) -> TruthDiscoverer:
    config = config or MethodConfig()
    mid = MethodId.parse(method)
    overrides = {}
    for name, kw in config.params.items():
        if MethodId.parse(name) is mid:
            overrides.update(kw)
    est = ESTIMATORS[mid](max_iter=config.max_iterations, tol=config.convergence_epsilon,
                          clamp=config.trust_clamp_epsilon)
    try:
        return est.set_params(**overrides)
    except ValueError as exc:
        raise ConfigError(f"{mid.value}: {exc}") from exc


def discover(dataset, method, config: MethodConfig | None = None) -> MethodOutput:
    """Run one method on ``dataset`` and return its output."""
    return make_estimator(method, config).fit(dataset).output_


def run_all(dataset, config: MethodConfig | None = None, methods=None) -> list[MethodOutput]:
    """Run every method (or the given subset) independently, in MethodId order."""
    selected = METHOD_ORDER if methods is None else sorted(
        {MethodId.parse(m) for m in methods}, key=METHOD_ORDER.index)
    outputs = []
    for mid in selected:
        try:
            outputs.append(discover(dataset, mid, config))
        except TruthHypError as exc:
            raise type(exc)(f"[{mid.value}] {exc}") from exc
    return outputs


__all__ = [
    "Accu", "AverageLog", "CRH", "ESTIMATORS", "GuessLCA", "Investment", "METHOD_ORDER",
    "MethodConfig", "MethodId", "MethodOutput", "PooledInvestment", "SimpleLCA", "Sums",
    "ThreeEstimates", "TruthDiscoverer", "TruthFinder", "TwoEstimates", "Voting",
    "discover", "iterate_to_fixpoint", "make_estimator", "method_sort_key", "run_all",
]
