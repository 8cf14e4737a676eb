"""Truth discovery methods and a ground-truth-free way to compare them."""

from .comptruthhyp import CompTruthHyp
from .data import ClaimDataset, Mode, TruthAssignment, load_claims, load_truth
from .evaluation import coverage_sweep, evaluate, rank_by_metric, ranking_distance
from .generator import GeneratorConfig, generate
from .methods import MethodConfig, MethodId, MethodOutput, discover, make_estimator, run_all

__version__ = "0.1.0"

__all__ = [
    "ClaimDataset", "CompTruthHyp", "GeneratorConfig", "MethodConfig", "MethodId",
    "MethodOutput", "Mode", "TruthAssignment", "coverage_sweep", "discover", "evaluate",
    "generate", "load_claims", "load_truth", "make_estimator", "rank_by_metric",
    "ranking_distance", "run_all",
]
