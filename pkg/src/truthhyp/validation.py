"""Input validation helpers used by the estimators and the pipeline."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .data import ClaimDataset, Mode, TruthAssignment
from .exceptions import ConfigError, ConsistencyError, ModeError


def check_dataset(X, mode=None) -> ClaimDataset:
    """Return ``X`` as a :class:`ClaimDataset`.

    ``X`` may already be a dataset, or any array-like of
    ``(source, object, value)`` rows (a list of tuples, an ``(n, 3)`` array,
    a three-column DataFrame).  When ``mode`` is given and ``X`` is a
    dataset, the modes must agree.
    """
    if isinstance(X, ClaimDataset):
        if mode is not None and X.mode is not Mode(mode):
            raise ModeError(f"dataset is {X.mode.value}-valued, expected {Mode(mode).value}")
        return X
    if hasattr(X, "to_numpy"):
        X = X.to_numpy()
    rows = [tuple(r) for r in X]
    return ClaimDataset(rows, Mode.SINGLE if mode is None else mode)


def check_fraction(value, name="coverage") -> float:
    """Validate a fraction in (0, 1]."""
    if not isinstance(value, numbers.Real) or not (0.0 < float(value) <= 1.0) or math.isnan(value):
        raise ConfigError(f"{name} must lie in (0, 1], got {value!r}")
    return float(value)


def check_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_positive_int(value, name, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_output(dataset: ClaimDataset, output) -> TruthAssignment:
    """Check a method output is a complete hypothesis over ``dataset``.

    Every object of the dataset needs an identified truth, and every
    identified object must exist in the dataset.
    """
    if Mode(output.mode) is not dataset.mode:
        raise ConsistencyError(
            f"output of {output.method!r} is {Mode(output.mode).value}-valued "
            f"but the dataset is {dataset.mode.value}-valued")
    truth = output.identified_truth
    truth.validate(dataset)
    missing = [o for o in dataset.objects if o not in truth]
    if missing:
        raise ConsistencyError(
            f"output of {output.method!r} has no identified truth for {len(missing)} objects "
            f"(first: {missing[0]!r})")
    return truth
