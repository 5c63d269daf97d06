"""Empirical affectedness proportions and method-of-moments Beta fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .distributions import BetaParams
from .errors import (
    BoundaryMeanError,
    DegenerateSampleError,
    InfeasibleMomentsError,
    InputError,
)

__all__ = [
    "PortfolioYear",
    "ProportionSample",
    "empirical_proportions",
    "fit_beta_mom",
    "mom_from_moments",
]


@dataclass(frozen=True)
class PortfolioYear:
    """One observation year: ``contracts`` in force, ``affected`` hit by a claim."""

    year: str
    contracts: int
    affected: int

    def __post_init__(self):
        for name in ("contracts", "affected"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InputError(f"{name} must be an integer, got {value!r}")
        if self.contracts < 1:
            raise InputError(f"contracts must be >= 1, got {self.contracts}")
        if not 0 <= self.affected <= self.contracts:
            raise InputError(
                f"affected must lie in [0, contracts={self.contracts}], got {self.affected}"
            )
        object.__setattr__(self, "year", str(self.year))

    @property
    def proportion(self) -> float:
        return self.affected / self.contracts


@dataclass(frozen=True)
class ProportionSample:
    """Proportions in input order with their mean and ``n - 1`` variance.

    ``variance`` is ``None`` for a single observation.
    """

    proportions: tuple[float, ...]
    mean: float = field(init=False)
    variance: float | None = field(init=False)

    def __post_init__(self):
        props = tuple(float(p) for p in self.proportions)
        if not props:
            raise InputError("a proportion sample needs at least one value")
        if any(not (0.0 <= p <= 1.0) for p in props):
            raise InputError("proportions must lie in [0, 1]")
        object.__setattr__(self, "proportions", props)
        arr = np.asarray(props)
        constant = arr.min() == arr.max()
        # fsum(3 * [0.1]) / 3 != 0.1: pin constant samples to exact moments
        mean = props[0] if constant else math.fsum(props) / len(props)
        object.__setattr__(self, "mean", mean)
        if len(props) >= 2:
            var = 0.0 if constant else math.fsum((arr - mean) ** 2) / (len(props) - 1)
            object.__setattr__(self, "variance", var)
        else:
            object.__setattr__(self, "variance", None)

    @property
    def n(self) -> int:
        return len(self.proportions)

    @property
    def sd(self) -> float | None:
        return None if self.variance is None else math.sqrt(self.variance)


def empirical_proportions(history: Iterable[PortfolioYear]) -> ProportionSample:
    rows: Sequence[PortfolioYear] = list(history)
    if not rows:
        raise InputError("history is empty")
    return ProportionSample(tuple(r.affected / r.contracts for r in rows))


def mom_from_moments(mean: float, variance: float) -> BetaParams:
    """Beta parameters whose mean and variance equal the given ones.

    Raises a subclass of :class:`EstimationError` naming the violated
    precondition: zero variance, a mean on the boundary, or a variance at or
    above ``mean * (1 - mean)``.
    """
    if not (0.0 < mean < 1.0):
        raise BoundaryMeanError(f"sample mean must lie strictly inside (0, 1), got {mean!r}")
    if not variance > 0.0:
        raise DegenerateSampleError(f"sample variance must be positive, got {variance!r}")
    bound = mean * (1.0 - mean)
    if variance >= bound:
        raise InfeasibleMomentsError(
            f"sample variance {variance!r} must be below mean*(1-mean) = {bound!r}"
        )
    alpha = mean * (mean - mean * mean - variance) / variance
    beta = alpha * (1.0 - mean) / mean
    if not (alpha > 0.0 and beta > 0.0):
        # only reachable through rounding right at the feasibility boundary
        raise InfeasibleMomentsError(
            f"moments give non-positive parameters (alpha={alpha!r}, beta={beta!r})"
        )
    return BetaParams(alpha, beta)


def fit_beta_mom(sample: ProportionSample) -> BetaParams:
    if sample.n < 2 or sample.variance is None:
        raise DegenerateSampleError(f"need at least 2 observations, got {sample.n}")
    return mom_from_moments(sample.mean, sample.variance)
