"""Beta law of the affectedness proportion and Beta-Binomial claim counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import RngSeed, fill_beta, fill_beta_binomial
from .specfun import ln_beta

__all__ = [
    "BetaParams",
    "BetaBinomialParams",
    "beta_pdf",
    "beta_moments",
    "beta_binomial_pmf",
    "beta_binomial_moments",
    "binomial_conditional_moments",
    "sample_beta",
    "sample_beta_binomial",
]


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def mode(self) -> float | None:
        """Interior mode, or ``None`` when the density is unbounded or U-shaped."""
        if self.alpha <= 1 or self.beta <= 1:
            return None
        return (self.alpha - 1) / (self.alpha + self.beta - 2)


@dataclass(frozen=True)
class BetaBinomialParams:
    m: int
    params: BetaParams

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be an integer >= 1, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))


def beta_pdf(x, p: BetaParams):
    """Beta density on the open unit interval; accepts scalars or arrays."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or np.any(~(xa < 1)):
        raise DomainError("beta_pdf is defined on the open interval (0, 1)")
    a, b = p.alpha, p.beta
    out = np.exp((a - 1) * np.log(xa) + (b - 1) * np.log1p(-xa) - ln_beta(a, b))
    return float(out) if out.ndim == 0 else out


def beta_moments(p: BetaParams) -> tuple[float, float]:
    s = p.alpha + p.beta
    return p.alpha / s, p.alpha * p.beta / (s * s * (s + 1))


def _ln_choose(m, k):
    # C(m, k) = 1 / ((m + 1) Be(k + 1, m - k + 1)); avoids differencing large lgammas
    return -math.log(m + 1) - ln_beta(k + 1.0, m - k + 1.0)


def beta_binomial_pmf(k, bb: BetaBinomialParams):
    """P(A = k) for the Beta-Binomial count, evaluated in log space.

    Returns 0.0 for ``k`` outside ``0..m``.  Array ``k`` is supported.
    """
    a, b, m = bb.params.alpha, bb.params.beta, bb.m
    ks = np.asarray(k)
    if ks.ndim == 0:
        k = int(ks)
        if k < 0 or k > m:
            return 0.0
        return math.exp(_ln_choose(m, k) + ln_beta(k + a, m - k + b) - ln_beta(a, b))
    flat = ks.astype(np.int64).ravel()
    out = np.zeros(flat.size)
    inside = (flat >= 0) & (flat <= m)
    kin = flat[inside].astype(float)
    if kin.size:
        out[inside] = np.exp(_ln_choose(m, kin) + ln_beta(kin + a, m - kin + b) - ln_beta(a, b))
    return out.reshape(ks.shape)


def beta_binomial_moments(bb: BetaBinomialParams) -> tuple[float, float]:
    a, b, m = bb.params.alpha, bb.params.beta, bb.m
    s = a + b
    return m * a / s, m * a * b * (s + m) / (s * s * (s + 1))


def binomial_conditional_moments(m: int, p: float) -> tuple[float, float, float]:
    """Conditional mean and variance of ``A`` given ``xi = p``, plus ``1/(4m)``.

    The third value bounds ``Var(A/m | xi = p) = p(1 - p)/m`` from above.
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    return m * p, m * p * (1 - p), 1 / (4 * m)


def _count(count):
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    return int(count)


def sample_beta(p: BetaParams, seed: RngSeed, count: int) -> np.ndarray:
    """``count`` Beta variates from substream ``seed.stream``.

    Variate ``i`` depends only on ``(seed, i)``, so a longer request extends a
    shorter one.
    """
    out = np.empty(_count(count))
    k0, k1 = seed.key
    s0, s1 = seed.stream_words
    fill_beta(k0, k1, s0, s1, p.alpha, p.beta, out)
    return out


def sample_beta_binomial(bb: BetaBinomialParams, seed: RngSeed, count: int) -> np.ndarray:
    """Beta-Binomial counts: a fresh ``xi ~ Beta`` and an exact Binomial draw each."""
    out = np.empty(_count(count), dtype=np.int64)
    k0, k1 = seed.key
    s0, s1 = seed.stream_words
    fill_beta_binomial(k0, k1, s0, s1, bb.m, bb.params.alpha, bb.params.beta, out)
    return out
