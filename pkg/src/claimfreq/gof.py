"""Q-Q correlation statistic ``T_n = -ln(1 - rho_n)`` and its Monte-Carlo test.

Small ``T_n`` means the ordered observations line up poorly with the fitted
Beta quantiles, so the test rejects in the lower tail::

    p = (1 + #{r : T_r <= T_obs}) / (N + 1)

and a large p-value indicates an acceptable fit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .distributions import BetaParams
from .errors import ConvergenceError, DomainError, SimulationError, UndefinedCorrelationError
from .estimation import ProportionSample, fit_beta_mom
from .rng import RngSeed, _beta_variate
from .specfun import DEFAULT_TOLERANCE, OK, ToleranceConfig, _beta_quantile, beta_quantile

__all__ = [
    "REESTIMATE",
    "FIXED_PARAMS",
    "QQResult",
    "McTestResult",
    "qq_quantiles",
    "pearson",
    "tn_from_rho",
    "compute_tn",
    "mc_test",
]

REESTIMATE = "re-estimate"
FIXED_PARAMS = "fixed-params"
MODES = (REESTIMATE, FIXED_PARAMS)
DEFAULT_REPLICATES = 10_000
MIN_REPLICATES = 100

# replicate kernel status codes
_SIM_OK = 0
_SIM_REDRAW_LIMIT = 1
_SIM_QUANTILE = 2


@dataclass(frozen=True)
class QQResult:
    sorted_obs: np.ndarray
    quantiles: np.ndarray
    rho: float
    tn: float
    perfect_fit: bool = False

    @property
    def n(self) -> int:
        return len(self.sorted_obs)


@dataclass(frozen=True)
class McTestResult:
    """Outcome of :func:`mc_test`.

    ``simulated`` keeps every replicate statistic in replicate order so the
    p-value can be recomputed; ``summary`` is (min, q1, median, q3, max).
    """

    tn_observed: float
    replicates: int
    seed: RngSeed
    p_value: float
    summary: tuple[float, float, float, float, float]
    mode: str
    params: BetaParams
    redraws: int
    simulated: np.ndarray = field(repr=False, compare=False)

    def same_as(self, other: McTestResult) -> bool:
        """Field-by-field and bitwise comparison, including ``simulated``."""
        return self == other and np.array_equal(self.simulated, other.simulated)


def qq_quantiles(p: BetaParams, n: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> np.ndarray:
    """Beta quantiles at the plotting positions ``k / (n + 1)``, ``k = 1..n``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    levels = np.arange(1, n + 1) / (n + 1.0)
    return np.atleast_1d(beta_quantile(levels, p.alpha, p.beta, tol))


@njit(cache=True, nogil=True)
def _is_constant(x):
    for i in range(1, x.size):
        if x[i] != x[0]:
            return False
    return True


@njit(cache=True, nogil=True)
def _pearson(x, y):
    n = x.size
    # rounding in the means would leave a tiny spread for constant input
    if _is_constant(x) or _is_constant(y):
        return np.nan
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += x[i]
        my += y[i]
    mx /= n
    my /= n
    sxy = 0.0
    sxx = 0.0
    syy = 0.0
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        sxy += dx * dy
        sxx += dx * dx
        syy += dy * dy
    prod = sxx * syy
    # sqrt(s * s) == s exactly, so identical sequences give rho = 1; split the
    # root only when the product underflows
    den = math.sqrt(prod) if prod > 0.0 else math.sqrt(sxx) * math.sqrt(syy)
    if den == 0.0:
        return np.nan
    r = sxy / den
    if r > 1.0:
        r = 1.0
    elif r < -1.0:
        r = -1.0
    return r


@njit(cache=True, nogil=True)
def _tn(rho):
    if rho >= 1.0:
        return np.inf
    return -math.log1p(-rho)


def pearson(x, y) -> float:
    """Pearson correlation; raises if either sequence is constant."""
    xa = np.ascontiguousarray(x, dtype=float)
    ya = np.ascontiguousarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1 or xa.size < 2:
        raise DomainError("pearson needs two 1-d sequences of equal length >= 2")
    r = _pearson(xa, ya)
    if math.isnan(r):
        raise UndefinedCorrelationError("correlation is undefined for a constant sequence")
    return float(r)


def tn_from_rho(rho: float) -> float:
    """``-ln(1 - rho)``; ``+inf`` for ``rho = 1``."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho!r}")
    return float(_tn(float(rho)))


def compute_tn(
    sample: ProportionSample, p: BetaParams, tol: ToleranceConfig = DEFAULT_TOLERANCE
) -> QQResult:
    """Correlate the ordered sample with the fitted Beta quantiles."""
    if sample.n < 3:
        raise DomainError(f"the Q-Q statistic needs n >= 3 observations, got {sample.n}")
    obs = np.sort(np.asarray(sample.proportions, dtype=float), kind="stable")
    q = qq_quantiles(p, sample.n, tol)
    rho = pearson(obs, q)
    tn = tn_from_rho(rho)
    return QQResult(obs, q, rho, tn, perfect_fit=math.isinf(tn))


@njit(cache=True, nogil=True)
def _replicates(k0, k1, start, stop, n, alpha, beta, reestimate, abs_tol, max_iter,
                max_redraws, out_tn, out_redraws, out_status):
    x = np.empty(n)
    q = np.empty(n)
    for r in range(start, stop):
        redraws = 0
        status = _SIM_OK
        rho = np.nan
        while True:
            # stream index of this attempt: (redraws << 32) | r
            for i in range(n):
                x[i] = _beta_variate(k0, k1, r, redraws, i, alpha, beta)
            a = alpha
            b = beta
            ok = not _is_constant(x)
            if ok and reestimate:
                mean = 0.0
                for i in range(n):
                    mean += x[i]
                mean /= n
                var = 0.0
                for i in range(n):
                    var += (x[i] - mean) ** 2
                var /= n - 1
                ok = 0.0 < var < mean * (1.0 - mean) and 0.0 < mean < 1.0
                if ok:
                    a = mean * (mean - mean * mean - var) / var
                    b = a * (1.0 - mean) / mean
                    ok = a > 0.0 and b > 0.0
            if ok:
                x.sort()
                for k in range(n):
                    qk, _lo, _hi, st = _beta_quantile((k + 1.0) / (n + 1.0), a, b, abs_tol, max_iter)
                    if st != OK:
                        status = _SIM_QUANTILE
                    q[k] = qk
                if status != _SIM_OK:
                    break
                rho = _pearson(x, q)
                # quantiles of an extreme refit can coincide in double precision,
                # leaving the statistic undefined: such samples are redrawn too
                if not math.isnan(rho):
                    break
            redraws += 1
            if redraws > max_redraws:
                status = _SIM_REDRAW_LIMIT
                break
        out_redraws[r - start] = redraws
        out_status[r - start] = status
        out_tn[r - start] = _tn(rho) if status == _SIM_OK else np.nan


def _chunks(total, parts):
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def simulate_statistics(
    params: BetaParams,
    n: int,
    replicates: int,
    seed: RngSeed,
    mode: str = REESTIMATE,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> tuple[np.ndarray, int]:
    """Replicate statistics under ``Beta(params)`` and the total redraw count.

    Replicate ``r`` draws from substream ``(redraw << 32) | r`` of
    ``seed.child()``; the split into ``workers`` threads does not affect the
    output.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if replicates >= 2**32:
        raise DomainError("at most 2**32 - 1 replicates are supported")
    k0, k1 = seed.child().key
    tn = np.empty(replicates)
    redraws = np.empty(replicates, dtype=np.int64)
    status = np.empty(replicates, dtype=np.int64)
    max_redraws = 10 * replicates
    reestimate = mode == REESTIMATE

    def run(span):
        lo, hi = span
        _replicates(k0, k1, lo, hi, n, params.alpha, params.beta, reestimate,
                    float(tol.abs_tol), int(tol.max_iter), max_redraws,
                    tn[lo:hi], redraws[lo:hi], status[lo:hi])

    spans = _chunks(replicates, workers)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, spans))
    else:
        for span in spans:
            run(span)

    total_redraws = int(redraws.sum())
    if np.any(status == _SIM_REDRAW_LIMIT) or total_redraws > max_redraws:
        raise SimulationError(
            f"more than {max_redraws} redraws were needed for {replicates} replicates"
        )
    if np.any(status == _SIM_QUANTILE):
        r = int(np.flatnonzero(status == _SIM_QUANTILE)[0])
        raise ConvergenceError(f"quantile solver failed in replicate {r}")
    return tn, total_redraws


def p_value_from(tn_observed: float, simulated: np.ndarray) -> float:
    count = int(np.count_nonzero(simulated <= tn_observed))
    return (1 + count) / (simulated.size + 1)


def _summary(values):
    qs = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0], method="lower")
    return tuple(float(v) for v in qs)


def mc_test(
    sample: ProportionSample,
    replicates: int = DEFAULT_REPLICATES,
    seed: RngSeed = RngSeed(),
    mode: str = REESTIMATE,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    workers: int = 1,
    min_replicates: int = MIN_REPLICATES,
) -> McTestResult:
    """Monte-Carlo (parametric bootstrap) test of the fitted Beta law.

    In ``re-estimate`` mode every simulated sample is refitted by moments
    before its statistic is computed, mirroring how the observed statistic
    was obtained; ``fixed-params`` keeps the original fit.  Simulated samples
    with infeasible moments are redrawn and counted in ``redraws``.
    """
    if isinstance(replicates, bool) or int(replicates) != replicates or replicates < min_replicates:
        raise DomainError(f"replicates must be an integer >= {min_replicates}, got {replicates!r}")
    replicates = int(replicates)
    params = fit_beta_mom(sample)
    observed = compute_tn(sample, params, tol)
    simulated, redraws = simulate_statistics(
        params, sample.n, replicates, seed, mode=mode, tol=tol, workers=workers
    )
    return McTestResult(
        tn_observed=observed.tn,
        replicates=replicates,
        seed=seed,
        p_value=p_value_from(observed.tn, simulated),
        summary=_summary(simulated),
        mode=mode,
        params=params,
        redraws=redraws,
        simulated=simulated,
    )
