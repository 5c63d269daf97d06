"""Log-gamma, log-beta, the regularized incomplete beta function and its inverse.

The scalar kernels are compiled with numba and reused by the samplers and the
Monte-Carlo driver; the public wrappers validate arguments, accept scalars or
arrays, and translate kernel status codes into exceptions.

Accuracy notes
--------------
``ln_gamma`` is Stirling's series with the correction term ``delta(x)`` summed
directly for ``x >= 10`` and carried down by the exact recurrence
``delta(x) = delta(x + 1) + (x + 1/2) log1p(1/x) - 1`` below that.  Keeping
``delta`` separate lets ``ln_beta`` and the incomplete-beta prefactor cancel
the large ``x log x`` terms analytically instead of numerically, which is what
keeps ``I_x(572, 14007)`` accurate to ~1e-14.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConvergenceError, DomainError

__all__ = [
    "ToleranceConfig",
    "ln_gamma",
    "ln_beta",
    "reg_inc_beta",
    "beta_quantile",
]

HALF_LN_2PI = 0.91893853320467274178
_CF_EPS = 1e-15
_CF_TINY = 1e-300
_SMALLEST = 5e-324  # smallest positive subnormal
_CF_MAX_ITER = 1_000_000

# kernel status codes
OK = 0
NO_CONVERGENCE = 1


@dataclass(frozen=True)
class ToleranceConfig:
    """Stopping rule for :func:`beta_quantile`.

    ``abs_tol`` bounds the cdf residual ``|I_x - u|`` at the returned root and
    ``max_iter`` caps the number of safeguarded Newton/Halley steps.
    """

    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be a positive finite number, got {self.abs_tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")


DEFAULT_TOLERANCE = ToleranceConfig()


# --------------------------------------------------------------------------- #
# compiled kernels
# --------------------------------------------------------------------------- #


@njit(cache=True, nogil=True)
def _stirling_delta(x):
    # lnGamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2]
    acc = 0.0
    while x < 10.0:
        acc += (x + 0.5) * math.log1p(1.0 / x) - 1.0
        x += 1.0
    r = 1.0 / x
    r2 = r * r
    series = r * (
        1.0 / 12.0
        + r2
        * (
            -1.0 / 360.0
            + r2
            * (
                1.0 / 1260.0
                + r2
                * (
                    -1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))
                )
            )
        )
    )
    return acc + series


@njit(cache=True, nogil=True)
def _ln_gamma(x):
    return (x - 0.5) * math.log(x) - x + HALF_LN_2PI + _stirling_delta(x)


@njit(cache=True, nogil=True)
def _log_ratio(num, other, total):
    # ln(num / total) where total = num + other; log1p keeps precision when num dominates
    if num <= other:
        return math.log(num / total)
    return math.log1p(-other / total)


@njit(cache=True, nogil=True)
def _ln_beta(a, b):
    c = a + b
    corr = _stirling_delta(a) + _stirling_delta(b) - _stirling_delta(c)
    return (
        HALF_LN_2PI
        + (a - 0.5) * _log_ratio(a, b, c)
        + (b - 0.5) * _log_ratio(b, a, c)
        - 0.5 * math.log(c)
        + corr
    )


@njit(cache=True, nogil=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@njit(cache=True, nogil=True)
def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, nogil=True)
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@njit(cache=True, nogil=True)
def _mean_offset(x, a, b):
    # x*(a + b) - a without the cancellation of the naive product near the mean
    c_hi, c_lo = _two_sum(a, b)
    p, perr = _two_prod(x, c_hi)
    return ((p - a) + perr) + x * c_lo


@njit(cache=True, nogil=True)
def _ibeta_front(x, y, a, b):
    """x**a * y**b / Be(a, b) with y = 1 - x supplied by the caller."""
    if x <= 0.0 or y <= 0.0:
        return 0.0
    c = a + b
    t = _mean_offset(x, a, b)
    ra = t / a
    rb = -t / b
    if abs(ra) < 0.5:
        l1 = math.log1p(ra)
    else:
        l1 = math.log(x * c / a)
    if abs(rb) < 0.5:
        l2 = math.log1p(rb)
    else:
        l2 = math.log(y * c / b)
    corr = _stirling_delta(a) + _stirling_delta(b) - _stirling_delta(c)
    expo = a * l1 + b * l2 - corr
    return math.exp(expo) * math.sqrt(a / (2.0 * math.pi) * (b / c))


@njit(cache=True, nogil=True)
def _ibeta_cf(x, y, a, b):
    """Continued fraction F with I_x(a, b) = front / F (Lentz evaluation).

    Partial numerators and denominators follow the TOMS 708 form, whose terms
    are built from ``1 - (x(a + b) - a)`` so that nothing cancels near the
    mean of the distribution.
    """
    lam = 1.0 - _mean_offset(x, a, b)
    f = a * lam / (a + 1.0)
    if f == 0.0:
        f = _CF_TINY
    c = f
    d = 0.0
    for m in range(1, _CF_MAX_ITER + 1):
        den = a + 2.0 * m - 1.0
        an = (a + m - 1.0) * (a + b + m - 1.0) * m * (b - m) * x * x / (den * den)
        bn = m + m * (b - m) * x / den + (a + m) * (lam + m * (2.0 - x)) / (den + 2.0)
        d = bn + an * d
        if d == 0.0:
            d = _CF_TINY
        c = bn + an / c
        if c == 0.0:
            c = _CF_TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return f, OK
    return f, NO_CONVERGENCE


@njit(cache=True, nogil=True)
def _reg_inc_beta(x, a, b):
    if x <= 0.0:
        return 0.0, OK
    if x >= 1.0:
        return 1.0, OK
    y = 1.0 - x
    front = _ibeta_front(x, y, a, b)
    if front == 0.0:
        # underflow: the cdf is 0 or 1 to double precision
        return (0.0 if x * (a + b + 2.0) < a + 1.0 else 1.0), OK
    if x * (a + b + 2.0) < a + 1.0:
        cf, status = _ibeta_cf(x, y, a, b)
        val = front / cf
    else:
        cf, status = _ibeta_cf(y, x, b, a)
        val = 1.0 - front / cf
    if val < 0.0:
        val = 0.0
    elif val > 1.0:
        val = 1.0
    return val, status


@njit(cache=True, nogil=True)
def _beta_pdf(x, a, b):
    y = 1.0 - x
    return _ibeta_front(x, y, a, b) / (x * y)


@njit(cache=True, nogil=True)
def _quantile_start(u, a, b):
    # classical starting values: a Cornish-Fisher type normal approximation for
    # a, b >= 1, otherwise inversion of the two power-law tails
    if a >= 1.0 and b >= 1.0:
        pp = u if u < 0.5 else 1.0 - u
        t = math.sqrt(-2.0 * math.log(pp))
        z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        if u < 0.5:
            z = -z
        al = (z * z - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = z * math.sqrt(al + h) / h - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (
            al + 5.0 / 6.0 - 2.0 / (3.0 * h)
        )
        e = 2.0 * w
        if e > 700.0:
            return 0.0
        return a / (a + b * math.exp(e))
    c = a + b
    ta = math.exp(a * math.log(a / c)) / a
    tb = math.exp(b * math.log(b / c)) / b
    w = ta + tb
    if u < ta / w:
        return math.pow(a * w * u, 1.0 / a)
    return 1.0 - math.pow(b * w * (1.0 - u), 1.0 / b)


@njit(cache=True, nogil=True)
def _closer_endpoint(u, a, b, lo, hi):
    if lo <= 0.0:
        return hi
    if hi >= 1.0:
        return lo
    f_lo = u - _reg_inc_beta(lo, a, b)[0]
    f_hi = _reg_inc_beta(hi, a, b)[0] - u
    return lo if f_lo <= f_hi else hi


@njit(cache=True, nogil=True)
def _beta_quantile(u, a, b, abs_tol, max_iter):
    """Root of I_x(a, b) = u by Halley steps kept inside a bisection bracket.

    Returns (x, lo, hi, status).
    """
    lo = 0.0
    hi = 1.0
    x = _quantile_start(u, a, b)
    if not (x > 0.0 and x < 1.0):
        x = 0.5
    for _ in range(max_iter):
        cdf, _st = _reg_inc_beta(x, a, b)
        f = cdf - u
        if abs(f) <= abs_tol:
            return x, lo, hi, OK
        if f < 0.0:
            lo = x
        else:
            hi = x
        dens = _beta_pdf(x, a, b)
        x_new = -1.0
        if dens > 0.0 and math.isfinite(dens):
            step = f / dens
            half_curv = 0.5 * step * ((a - 1.0) / x - (b - 1.0) / (1.0 - x))
            if abs(half_curv) < 0.5:
                x_new = x - step / (1.0 - half_curv)
            else:
                x_new = x - step
        if not (x_new > lo and x_new < hi):
            if hi < 0.01 and hi > 8.0 * lo:
                # deep lower tail (tiny alpha): bisect the exponent, since the
                # root may sit hundreds of binades below hi
                x_new = math.exp(0.5 * (math.log(max(lo, _SMALLEST)) + math.log(hi)))
            else:
                x_new = 0.5 * (lo + hi)
            if x_new == lo or x_new == hi:
                # bracket collapsed to adjacent doubles: the cdf jumps by more
                # than abs_tol between them, so return the closer endpoint
                return _closer_endpoint(u, a, b, lo, hi), lo, hi, OK
        x = x_new
    return x, lo, hi, NO_CONVERGENCE


@njit(cache=True, nogil=True)
def _ln_gamma_array(x, out):
    for i in range(x.size):
        out[i] = _ln_gamma(x[i])


@njit(cache=True, nogil=True)
def _ln_beta_array(a, b, out):
    for i in range(a.size):
        out[i] = _ln_beta(a[i], b[i])


@njit(cache=True, nogil=True)
def _reg_inc_beta_array(x, a, b, out, status):
    for i in range(x.size):
        out[i], status[i] = _reg_inc_beta(x[i], a[i], b[i])


@njit(cache=True, nogil=True)
def _beta_quantile_array(u, a, b, abs_tol, max_iter, out, lo, hi, status):
    for i in range(u.size):
        out[i], lo[i], hi[i], status[i] = _beta_quantile(u[i], a[i], b[i], abs_tol, max_iter)


# --------------------------------------------------------------------------- #
# public API
# --------------------------------------------------------------------------- #


def _check_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return arr


def _flat(*arrays):
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    flat = [np.ascontiguousarray(np.broadcast_to(a, shape), dtype=float).ravel() for a in arrays]
    return shape, flat


def _result(values, shape):
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    arr = _check_positive("x", x)
    shape, (flat,) = _flat(arr)
    out = np.empty(flat.size)
    _ln_gamma_array(flat, out)
    return _result(out, shape)


def ln_beta(alpha, beta):
    """``ln Be(alpha, beta) = ln G(alpha) + ln G(beta) - ln G(alpha + beta)``.

    The three Stirling expansions are combined before summation so the result
    stays accurate when ``alpha + beta`` is large.
    """
    a = _check_positive("alpha", alpha)
    b = _check_positive("beta", beta)
    shape, (fa, fb) = _flat(a, b)
    out = np.empty(fa.size)
    _ln_beta_array(fa, fb, out)
    return _result(out, shape)


def reg_inc_beta(x, alpha, beta):
    """Regularized incomplete beta function ``I_x(alpha, beta)``.

    Exact at the endpoints: ``I_0 = 0`` and ``I_1 = 1``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0) or np.any(xa > 1):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    a = _check_positive("alpha", alpha)
    b = _check_positive("beta", beta)
    shape, (fx, fa, fb) = _flat(xa, a, b)
    out = np.empty(fx.size)
    status = np.empty(fx.size, dtype=np.int64)
    _reg_inc_beta_array(fx, fa, fb, out, status)
    if np.any(status != OK):
        raise ConvergenceError("continued fraction for I_x(a, b) did not converge")
    return _result(out, shape)


def beta_quantile(u, alpha, beta, tol: ToleranceConfig = DEFAULT_TOLERANCE):
    """Inverse of :func:`reg_inc_beta` in its first argument.

    Returns ``x`` with ``|I_x(alpha, beta) - u| <= tol.abs_tol``.  ``u`` must
    lie strictly inside ``(0, 1)``.
    """
    ua = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(ua)) or np.any(ua <= 0) or np.any(ua >= 1):
        raise DomainError(f"u must lie in the open interval (0, 1), got {u!r}")
    a = _check_positive("alpha", alpha)
    b = _check_positive("beta", beta)
    shape, (fu, fa, fb) = _flat(ua, a, b)
    out = np.empty(fu.size)
    lo = np.empty(fu.size)
    hi = np.empty(fu.size)
    status = np.empty(fu.size, dtype=np.int64)
    _beta_quantile_array(fu, fa, fb, float(tol.abs_tol), int(tol.max_iter), out, lo, hi, status)
    bad = np.flatnonzero(status != OK)
    if bad.size:
        i = bad[0]
        raise ConvergenceError(
            f"beta_quantile({fu[i]!r}, {fa[i]!r}, {fb[i]!r}) did not reach "
            f"|I_x - u| <= {tol.abs_tol} within {tol.max_iter} iterations",
            bracket=(float(lo[i]), float(hi[i])),
        )
    return _result(out, shape)
