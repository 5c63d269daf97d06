"""Counter-based random numbers and the exact Beta / Binomial variate kernels.

Every random quantity in the package is a pure function of
``(seed, stream, variate index, lane)`` evaluated with Philox4x32-10, so draws
never depend on execution order or thread count.

Counter layout (frozen, see ``ALGORITHM``)::

    key      = (seed & 0xffffffff, seed >> 32)
    counter  = (variate index, lane, stream & 0xffffffff, stream >> 32)

``lane`` is the rejection attempt number for Beta variates (< 2**31),
``BINOMIAL_LANE`` for the uniform that drives binomial inversion and
``DERIVE_LANE`` for deriving child keys.  One Philox block yields two
53-bit uniforms on the open interval (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError
from .specfun import _ibeta_front, _reg_inc_beta

ALGORITHM = "philox4x32-10/cheng-bb-bc/binomial-mode-inversion/v1"

_U64 = 2**64
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)
_LO32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)

BINOMIAL_LANE = 0x80000000
DERIVE_LANE = 0xFFFFFFFF
_MAX_ATTEMPTS = 0x7FFFFFFF
_LN4 = math.log(4.0)
_BELOW_ONE = 1.0 - 2.0**-53
_SMALLEST = 5e-324


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit seed plus a 64-bit substream index."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise DomainError(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) < _U64:
                raise DomainError(f"{name} must lie in [0, 2**64), got {value!r}")

    @property
    def key(self) -> tuple[int, int]:
        return self.seed & 0xFFFFFFFF, self.seed >> 32

    @property
    def stream_words(self) -> tuple[int, int]:
        return self.stream & 0xFFFFFFFF, self.stream >> 32

    def child(self) -> RngSeed:
        """Seed whose key is derived from this (seed, stream) pair.

        Substreams of the child are independent of every substream of the
        parent, which lets a driver hand out its own stream indices.
        """
        k0, k1 = self.key
        s0, s1 = self.stream_words
        w0, w1, _, _ = philox4x32(0, DERIVE_LANE, s0, s1, k0, k1)
        return RngSeed(seed=(int(w1) << 32) | int(w0), stream=0)


@njit(cache=True, nogil=True)
def _philox(c0, c1, c2, c3, k0, k1):
    c0 = np.uint32(c0)
    c1 = np.uint32(c1)
    c2 = np.uint32(c2)
    c3 = np.uint32(c3)
    k0 = np.uint32(k0)
    k1 = np.uint32(k1)
    for _ in range(10):
        p0 = np.uint64(c0) * _M0
        p1 = np.uint64(c2) * _M1
        hi0 = np.uint32(p0 >> _SH32)
        lo0 = np.uint32(p0 & _LO32)
        hi1 = np.uint32(p1 >> _SH32)
        lo1 = np.uint32(p1 & _LO32)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = np.uint32(k0 + _W0)
        k1 = np.uint32(k1 + _W1)
    return c0, c1, c2, c3


def philox4x32(c0, c1, c2, c3, k0, k1) -> tuple[int, int, int, int]:
    """One Philox4x32-10 block as four Python ints."""
    return tuple(int(w) for w in _philox(c0, c1, c2, c3, k0, k1))


@njit(cache=True, nogil=True)
def _to_open_unit(hi, lo):
    # 53 random bits, offset by half an ulp so 0 and 1 never occur
    bits = (np.uint64(hi) >> np.uint64(5)) * np.uint64(67108864) + (np.uint64(lo) >> np.uint64(6))
    return (float(bits) + 0.5) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True)
def _uniform_pair(k0, k1, s0, s1, index, lane):
    w0, w1, w2, w3 = _philox(index, lane, s0, s1, k0, k1)
    return _to_open_unit(w0, w1), _to_open_unit(w2, w3)


@njit(cache=True, nogil=True)
def _clamp_open(x):
    # tiny shapes put mass within rounding distance of 0 or 1; keep variates
    # on the open interval by snapping to the nearest interior double
    if x >= 1.0:
        return _BELOW_ONE
    if x <= 0.0:
        return _SMALLEST
    return x


@njit(cache=True, nogil=True)
def _beta_variate(k0, k1, s0, s1, index, alpha, beta):
    """Cheng (1978) rejection: algorithm BB if min(alpha, beta) > 1, else BC."""
    lo = min(alpha, beta)
    hi = max(alpha, beta)
    total = alpha + beta
    if lo > 1.0:
        bb = math.sqrt((total - 2.0) / (2.0 * lo * hi - total))
        gam = lo + 1.0 / bb
        for attempt in range(_MAX_ATTEMPTS):
            u1, u2 = _uniform_pair(k0, k1, s0, s1, index, attempt)
            v = bb * math.log(u1 / (1.0 - u1))
            w = lo * math.exp(v)
            z = u1 * u1 * u2
            r = gam * v - _LN4
            s = lo + r - w
            if s + 2.609438 >= 5.0 * z:
                break
            t = math.log(z)
            if s >= t:
                break
            if r + total * math.log(total / (hi + w)) >= t:
                break
        if lo == alpha:
            return _clamp_open(w / (hi + w))
        return _clamp_open(hi / (hi + w))

    # BC: roles swapped, hi is the shape that gets the exponential tilt
    bb = 1.0 / lo
    delta = 1.0 + hi - lo
    k1c = delta * (0.0138889 + 0.0416667 * lo) / (hi * bb - 0.777778)
    k2c = 0.25 + (0.5 + 0.25 / delta) * lo
    w = 0.0
    for attempt in range(_MAX_ATTEMPTS):
        u1, u2 = _uniform_pair(k0, k1, s0, s1, index, attempt)
        if u1 < 0.5:
            y = u1 * u2
            z = u1 * y
            if 0.25 * u2 + z - y >= k1c:
                continue
        else:
            z = u1 * u1 * u2
            if z <= 0.25:
                v = bb * math.log(u1 / (1.0 - u1))
                w = hi * math.exp(v)
                break
            if z >= k2c:
                continue
        v = bb * math.log(u1 / (1.0 - u1))
        w = hi * math.exp(v)
        if total * (math.log(total / (lo + w)) + v) - 1.3862944 >= math.log(z):
            break
    if math.isinf(w):
        return _BELOW_ONE if hi == alpha else _SMALLEST
    if hi == alpha:
        return _clamp_open(w / (lo + w))
    return _clamp_open(lo / (lo + w))


@njit(cache=True, nogil=True)
def _binomial_pmf_at(k, m, p, q):
    # C(m, k) p^k q^(m-k) through the incomplete-beta prefactor
    return _ibeta_front(p, q, k + 1.0, m - k + 1.0) / ((m + 1.0) * p * q)


@njit(cache=True, nogil=True)
def _binomial_variate(k0, k1, s0, s1, index, m, p):
    """Exact Binomial(m, p) by cdf inversion started at the mode."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return m
    u, _ = _uniform_pair(k0, k1, s0, s1, index, BINOMIAL_LANE)
    q = 1.0 - p
    k = int(math.floor((m + 1) * p))
    if k > m:
        k = m
    pk = _binomial_pmf_at(k, m, p, q)
    if k < m:
        cdf, _st = _reg_inc_beta(q, float(m - k), float(k + 1))
    else:
        cdf = 1.0
    if u <= cdf:
        while k > 0:
            below = cdf - pk
            if u > below:
                return k
            pk = pk * k / (m - k + 1.0) * q / p
            cdf = below
            k -= 1
        return 0
    while k < m:
        pk = pk * (m - k) / (k + 1.0) * p / q
        cdf += pk
        k += 1
        if u <= cdf:
            return k
    return m


@njit(cache=True, nogil=True)
def fill_beta(k0, k1, s0, s1, alpha, beta, out):
    for i in range(out.size):
        out[i] = _beta_variate(k0, k1, s0, s1, i, alpha, beta)


@njit(cache=True, nogil=True)
def fill_beta_binomial(k0, k1, s0, s1, m, alpha, beta, out):
    for i in range(out.size):
        p = _beta_variate(k0, k1, s0, s1, i, alpha, beta)
        out[i] = _binomial_variate(k0, k1, s0, s1, i, m, p)


@njit(cache=True, nogil=True)
def fill_binomial(k0, k1, s0, s1, m, p, out):
    for i in range(out.size):
        out[i] = _binomial_variate(k0, k1, s0, s1, i, m, p)
