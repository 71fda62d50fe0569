"""Phase arithmetic and the compiled summation kernels.

A frequency ``alpha`` is carried as ``num/den + beta``: an exact rational
part and a double ``beta``.  For an integer multiplier ``m`` the fractional
part of ``alpha * m`` is formed as ``(num * m mod den) / den`` plus the
fractional part of ``beta * m`` evaluated in double-double arithmetic, so the
phase error stays near one ulp of 1 even when ``m`` is ~1e15.

Inner loops over ``x`` use a rotor recurrence for the quadratic phase
(two complex multiplications per term) and re-anchor from an exactly reduced
phase every ``ANCHOR`` steps.  The step rotor is itself a recurrence, so it
is re-anchored every ``STEP_ANCHOR`` steps; otherwise its drift feeds the
value rotor and the error grows quadratically within an anchor block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

ANCHOR = 1024
STEP_ANCHOR = 64
EPS = np.finfo(float).eps
MAX_EXACT_MULTIPLIER = 2**53
TWO_PI = 2.0 * math.pi

# per-term rounding allowance: a few ulps for the anchor, plus the value
# rotor drift, which picks up at most (STEP_ANCHOR + 4) ulps per step
TERM_ERR = EPS * (4 + (STEP_ANCHOR + 4) * ANCHOR)


@dataclass(frozen=True)
class Phase:
    """``num/den + beta`` with ``0 <= num < den``."""

    num: int
    den: int
    beta: float

    def __post_init__(self):
        if self.den < 1 or self.den >= 2**31:
            raise ValueError("rational part needs 1 <= den < 2**31")
        if not 0 <= self.num < self.den:
            object.__setattr__(self, "num", self.num % self.den)

    def scaled(self, k: int) -> "Phase":
        """Exact integer multiple ``k * alpha`` when ``k`` divides out cleanly.

        The rational part is scaled exactly; the double part is scaled in
        floating point, so callers that need exactness pass ``k`` to the
        kernels as an integer multiplier instead.
        """
        return Phase((self.num * k) % self.den, self.den, self.beta * k)

    def __float__(self) -> float:
        return self.num / self.den + self.beta

    def negated(self) -> "Phase":
        return Phase((-self.num) % self.den, self.den, -self.beta)


def as_phase(alpha) -> Phase:
    """Accept a float, int, Fraction, Phase, or anything with ``a``, ``q``, ``beta``."""
    if isinstance(alpha, Phase):
        return alpha
    if isinstance(alpha, Fraction):
        if alpha.denominator < 2**31:
            return Phase(alpha.numerator % alpha.denominator, alpha.denominator, 0.0)
        return _float_phase(float(alpha))
    if hasattr(alpha, "a") and hasattr(alpha, "q") and hasattr(alpha, "beta"):
        return Phase(int(alpha.a) % int(alpha.q), int(alpha.q), float(alpha.beta))
    if isinstance(alpha, (int, np.integer)):
        return Phase(0, 1, 0.0)
    return _float_phase(float(alpha))


def _float_phase(a: float) -> Phase:
    if not math.isfinite(a):
        raise ValueError("alpha must be finite")
    # a - floor(a) is exact for doubles; integer shifts never change a phase
    return Phase(0, 1, a - math.floor(a))


# ---------------------------------------------------------------------------
# compiled helpers

_SPLIT = 134217729.0  # 2**27 + 1


@numba.njit(cache=True, nogil=True, inline="always")
def _two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@numba.njit(cache=True, nogil=True)
def frac_mul(num, den, beta, m):
    """Fractional part of ``(num/den + beta) * m`` for integer ``m``, in [0, 1)."""
    r = ((m % den) * num) % den
    f = r / den
    if beta != 0.0:
        p, e = _two_prod(beta, float(m))
        f += (p - math.floor(p)) + e
    return f - math.floor(f)


@numba.njit(cache=True, nogil=True, inline="always")
def _cis(t):
    a = TWO_PI * t
    return math.cos(a), math.sin(a)


@numba.njit(cache=True, nogil=True)
def _quad_run(n1, d1, b1, n2, d2, b2, k0, k1, k2, x_lo, x_hi, mask_primes, n_mask):
    """Kahan-summed  sum_{x_lo<=x<=x_hi} e(alpha1*(k1*x + k0) + alpha2*k2*x^2).

    ``alpha1`` multiplies the integer ``k1*x + k0`` and ``alpha2`` multiplies
    ``k2*x^2``; both multipliers are formed exactly.  Terms with ``x``
    divisible by any of the first ``n_mask`` entries of ``mask_primes`` are
    skipped (the rotor still advances).
    """
    sr = 0.0
    si = 0.0
    cr_ = 0.0
    ci_ = 0.0
    x = x_lo
    # rotor step multiplier: theta(x+1)-theta(x) = a1*k1 + a2*k2*(2x+1)
    while x <= x_hi:
        zr, zi = _cis(frac_mul(n1, d1, b1, k1 * x + k0) + frac_mul(n2, d2, b2, k2 * x * x))
        gr, gi = _cis(frac_mul(n2, d2, b2, 2 * k2))
        stop = min(x_hi, x + ANCHOR - 1)
        while x <= stop:
            rr, ri = _cis(frac_mul(n1, d1, b1, k1) + frac_mul(n2, d2, b2, k2 * (2 * x + 1)))
            sub = min(stop, x + STEP_ANCHOR - 1)
            while x <= sub:
                keep = True
                for j in range(n_mask):
                    if x % mask_primes[j] == 0:
                        keep = False
                        break
                if keep:
                    y = zr - cr_
                    t = sr + y
                    cr_ = (t - sr) - y
                    sr = t
                    y = zi - ci_
                    t = si + y
                    ci_ = (t - si) - y
                    si = t
                zr, zi = zr * rr - zi * ri, zr * ri + zi * rr
                rr, ri = rr * gr - ri * gi, rr * gi + ri * gr
                x += 1
    return sr, si


@numba.njit(cache=True, nogil=True)
def cubic_rows(num, den, beta, scale, x_lo, x_hi, h_hi, w_primes, constrained):
    """Per-``h`` partial sums of  e(alpha * scale * h(3x^2 + 3xh + h^2)).

    Returns two arrays (real, imag) of length ``h_hi``; entry ``h-1`` is the
    sum over ``x_lo <= x <= x_hi``.  With ``constrained`` set, ``x`` sharing
    a prime of ``w_primes`` with ``h`` is skipped.
    """
    out_r = np.zeros(h_hi)
    out_i = np.zeros(h_hi)
    mask = np.empty(w_primes.shape[0], dtype=np.int64)
    for h in range(1, h_hi + 1):
        n_mask = 0
        if constrained:
            for j in range(w_primes.shape[0]):
                if h % w_primes[j] == 0:
                    mask[n_mask] = w_primes[j]
                    n_mask += 1
        # phase = alpha*scale*(h^3 + 3h^2 x + 3h x^2)
        s = scale * h
        re, im = _quad_run(num, den, beta, num, den, beta,
                           s * h * h, 3 * s * h, 3 * s, x_lo, x_hi, mask, n_mask)
        out_r[h - 1] = re
        out_i[h - 1] = im
    return out_r, out_i


@numba.njit(cache=True, nogil=True)
def quadratic_sum(n1, d1, b1, n2, d2, b2, x_lo, x_hi):
    empty = np.empty(0, dtype=np.int64)
    return _quad_run(n1, d1, b1, n2, d2, b2, 0, 1, 1, x_lo, x_hi, empty, 0)


@numba.njit(cache=True, nogil=True)
def frac_mul_array(num, den, beta, ms):
    out = np.empty(ms.shape[0])
    for i in range(ms.shape[0]):
        out[i] = frac_mul(num, den, beta, ms[i])
    return out


def check_multiplier(m_max: int) -> None:
    if m_max >= MAX_EXACT_MULTIPLIER:
        raise OverflowError(
            f"phase multiplier {m_max} exceeds 2**53; outside exact-phase range")
