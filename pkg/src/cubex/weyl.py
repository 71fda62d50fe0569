"""Incomplete Weyl-type sums: quadratic f and g, the differenced cubic sum G,
and F_w both literally and through Moebius inversion over w.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .complete_sums import SumValue
from .ntheory import Modulus, PrimorialSpec, modulus_primes, squarefree_divisors
from .phase import TERM_ERR, as_phase, check_multiplier, cubic_rows, frac_mul, _quad_run


@dataclass(frozen=True)
class WeylParams:
    """Main parameter P, with H = sqrt(P), and the squarefree modulus w."""

    P: float
    w: Modulus = 1

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("P must be >= 1")
        if not isinstance(self.w, PrimorialSpec):
            modulus_primes(self.w)  # raises unless squarefree

    @property
    def H(self) -> float:
        return math.sqrt(self.P)

    @property
    def w_primes(self) -> tuple[int, ...]:
        return modulus_primes(self.w)


def floor_div(X, d: int = 1) -> int:
    """floor(X / d) in exact arithmetic for int, float or Fraction X."""
    return math.floor(Fraction(X) / d)


def h_limit(P, d: int = 1) -> int:
    """Largest h with (h d)^2 <= P, i.e. floor(sqrt(P) / d)."""
    return math.isqrt(math.floor(Fraction(P))) // d


def _sumvalue(re_parts, im_parts, terms: int) -> SumValue:
    re = math.fsum(np.asarray(re_parts).tolist())
    im = math.fsum(np.asarray(im_parts).tolist())
    return SumValue(complex(re, im), terms, float(TERM_ERR * terms))


def _quad(alpha1, alpha2, x_lo: int, x_hi: int, k1: int = 1, k2: int = 1, k0: int = 0) -> SumValue:
    if x_hi < x_lo:
        return SumValue(0j, 0, 0.0)
    check_multiplier(max(abs(k1) * x_hi + abs(k0), abs(k2) * x_hi * x_hi))
    a1, a2 = as_phase(alpha1), as_phase(alpha2)
    empty = np.empty(0, dtype=np.int64)
    re, im = _quad_run(a1.num, a1.den, a1.beta, a2.num, a2.den, a2.beta,
                       k0, k1, k2, x_lo, x_hi, empty, 0)
    n = x_hi - x_lo + 1
    return SumValue(complex(re, im), n, float(TERM_ERR * n))


def quad_f(alpha1, alpha2, X, mult: tuple[int, int] = (1, 1)) -> SumValue:
    """f = sum_{1 <= x <= X} e(alpha1 x + alpha2 x^2).

    ``mult=(k1, k2)`` scales the frequencies by exact integers, i.e. sums
    e(alpha1 k1 x + alpha2 k2 x^2).
    """
    if X < 1:
        raise ValueError("X must be >= 1")
    return _quad(alpha1, alpha2, 1, floor_div(X), *mult)


def quad_g(alpha1, alpha2, X, mult: tuple[int, int] = (1, 1)) -> SumValue:
    """g = sum over X < x <= 2X of e(alpha1 x + alpha2 x^2)."""
    if X < 1:
        raise ValueError("X must be >= 1")
    return _quad(alpha1, alpha2, floor_div(X) + 1, floor_div(2 * Fraction(X)), *mult)


def _cubic(alpha, x_lo: int, x_hi: int, h_hi: int, scale: int,
           w_primes: Sequence[int] = (), constrained: bool = False):
    if h_hi < 1 or x_hi < x_lo:
        return np.zeros(max(h_hi, 0)), np.zeros(max(h_hi, 0)), 0
    check_multiplier(scale * h_hi * (3 * x_hi * x_hi + 3 * x_hi * h_hi + h_hi * h_hi))
    ph = as_phase(alpha)
    primes = np.asarray([p for p in w_primes if p <= h_hi], dtype=np.int64)
    re, im = cubic_rows(ph.num, ph.den, ph.beta, scale, x_lo, x_hi, h_hi, primes, constrained)
    return re, im, h_hi * (x_hi - x_lo + 1)


def cubic_G(alpha, X, Y, scale: int = 1, strict: bool = True) -> SumValue:
    """G(alpha; X, Y) = sum_{h <= Y} sum_{X < x <= 2X} e(alpha h(3x^2 + 3xh + h^2)).

    ``scale`` multiplies alpha by an exact integer (used for alpha d^3).
    """
    if Y < 1:
        raise ValueError("Y must be >= 1")
    if Y > X:
        if strict:
            raise ValueError(f"need 1 <= Y <= X, got X={X}, Y={Y}")
        warnings.warn(f"cubic_G evaluated outside 1 <= Y <= X (X={X}, Y={Y})", stacklevel=2)
    re, im, n = _cubic(alpha, floor_div(X) + 1, floor_div(2 * Fraction(X)), floor_div(Y), scale)
    return _sumvalue(re, im, n)


def cubic_G_rows(alpha, X, Y, scale: int = 1) -> np.ndarray:
    """Complex per-h contributions to G, index h-1."""
    re, im, _ = _cubic(alpha, floor_div(X) + 1, floor_div(2 * Fraction(X)), floor_div(Y), scale)
    return re + 1j * im


def F_w_direct(alpha, params: WeylParams) -> SumValue:
    """Literal double sum over h <= H, P < x <= 2P with (x, h, w) = 1."""
    P = params.P
    re, im, _ = _cubic(alpha, floor_div(P) + 1, floor_div(2 * Fraction(P)), h_limit(P), 1,
                       params.w_primes, True)
    terms = F_w_term_count(params)
    return _sumvalue(re, im, terms)


def F_w_term_count(params: WeylParams) -> int:
    """F_w(0): the number of pairs (h, x) with (x, h, w) = 1."""
    P = params.P
    x_lo, x_hi = floor_div(P) + 1, floor_div(2 * Fraction(P))
    total = 0
    for h in range(1, h_limit(P) + 1):
        ps = [p for p in params.w_primes if h % p == 0]
        # inclusion-exclusion over the primes shared with h
        for d, mu in squarefree_divisors(ps):
            total += mu * (x_hi // d - (x_lo - 1) // d)
    return total


def mobius_terms(params: WeylParams) -> list[tuple[int, int]]:
    """(d, mu(d)) for d | w with d <= H; larger d contribute nothing."""
    return list(squarefree_divisors(params.w_primes, params.H))


def F_w_mobius(alpha, params: WeylParams) -> SumValue:
    """F_w as sum_{d | w} mu(d) G(alpha d^3; P/d, H/d)."""
    P = params.P
    re_parts, im_parts, terms = [], [], 0
    for d, mu in mobius_terms(params):
        re, im, n = _cubic(alpha, floor_div(P, d) + 1, floor_div(2 * Fraction(P), d),
                           h_limit(P, d), d**3)
        re_parts.extend((mu * re).tolist())
        im_parts.extend((mu * im).tolist())
        terms += n
    return _sumvalue(re_parts, im_parts, terms)


def F_w_h_expansion(alpha, params: WeylParams) -> SumValue:
    """F_w rebuilt row by row as  sum_d mu(d) sum_{h <= H/d} e(alpha d^3 h^3) g(3 alpha d^3 h^2, 3 alpha d^3 h; P/d).

    Each inner g is evaluated as a separate quadratic Weyl sum; this is the
    rearrangement the major-arc analysis starts from.
    """
    P = params.P
    ph = as_phase(alpha)
    re_parts, im_parts, terms = [], [], 0
    for d, mu in mobius_terms(params):
        d3 = d**3
        X = Fraction(P) / d
        for h in range(1, h_limit(P, d) + 1):
            g = quad_g(ph, ph, X, mult=(3 * d3 * h * h, 3 * d3 * h))
            t = 2 * math.pi * frac_mul(ph.num, ph.den, ph.beta, d3 * h**3)
            v = mu * complex(math.cos(t), math.sin(t)) * g.value
            re_parts.append(v.real)
            im_parts.append(v.imag)
            terms += g.terms
    return _sumvalue(re_parts, im_parts, terms)


def F_w(alpha, params: WeylParams, method: str = "mobius") -> SumValue:
    if method == "mobius":
        return F_w_mobius(alpha, params)
    if method == "direct":
        return F_w_direct(alpha, params)
    raise ValueError(f"unknown method {method!r}")


def F_w_many(alphas: Iterable, params: WeylParams, threads: int = 1,
             method: str = "mobius") -> list[SumValue]:
    """Evaluate F_w over many alphas; results come back in input order."""
    alphas = list(alphas)
    if threads <= 1 or len(alphas) < 2:
        return [F_w(a, params, method) for a in alphas]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: F_w(a, params, method), alphas))
