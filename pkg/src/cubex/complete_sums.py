"""Complete exponential sums modulo q.

Every sum here has integer phases ``r/q``.  Residues are reduced exactly in
integer arithmetic, tallied, and the tally is contracted against the q-th
roots of unity with ``math.fsum``.  Two routes exist for each sum: a literal
O(q) (or O(q^2)) summation, and a CRT route that factors q and multiplies
prime-power pieces.  ``method="auto"`` switches to CRT above ``FAST_ABOVE``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ntheory import (
    Modulus,
    PrimorialSpec,
    divisors,
    factorize,
    mobius,
    modulus_divisible_by,
    modulus_primes,
    smallest_prime_factor_table,
    squarefree_divisors,
)
from .phase import EPS

FAST_ABOVE = 10**4
DIRECT_PAIR_LIMIT = 4000  # largest q for the O(q^2) literal double sums

KappaSpec = Modulus


@dataclass(frozen=True)
class SumValue:
    value: complex
    terms: int
    err_budget: float

    def __complex__(self) -> complex:
        return complex(self.value)

    def __abs__(self) -> float:
        return abs(self.value)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __mul__(self, other: "SumValue") -> "SumValue":
        v = self.value * other.value
        err = (self.err_budget * abs(other.value) + other.err_budget * abs(self.value)
               + self.err_budget * other.err_budget)
        return SumValue(v, self.terms * other.terms, err + 4 * EPS * abs(v))


ONE = SumValue(1 + 0j, 1, 0.0)


def _require_modulus(q: int, name: str = "q") -> int:
    if q == 0:
        raise ValueError(f"{name} must be nonzero")
    q = int(q)
    if q < 0:
        raise ValueError(f"{name} must be positive, got {q}")
    return q


def _contract(counts: np.ndarray, q: int, terms: int) -> SumValue:
    """sum_k counts[k] * e(k/q), correctly rounded per component."""
    k = np.flatnonzero(counts)
    c = counts[k].astype(float)
    ang = (2.0 * math.pi / q) * k
    re = math.fsum((c * np.cos(ang)).tolist())
    im = math.fsum((c * np.sin(ang)).tolist())
    return SumValue(complex(re, im), terms, float(4.0 * EPS * terms))


def _cube_residues(q: int) -> np.ndarray:
    x = np.arange(q, dtype=np.int64)
    return (x * x % q) * x % q


def _tally(res: np.ndarray, q: int) -> np.ndarray:
    return np.bincount(res, minlength=q)


# ---------------------------------------------------------------------------
# literal evaluations

def _gauss_quad_direct(q: int, a1: int, a2: int) -> SumValue:
    x = np.arange(1, q + 1, dtype=np.int64)
    r = ((a1 % q) * x + (a2 % q) * (x * x % q)) % q
    return _contract(_tally(r, q), q, q)


def _hua_direct(q: int, a: int, b: int) -> SumValue:
    z = np.arange(1, q + 1, dtype=np.int64)
    r = ((a % q) * ((z * z % q) * z % q) + (b % q) * z) % q
    return _contract(_tally(r, q), q, q)


def _restricted_direct(r: int, b: int) -> SumValue:
    x = np.arange(1, r + 1, dtype=np.int64)
    x = x[np.gcd(x, r) == 1]
    res = (b % r) * ((x * x % r) * x % r) % r
    return _contract(_tally(res, r), r, len(x))


def _paired_W_direct(r: int, b: int) -> SumValue:
    if r > DIRECT_PAIR_LIMIT:
        raise ValueError(f"literal W double sum limited to r <= {DIRECT_PAIR_LIMIT}")
    x = np.arange(1, r + 1, dtype=np.int64)
    cubes = (b % r) * ((x * x % r) * x % r) % r
    g = np.gcd(x[:, None], np.gcd(x[None, :], r))
    diff = (cubes[:, None] - cubes[None, :]) % r
    sel = diff[g == 1]
    return _contract(_tally(sel, r), r, int(sel.size))


def _hua_T_direct(q: int, a: int, b: int) -> SumValue:
    if q > DIRECT_PAIR_LIMIT:
        raise ValueError(f"literal T double sum limited to q <= {DIRECT_PAIR_LIMIT}")
    k = np.arange(1, q + 1, dtype=np.int64)[:, None]
    z = np.arange(1, q + 1, dtype=np.int64)[None, :]
    k2 = k * k % q
    k3 = k2 * k % q
    inner = (k3 + 3 * (z * k2 % q) + 3 * ((z * z % q) * k % q)) % q
    r = ((a % q) * inner + (b % q) * k) % q
    return _contract(_tally(r.ravel(), q), q, q * q)


# ---------------------------------------------------------------------------
# CRT routes

def _crt_split(q: int) -> list[tuple[int, int]]:
    """[(p^e, q / p^e)] for the prime powers of q."""
    return [(pe, q // pe) for pe in factorize(q).prime_powers()]


@lru_cache(maxsize=200_000)
def _hua_pp(pe: int, a: int, b: int) -> SumValue:
    return _hua_direct(pe, a, b)


def _gauss_quad_crt(q, a1, a2):
    out = ONE
    for pe, rest in _crt_split(q):
        # x = rest*x1 + pe*x2: the quadratic coefficient picks up rest
        out = out * _gauss_quad_direct(pe, a1 % pe, (a2 * rest) % pe)
    return out


def _hua_crt(q, a, b):
    out = ONE
    for pe, rest in _crt_split(q):
        out = out * _hua_pp(pe, (a * rest * rest) % pe, b % pe)
    return out


def _restricted_crt(r, b):
    out = ONE
    for pe, rest in _crt_split(r):
        out = out * _restricted_direct(pe, (b * rest * rest) % pe)
    return out


def _paired_W_crt(r, b):
    out = ONE
    for pe, rest in _crt_split(r):
        out = out * _paired_W_direct(pe, (b * rest * rest) % pe)
    return out


def _hua_T_crt(q, a, b):
    out = ONE
    for pe, rest in _crt_split(q):
        out = out * _hua_T_direct(pe, (a * rest * rest) % pe, b % pe)
    return out


def _dispatch(direct, crt, q, args, method):
    if method == "direct":
        return direct(q, *args)
    if method == "crt":
        return crt(q, *args)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    return crt(q, *args) if q > FAST_ABOVE else direct(q, *args)


def gauss_quad(q: int, a1: int, a2: int, method: str = "auto") -> SumValue:
    """S(q, a1, a2) = sum_{x=1}^q e((a1 x + a2 x^2)/q)."""
    q = _require_modulus(q)
    return _dispatch(_gauss_quad_direct, _gauss_quad_crt, q, (int(a1), int(a2)), method)


def hua_sum(q: int, a: int, b: int = 0, method: str = "auto") -> SumValue:
    """U(q, a, b) = sum_{z=1}^q e((a z^3 + b z)/q); ``b=0`` is the cubic Gauss sum."""
    q = _require_modulus(q)
    return _dispatch(_hua_direct, _hua_crt, q, (int(a), int(b)), method)


def restricted_cubic_sum(r: int, b: int, method: str = "auto") -> SumValue:
    """U*(r, b): the cubic Gauss sum over x coprime to r."""
    r = _require_modulus(r, "r")
    return _dispatch(_restricted_direct, _restricted_crt, r, (int(b),), method)


def paired_sum_W(r: int, b: int, method: str = "auto") -> SumValue:
    """W(r, b) = sum over x, y mod r with (x, y, r) = 1 of e(b(x^3 - y^3)/r)."""
    r = _require_modulus(r, "r")
    if method == "auto":
        method = "crt" if r > 200 else "direct"
    return _dispatch(_paired_W_direct, _paired_W_crt, r, (int(b),), method)


def paired_sum_W_divisor_form(r: int, b: int) -> complex:
    """W(r, b) rebuilt as sum_{d | r} mu(d) d^-2 |U(r, b d^3)|^2."""
    r = _require_modulus(r, "r")
    terms = []
    for d in divisors(r):
        mu = mobius(d)
        if mu:
            terms.append(mu * abs(hua_sum(r, b * d**3).value) ** 2 / d**2)
    return complex(math.fsum(terms), 0.0)


def hua_T(q: int, a: int, b: int, method: str = "auto") -> SumValue:
    """T(q, a, b): the double sum over k, z of e((a(k^3+3zk^2+3z^2k) + bk)/q)."""
    q = _require_modulus(q)
    if method == "auto":
        method = "crt" if q > 200 else "direct"
    return _dispatch(_hua_T_direct, _hua_T_crt, q, (int(a), int(b)), method)


def w_prime_power_decomposition(p: int, l: int, b: int) -> complex:
    """Right-hand side of the split of W(p^l, b) by whether p | x.

    U*(p^l, b) U(p^l, -b) + U*(p^l, -b) * sum_{p | x} e(b x^3 / p^l).
    """
    q = p**l
    x = np.arange(p, q + 1, p, dtype=np.int64)
    res = (b % q) * ((x * x % q) * x % q) % q
    div_part = _contract(_tally(res, q), q, len(x)).value
    return (restricted_cubic_sum(q, b).value * hua_sum(q, -b).value
            + restricted_cubic_sum(q, -b).value * div_part)


# ---------------------------------------------------------------------------
# batched tables for sweeps (FFT over the linear coefficient)

def gauss_quad_table(q: int) -> np.ndarray:
    """``S[a1, a2]`` for all residues, via an inverse FFT in a1."""
    x = np.arange(q, dtype=np.int64)
    sq = x * x % q
    a2 = np.arange(q, dtype=np.int64)[None, :]
    v = np.exp((2j * math.pi / q) * ((a2 * sq[:, None]) % q))  # rows x, cols a2
    return q * np.fft.ifft(v, axis=0)


def hua_table(q: int, coeffs: np.ndarray | None = None) -> np.ndarray:
    """``U[i, b] = U(q, coeffs[i], b)`` for all b (default coeffs = 0..q-1)."""
    if coeffs is None:
        coeffs = np.arange(q, dtype=np.int64)
    cubes = _cube_residues(q)
    v = np.exp((2j * math.pi / q) * ((np.asarray(coeffs, dtype=np.int64)[:, None] % q) * cubes[None, :] % q))
    return q * np.fft.ifft(v, axis=1)


def cubic_gauss_row(q: int) -> np.ndarray:
    """``U(q, c)`` for c = 0..q-1."""
    cubes = _cube_residues(q)
    counts = np.bincount(cubes, minlength=q).astype(float)
    # U(q, c) = sum_k counts[k] e(ck/q): a length-q DFT of the cube tally
    return q * np.fft.ifft(counts)


# ---------------------------------------------------------------------------
# kappa_w

def _kappa_sq_pp(p: int, l: int, p_divides_w: bool) -> Fraction:
    if l == 0:
        return Fraction(1)
    if p_divides_w:
        if p == 3:
            return Fraction({1: 4, 2: 1}.get(l, 0))
        return Fraction(4, p) if l == 1 else Fraction(0)
    m, r = divmod(l, 3)
    if r == 0:
        return Fraction(1, p ** (2 * m))
    if r == 1:
        return Fraction(4, p ** (2 * m + 1))
    return Fraction(1, p ** (2 * m + 2))


def _check_w(w: Modulus) -> None:
    if isinstance(w, PrimorialSpec):
        return
    if w < 1 or mobius(w) == 0:
        raise ValueError(f"w must be a squarefree positive integer, got {w}")


def kappa_sq(q: int, w: Modulus = 1) -> Fraction:
    """kappa_w(q)^2 exactly (it is always rational)."""
    _require_modulus(q)
    _check_w(w)
    out = Fraction(1)
    for p, e in factorize(q).factors:
        out *= _kappa_sq_pp(p, e, modulus_divisible_by(w, p))
        if not out:
            break
    return out


def kappa(q: int, w: Modulus = 1) -> float:
    k2 = kappa_sq(q, w)
    return math.sqrt(k2.numerator) / math.sqrt(k2.denominator)


def kappa_sq_table(n: int, w: Modulus = 1) -> tuple[np.ndarray, np.ndarray]:
    """Exact kappa_w(q)^2 = num[q] / den[q] in lowest terms for all q <= n.

    A zero value has num = 0, den = 1.  Built by sweeping prime powers;
    entry 0 is unused.
    """
    _check_w(w)
    num = np.ones(n + 1, dtype=np.int64)
    den = np.ones(n + 1, dtype=np.int64)
    spf = smallest_prime_factor_table(n)
    primes = np.flatnonzero(spf == np.arange(n + 1))
    primes = primes[primes >= 2]
    for p in primes.tolist():
        pw = modulus_divisible_by(w, p)
        prev = Fraction(1)
        pl, l = p, 1
        while pl <= n:
            cur = _kappa_sq_pp(p, l, pw)
            sl = slice(pl, n + 1, pl)
            if cur == 0:
                num[sl] = 0
                den[sl] = 1
                break
            # multiples of p^l trade the p^(l-1) factor for the p^l one
            step = cur / prev
            num[sl] *= step.numerator
            den[sl] *= step.denominator
            g = np.gcd(num[sl], den[sl])
            num[sl] //= g
            den[sl] //= g
            prev = cur
            pl *= p
            l += 1
    return num, den


# ---------------------------------------------------------------------------
# local factors

def _check_coprime(a: int, q: int) -> None:
    if math.gcd(a, q) != 1:
        raise ValueError(f"(a, q) = ({a}, {q}) is not coprime")


def local_series(a: int, q: int, w: Modulus = 1, method: str = "factored") -> float:
    """The local factor  sum_{d | w} mu(d) (q d)^-2 |U(q, a d^3)|^2.

    ``method="literal"`` runs over every squarefree divisor of ``w``;
    ``"factored"`` only over divisors built from primes dividing q, with the
    rest collapsing to prod (1 - p^-2) because U(q, a d^3) = U(q, a) when
    (d, q) = 1.
    """
    q = _require_modulus(q)
    _check_coprime(a, q)
    _check_w(w)
    primes = modulus_primes(w)
    if method == "literal":
        ds = list(squarefree_divisors(primes))
        tail = 1.0
    elif method == "factored":
        inside = [p for p in primes if q % p == 0]
        ds = list(squarefree_divisors(inside))
        tail = math.prod(1.0 - 1.0 / (p * p) for p in primes if q % p)
    else:
        raise ValueError(f"unknown method {method!r}")
    terms = [mu * abs(hua_sum(q, a * d**3).value) ** 2 / (d * d) for d, mu in ds]
    return math.fsum(terms) * tail / (q * q)


def divisor_set_D(beta: float, P: float, w: Modulus) -> list[tuple[int, int]]:
    """``(d, mu(d))`` for d | w with d <= sqrt(P) and d|beta| <= 1/(48 P^2)."""
    H = math.sqrt(P)
    limit = H
    if beta != 0:
        limit = min(limit, 1.0 / (48.0 * P * P * abs(beta)))
    ds = [(d, mu) for d, mu in squarefree_divisors(modulus_primes(w), limit)
          if d * d <= P and (beta == 0 or 48.0 * P * P * d * abs(beta) <= 1.0)]
    return sorted(ds)


def local_series_D(a: int, q: int, w: Modulus, beta: float, P: float) -> float:
    """The truncated local factor over d in D(alpha, w)."""
    q = _require_modulus(q)
    _check_coprime(a, q)
    _check_w(w)
    terms = [mu * abs(hua_sum(q, a * d**3).value) ** 2 / (d * d)
             for d, mu in divisor_set_D(beta, P, w)]
    return math.fsum(terms) / (q * q)
