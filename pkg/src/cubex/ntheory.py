"""Exact integer arithmetic shared by the rest of the package.

Everything here works on Python integers; no floating point is involved.
Primorials are carried as a sorted prime list (``PrimorialSpec``) and never
multiplied out.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

import numpy as np

TRIAL_LIMIT = 10**6
MAX_FACTOR_INPUT = 2**63

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``value = prod p**e`` with primes ascending."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors!r}")
            last = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def tau(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    @property
    def phi(self) -> int:
        return math.prod((p - 1) * p ** (e - 1) for p, e in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]


@dataclass(frozen=True)
class PrimorialSpec:
    """The product of all primes up to ``bound``, stored as its prime list."""

    bound: float
    primes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("primorial bound must be nonnegative")
        object.__setattr__(self, "primes", tuple(primes_up_to(self.bound)))

    def __contains__(self, p: int) -> bool:
        # membership for primes only
        return 2 <= p <= math.floor(self.bound) and _is_small_prime(p)

    def gcd_with(self, n: int) -> int:
        """gcd(n, primorial) without forming the primorial."""
        g = 1
        for p in self.primes:
            if p > n:
                break
            if n % p == 0:
                g *= p
        return g


Modulus = Union[int, PrimorialSpec]


def _check_positive(n: int, name: str = "n") -> None:
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    is_p.flags.writeable = False
    return is_p


def _sieve_limit(n: int) -> int:
    # round up so repeated small requests share one table
    lim = 1024
    while lim < n:
        lim *= 4
    return lim


def _is_small_prime(p: int) -> bool:
    return bool(_sieve(_sieve_limit(p))[p])


def primes_up_to(bound: float) -> list[int]:
    """All primes ``p <= floor(bound)`` in ascending order."""
    if bound < 2:
        return []
    n = math.floor(bound)
    return np.flatnonzero(_sieve(_sieve_limit(n))[: n + 1]).tolist()


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes in the half-open interval ``(lo, hi]``."""
    return [p for p in primes_up_to(hi) if p > lo]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4096:
        return _is_small_prime(n)
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _split_large(d, out, rng)
    _split_large(n // d, out, rng)


def factorize(n: int) -> Factorization:
    """Factor ``1 <= n <= 2**63``.

    Trial division by primes up to 10**6, then Miller-Rabin / Pollard-Brent
    on whatever cofactor is left.
    """
    _check_positive(n)
    n = int(n)
    if n > MAX_FACTOR_INPUT:
        raise ValueError("factorize supports n <= 2**63")
    return _factorize_cached(n)


@lru_cache(maxsize=65536)
def _factorize_cached(n: int) -> Factorization:
    found: dict[int, int] = {}
    m = n
    limit = min(TRIAL_LIMIT, math.isqrt(m))
    if limit >= 2:
        for p in primes_up_to(limit):
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                found[p] = e
    if m > 1:
        if m < TRIAL_LIMIT * TRIAL_LIMIT:
            found[m] = found.get(m, 0) + 1
        else:
            # seeded so the factor order, and hence any caching, is reproducible
            _split_large(m, found, random.Random(m))
    return Factorization(n, tuple(sorted(found.items())))


def mobius(n: int) -> int:
    f = factorize(n)
    if not f.is_squarefree:
        return 0
    return -1 if f.omega % 2 else 1


def tau(n: int) -> int:
    return factorize(n).tau


def omega(n: int) -> int:
    return factorize(n).omega


def euler_phi(n: int) -> int:
    return factorize(n).phi


def divisors(n: int) -> list[int]:
    """Sorted list of all positive divisors of ``n``."""
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def squarefree_divisors(primes: Iterable[int], limit: float | None = None) -> Iterator[tuple[int, int]]:
    """Yield ``(d, mu(d))`` for squarefree ``d`` built from ``primes``.

    With ``limit`` set, only ``d <= limit`` are produced (the primes must be
    sorted ascending for the pruning to be complete).
    """
    ps = sorted(primes)

    def rec(start: int, d: int, sign: int):
        yield d, sign
        for i in range(start, len(ps)):
            nd = d * ps[i]
            if limit is not None and nd > limit:
                break
            yield from rec(i + 1, nd, -sign)

    yield from rec(0, 1, 1)


def modulus_primes(w: Modulus) -> tuple[int, ...]:
    """Prime factors of a squarefree modulus given as int or primorial."""
    if isinstance(w, PrimorialSpec):
        return w.primes
    f = factorize(w)
    if not f.is_squarefree:
        raise ValueError(f"w = {w} is not squarefree")
    return f.primes


def modulus_divisible_by(w: Modulus, p: int) -> bool:
    if isinstance(w, PrimorialSpec):
        return p in w
    return w % p == 0


def gcd_modulus(n: int, w: Modulus) -> int:
    """gcd(n, w) for an int or primorial ``w``."""
    if isinstance(w, PrimorialSpec):
        return w.gcd_with(n)
    return math.gcd(n, w)


def coprime_to_primorial(x: int, h: int, spec: PrimorialSpec) -> bool:
    """True iff no prime ``p <= spec.bound`` divides both ``x`` and ``h``."""
    _check_positive(x, "x")
    _check_positive(h, "h")
    return spec.gcd_with(math.gcd(x, h)) == 1


def smallest_prime_factor_table(n: int) -> np.ndarray:
    """``spf[k]`` = least prime factor of ``k`` for ``2 <= k <= n`` (0 for k < 2)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def integer_root(n: int, k: int) -> int:
    """Largest ``r >= 0`` with ``r**k <= n``."""
    if n < 0:
        raise ValueError("integer_root needs n >= 0")
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
