"""Representation counts for p^3 + z, their moments, and the density bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .ntheory import integer_root, primes_in


@dataclass(frozen=True)
class IntegerSet:
    N: int
    elements: np.ndarray
    label: str

    def __post_init__(self):
        e = np.asarray(self.elements, dtype=np.int64)
        if e.size and (e[0] < 1 or e[-1] > self.N or np.any(np.diff(e) <= 0)):
            raise ValueError("elements must be sorted, unique, and lie in [1, N]")
        object.__setattr__(self, "elements", e)

    def __len__(self) -> int:
        return int(self.elements.size)

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(self.elements, n)
        return bool(i < self.elements.size and self.elements[i] == n)


def _finish(values, N: int, label: str) -> IntegerSet:
    v = np.unique(np.asarray(values, dtype=np.int64))
    v = v[(v >= 1) & (v <= N)]
    return IntegerSet(N, v, label)


def kth_powers(k: int, N: int) -> IntegerSet:
    top = integer_root(N, k)
    return _finish(np.arange(1, top + 1, dtype=np.int64) ** k, N, f"kth_powers({k})")


def two_cubes(N: int) -> IntegerSet:
    """{x^3 + y^3 <= N : x, y >= 1}; numbers with two representations appear once."""
    top = integer_root(N, 3)
    x = np.arange(1, top + 1, dtype=np.int64) ** 3
    s = np.add.outer(x, x).ravel()
    return _finish(s[s <= N], N, "two_cubes")


def random_density(delta: float, N: int, seed: int = 0) -> IntegerSet:
    """Each n <= N kept independently with probability min(1, delta n^(delta - 1))."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    n = np.arange(1, N + 1, dtype=float)
    p = np.minimum(1.0, delta * n ** (delta - 1.0))
    keep = np.random.default_rng(seed).random(N) < p
    return IntegerSet(N, np.flatnonzero(keep).astype(np.int64) + 1, f"random_density({delta},{seed})")


def generate_set(kind: str, N: int, k: int = 2, delta: float = 0.5, seed: int = 0,
                 values: Iterable[int] | None = None) -> IntegerSet:
    if N < 2:
        raise ValueError("N must be >= 2")
    if kind == "kth_powers":
        return kth_powers(k, N)
    if kind == "two_cubes":
        return two_cubes(N)
    if kind == "random_density":
        return random_density(delta, N, seed)
    if kind == "explicit":
        return _finish(list(values or []), N, "explicit")
    raise ValueError(f"unknown set kind {kind!r}")


# ---------------------------------------------------------------------------
# p^3 + z counts

def prime_window(N: int) -> tuple[int, int]:
    """(floor(P), floor(2P)) for P = N^(2/5), computed in integers."""
    return integer_root(N * N, 5), integer_root(32 * N * N, 5)


def window_primes(N: int) -> np.ndarray:
    lo, hi = prime_window(N)
    return np.asarray(primes_in(lo, hi), dtype=np.int64)


def _values(xs: np.ndarray, Z: IntegerSet) -> np.ndarray:
    return np.add.outer(xs**3, Z.elements).ravel()


def rho_counts(Z: IntegerSet, N: int) -> dict[int, int]:
    """n -> number of pairs (p, z) with p prime in (P, 2P], z in Z and p^3 + z = n."""
    vals, counts = np.unique(_values(window_primes(N), Z), return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def _rho_histogram(Z: IntegerSet, N: int) -> np.ndarray:
    return np.unique(_values(window_primes(N), Z), return_counts=True)[1]


def theta(Z: IntegerSet, N: int) -> int:
    """Distinct values of x^3 + z over all integers x in (P, 2P] and z in Z."""
    lo, hi = prime_window(N)
    xs = np.arange(lo + 1, hi + 1, dtype=np.int64)
    return int(np.unique(_values(xs, Z)).size)


def M2_equation_count(Z: IntegerSet, N: int) -> int:
    """#{(p1, p2, z1, z2) : p1^3 - p2^3 = z1 - z2}, counted pair by pair of primes."""
    cubes = window_primes(N) ** 3
    z = Z.elements
    total = 0
    for c1 in cubes.tolist():
        for c2 in cubes.tolist():
            # z1 = z2 + (c1 - c2) with both in Z
            shifted = z + (c1 - c2)
            idx = np.searchsorted(z, shifted)
            idx[idx == z.size] = 0
            total += int(np.count_nonzero(z[idx] == shifted)) if z.size else 0
    return total


@dataclass(frozen=True)
class MomentReport:
    N: int
    P: float
    P_floor: int
    Z: int
    primes: int
    M1: int
    M2: int
    Theta: int
    cauchy_lb: Fraction

    @property
    def m1_exact(self) -> bool:
        return self.M1 == self.Z * self.primes

    @property
    def cauchy_holds(self) -> bool:
        return self.Theta * self.M2 >= self.M1 * self.M1


def moments(Z: IntegerSet, N: int) -> MomentReport:
    hist = _rho_histogram(Z, N).astype(np.int64)
    M1 = int(hist.sum())
    M2 = int((hist * hist).sum())
    lo, _ = prime_window(N)
    lb = Fraction(M1 * M1, M2) if M2 else Fraction(0)
    return MomentReport(N, N ** 0.4, lo, len(Z), int(window_primes(N).size), M1, M2, theta(Z, N), lb)


def theta_trend(Ns: Sequence[int], delta: float = 0.5, seed: int = 0) -> list[dict]:
    """Theta / (P Z) for random sets of density delta at each N."""
    out = []
    for N in Ns:
        Z = random_density(delta, N, seed)
        lo, hi = prime_window(N)
        th = theta(Z, N)
        out.append({"N": N, "Z": len(Z), "Theta": th, "ratio": th / ((hi - lo) * len(Z))})
    return out


# ---------------------------------------------------------------------------
# x^k + a counts and densities

def r_counts(A: IntegerSet, N: int, k: int) -> dict[int, int]:
    """n -> #{(a, x) : x^k + a = n, a in A, a <= N, 1 <= x <= N^(1/k)}."""
    if k < 2:
        raise ValueError("k must be >= 2")
    xs = np.arange(1, integer_root(N, k) + 1, dtype=np.int64)
    a = A.elements[A.elements <= N]
    vals, counts = np.unique(np.add.outer(xs**k, a).ravel(), return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def r_second_moment(A: IntegerSet, N: int, k: int) -> tuple[int, int]:
    """(sum r(n)^2, diagonal a = b part floor(N^(1/k)) |A|)."""
    r = np.fromiter(r_counts(A, N, k).values(), dtype=np.int64)
    a = int(np.count_nonzero(A.elements <= N))
    return int((r * r).sum()), integer_root(N, k) * a


def density_estimate(B: IntegerSet, N: int) -> float:
    """log #(B cap [1, N]) / log N; an empty set gives -inf with a warning."""
    if N < 2:
        raise ValueError("N must be >= 2")
    count = int(np.count_nonzero(B.elements <= N))
    if count == 0:
        warnings.warn("empty set: density estimate is -inf", stacklevel=2)
        return -math.inf
    return math.log(count) / math.log(N)


# ---------------------------------------------------------------------------
# lower bounds for the density of A + cubes

@dataclass(frozen=True)
class BoundRow:
    delta: Fraction
    davenport: Fraction
    new_bound: Fraction
    davenport_in_range: bool

    @property
    def improves(self) -> bool:
        return self.new_bound >= self.davenport


def davenport_bound(delta: Fraction) -> Fraction:
    return Fraction(1, 3) * (1 + 4 * delta / (1 + delta))


def new_bound(delta: Fraction) -> Fraction:
    if delta >= Fraction(4, 5):
        return Fraction(1)
    return Fraction(1, 3) + Fraction(5, 6) * delta


def bound_table(deltas: Iterable) -> list[BoundRow]:
    rows = []
    for d in deltas:
        d = Fraction(d).limit_denominator(10**6) if isinstance(d, float) else Fraction(d)
        if not 0 <= d <= 1:
            raise ValueError("delta must lie in [0, 1]")
        rows.append(BoundRow(d, davenport_bound(d), new_bound(d), Fraction(1, 3) <= d < 1))
    return rows


def delta_grid(step: Fraction = Fraction(1, 20)) -> list[Fraction]:
    n = int(1 / step)
    return [step * i for i in range(n + 1)]
