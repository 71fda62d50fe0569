"""Rational approximation and the major/minor arc dissection of [0, 1]."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .complete_sums import kappa_sq
from .ntheory import Modulus, euler_phi, omega
from .phase import Phase

GUARD_ULPS = 4


@dataclass(frozen=True)
class RationalApproximant:
    """alpha = a/q + beta with (a, q) = 1."""

    a: int
    q: int
    beta: float

    def __post_init__(self):
        if self.q < 1 or math.gcd(self.a, self.q) != 1:
            raise ValueError(f"({self.a}, {self.q}) is not a reduced fraction")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.a, self.q)


class ArcKind(str, enum.Enum):
    MAJOR_M = "MajorM"
    MAJOR_N = "MajorN"
    MINOR = "Minor"


@dataclass(frozen=True)
class ArcLabel:
    kind: ArcKind
    approximant: RationalApproximant | None
    upsilon: float
    xi: float
    boundary_ambiguous: bool = False

    @property
    def is_major(self) -> bool:
        return self.kind is not ArcKind.MINOR


def _exact(alpha) -> Fraction:
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    if isinstance(alpha, Phase):
        # num/den + beta is exact; going through float would round beta.
        # A phase is a residue mod 1, so wrap it into [0, 1).
        x = Fraction(alpha.num, alpha.den) + Fraction(alpha.beta)
        return x - math.floor(x)
    return Fraction(float(alpha))


def convergents(x: Fraction) -> Iterator[tuple[int, int]]:
    """Continued-fraction convergents (p, q) of a rational x."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        t, r = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        yield p1, q1
        num, den = den, r


def _nearest(x: Fraction) -> int:
    # ties go to the smaller integer
    f = math.floor(x)
    return f + 1 if x - f > Fraction(1, 2) else f


def smallest_denominator(alpha: Fraction, within: Callable[[Fraction], bool],
                         q_max: int) -> tuple[int, int] | None:
    """Least q <= q_max (then least a) with ``within(|q alpha - a|)``.

    The least such q is a best approximation of the second kind, hence a
    convergent denominator, so only convergents are tried.
    """
    for _, q in convergents(alpha):
        if q > q_max:
            return None
        a = _nearest(q * alpha)
        if within(abs(q * alpha - a)):
            return a, q
    return None


def dirichlet_approx(alpha, Q: float) -> RationalApproximant:
    """Least-denominator a/q with q <= Q and |q alpha - a| <= 1/floor(Q)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    x = _exact(alpha)
    Qi = math.floor(Q)
    found = smallest_denominator(x, lambda dist: dist * Qi <= 1, Qi)
    if found is None:  # pragma: no cover - Dirichlet's theorem
        raise ArithmeticError(f"no approximation found for {alpha} with Q={Q}")
    a, q = found
    return RationalApproximant(a, q, float(x - Fraction(a, q)))


def dirichlet_scan(alpha, Q: float) -> RationalApproximant:
    """Exhaustive version of :func:`dirichlet_approx` (oracle; O(Q))."""
    x = _exact(alpha)
    Qi = math.floor(Q)
    for q in range(1, Qi + 1):
        for a in (math.floor(q * x), math.floor(q * x) + 1):
            if abs(q * x - a) * Qi <= 1 and math.gcd(a, q) == 1:
                return RationalApproximant(a, q, float(x - Fraction(a, q)))
    raise ArithmeticError("no approximation")  # pragma: no cover


def in_M(dist: Fraction, P: Fraction) -> bool:
    """|q alpha - a| <= (6 H P)^-1 with H = sqrt(P), decided exactly."""
    return dist == 0 or (6 * P * dist) ** 2 * P <= 1


def in_N(dist: Fraction, q: int, P: Fraction) -> bool:
    """q <= P^(3/4) and |q alpha - a| <= P^(-7/4), decided exactly."""
    return q**4 <= P**3 and (dist == 0 or dist**4 * P**7 <= 1)


def upsilon_value(q: int, beta: float, P: float, w: Modulus) -> float:
    H = math.sqrt(P)
    return float(kappa_sq(q, w)) / (1.0 + H * P * P * abs(beta))


def xi_value(q: int, beta: float, P: float) -> float:
    H = math.sqrt(P)
    return 4.0 ** omega(q) / (q + H * P * P * q * abs(beta))


def classify(alpha, P: float, w: Modulus = 1) -> ArcLabel:
    """Locate alpha in the dissection at parameter P."""
    x = _exact(alpha)
    if not 0 <= x <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if P < 2:
        raise ValueError("P must be >= 2")
    Pf = Fraction(P)
    found = smallest_denominator(x, lambda dist: in_M(dist, Pf), math.floor(Pf))
    ambiguous = False
    H = math.sqrt(float(P))
    if not isinstance(alpha, (Fraction, int, Phase)):
        # is the double within a few ulps of an arc edge?
        ulp = math.ulp(float(alpha)) * GUARD_ULPS
        edge = 1.0 / (6.0 * H * float(P))
        if found is not None:
            a, q = found
            ambiguous = abs(abs(float(q * x - a)) - edge) <= q * ulp
        else:
            probe = dirichlet_approx(x, 6.0 * H * float(P))
            if probe.q <= P:
                ambiguous = abs(abs(probe.q * probe.beta) - edge) <= probe.q * ulp
    if found is None:
        return ArcLabel(ArcKind.MINOR, None, 0.0, 0.0, ambiguous)
    a, q = found
    beta = float(x - Fraction(a, q))
    approx = RationalApproximant(a, q, beta)
    ups = upsilon_value(q, beta, float(P), w)
    if in_N(abs(q * x - a), q, Pf):
        return ArcLabel(ArcKind.MAJOR_N, approx, ups, xi_value(q, beta, float(P)), ambiguous)
    return ArcLabel(ArcKind.MAJOR_M, approx, ups, 0.0, ambiguous)


def upsilon(alpha, P: float, w: Modulus = 1) -> float:
    return classify(alpha, P, w).upsilon


def xi(alpha, P: float) -> float:
    return classify(alpha, P).xi


def major_arc_measure(P: float) -> float:
    """Total length of the arcs M(q, a) for q <= P, endpoints included once.

    Each interior arc has length 2/(6 H P q); the arcs at 0 and 1 lie half
    outside [0, 1], which together makes one full arc for q = 1.
    """
    H = math.sqrt(P)
    terms = [euler_phi(q) * 2.0 / (6.0 * H * P * q) for q in range(1, math.floor(P) + 1)]
    return math.fsum(terms)
