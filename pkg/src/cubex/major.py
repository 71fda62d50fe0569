"""Major-arc approximations to F_w and the envelope reports built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arcs import ArcKind, ArcLabel, RationalApproximant, classify
from .complete_sums import divisor_set_D, gauss_quad, local_series, local_series_D
from .ntheory import Modulus, PrimorialSpec, tau
from .oscillatory import fresnel_segment, integral_I, integral_J, integral_K
from .phase import Phase, as_phase, frac_mul
from .weyl import F_w, F_w_many, WeylParams, quad_f

EPSILON = 0.1


def log_floor(P: float) -> float:
    """max(log P, 1)."""
    return max(math.log(P), 1.0)


def primorial_for(P: float) -> PrimorialSpec:
    """The primorial over primes up to P^(1/4)."""
    return PrimorialSpec(P ** 0.25)


@dataclass(frozen=True)
class MajorDecomposition:
    approximant: RationalApproximant
    D_set: tuple[int, ...]
    f_star: complex
    main_term: complex
    f_true: complex

    @property
    def residual(self) -> complex:
        return self.f_true - self.main_term


def _major_label(alpha, P: float, w: Modulus) -> ArcLabel:
    label = classify(alpha, P, w)
    if label.kind is ArcKind.MINOR:
        raise ValueError(f"alpha = {alpha} is on the minor arcs at P = {P}")
    return label


def _alpha_phase(alpha, approx: RationalApproximant) -> Phase:
    # keep a/q exact and carry only beta in floating point
    if isinstance(alpha, Phase):
        return alpha
    if isinstance(alpha, Fraction) and alpha.denominator < 2**31:
        return as_phase(alpha)
    return Phase(approx.a % approx.q, approx.q, approx.beta)


def integral_J_closed(beta1: float, beta2: float, X: float) -> complex:
    """J by completing the square; only for well-conditioned inputs."""
    if beta2 == 0.0:
        if beta1 == 0.0:
            return complex(X)
        return (np.exp(2j * math.pi * beta1 * 2 * X) - np.exp(2j * math.pi * beta1 * X)) / (2j * math.pi * beta1)
    shift = beta1 / (2.0 * beta2)
    const = beta1 * beta1 / (4.0 * beta2)
    seg = fresnel_segment(np.array([beta2]), X + shift, 2 * X + shift)[0]
    return complex(seg * np.exp(-2j * math.pi * (const - math.floor(const))))


def f_star(alpha, P: float, w: Modulus = 1, j_method: str = "quadrature") -> complex:
    """The truncated double sum over d in D(alpha, w) and h <= H/d of

    mu(d)/(q d) e(alpha d^3 h^3) S(q, 3 a d^3 h^2, 3 a d^3 h) J(3 h^2 d^2 beta, 3 h d beta).
    """
    approx = _major_label(alpha, P, w).approximant
    a, q, beta = approx.a, approx.q, approx.beta
    ph = _alpha_phase(alpha, approx)
    terms = []
    for d, mu in divisor_set_D(beta, P, w):
        d3 = d**3
        for h in range(1, math.isqrt(math.floor(P)) // d + 1):
            S = gauss_quad(q, 3 * a * d3 * h * h, 3 * a * d3 * h).value
            if abs(S) < 1e-9 * q:
                continue
            b1, b2 = 3.0 * h * h * d * d * beta, 3.0 * h * d * beta
            if j_method == "quadrature":
                J = integral_J(b1, b2, P).value
            else:
                J = integral_J_closed(b1, b2, P)
            t = 2 * math.pi * frac_mul(ph.num, ph.den, ph.beta, d3 * h**3)
            terms.append(mu / (q * d) * complex(math.cos(t), math.sin(t)) * S * J)
    return complex(math.fsum(v.real for v in terms), math.fsum(v.imag for v in terms))


@lru_cache(maxsize=4096)
def _K_cached(beta: float, H: float, P: float) -> complex:
    return integral_K(beta, H, P).value


def main_term(alpha, P: float, w: Modulus = 1, truncated: bool = True) -> complex:
    """Local factor times K(beta).

    ``truncated=True`` uses the divisor set D(alpha, w); otherwise the full
    local factor over all d | w.
    """
    approx = _major_label(alpha, P, w).approximant
    return main_term_at(approx.a, approx.q, approx.beta, P, w, truncated)


def main_term_at(a: int, q: int, beta: float, P: float, w: Modulus = 1,
                 truncated: bool = True) -> complex:
    """:func:`main_term` for an explicit a/q + beta, skipping classification."""
    if truncated:
        s = local_series_D(a, q, w, beta, P)
    else:
        s = local_series(a, q, w)
    return s * _K_cached(float(beta), math.sqrt(P), float(P))


def decompose(alpha, P: float, w: Modulus = 1, with_f_star: bool = True) -> MajorDecomposition:
    label = _major_label(alpha, P, w)
    approx = label.approximant
    ph = _alpha_phase(alpha, approx)
    D = tuple(d for d, _ in divisor_set_D(approx.beta, P, w))
    fs = f_star(alpha, P, w, j_method="closed") if with_f_star else complex("nan")
    mt = main_term(alpha, P, w, truncated=False)
    ft = F_w(ph, WeylParams(P, w)).value
    return MajorDecomposition(approx, D, fs, mt, ft)


# ---------------------------------------------------------------------------
# quadratic Weyl sum approximation

def quadweyl_check(q: int, a1: int, a2: int, beta1: float, beta2: float, X: float) -> tuple[float, float]:
    """|f - S I / q| and the bound (q, a2)^(1/2) (q + q X^2 |beta2|)^(1/2) max(log q, 1)."""
    if abs(beta1) > 1.0 / (2 * q):
        raise ValueError("need |beta1| <= 1/(2q)")
    f = quad_f(Phase(a1 % q, q, beta1), Phase(a2 % q, q, beta2), X).value
    S = gauss_quad(q, a1, a2).value
    I = integral_I(beta1, beta2, X).value
    lhs = abs(f - S * I / q)
    rhs = math.sqrt(math.gcd(q, a2)) * math.sqrt(q + q * X * X * abs(beta2)) * max(math.log(q), 1.0)
    return lhs, rhs


def gcd_sum(r: int, K, H: int):
    """sum_{h <= H} (r, h) / (1 + K h); exact for K = 0 or rational K."""
    if K == 0:
        return Fraction(sum(math.gcd(r, h) for h in range(1, H + 1)))
    if isinstance(K, Fraction):
        return sum((Fraction(math.gcd(r, h)) / (1 + K * h) for h in range(1, H + 1)), Fraction(0))
    return math.fsum(math.gcd(r, h) / (1.0 + K * h) for h in range(1, H + 1))


def gcd_sum_bound(r: int, K: float, H: int) -> float:
    return tau(r) * (1.0 + math.log(H)) * H / (1.0 + K * H)


# ---------------------------------------------------------------------------
# envelope reports

@dataclass(frozen=True)
class SampleSpec:
    n_random: int = 1000
    n_near: int = 1000
    seed: int = 0
    points_per_fraction: int = 8


def farey_pairs(count: int, q_max: int | None = None) -> list[tuple[int, int]]:
    """The first ``count`` reduced a/q in [0, 1] ordered by (q, a)."""
    out = []
    q = 1
    while len(out) < count and (q_max is None or q <= q_max):
        for a in range(0, q + 1):
            if math.gcd(a, q) == 1:
                out.append((a, q))
                if len(out) == count:
                    break
        q += 1
    return out


def near_rational_betas(q: int, P: float, n: int = 8) -> np.ndarray:
    """|beta| geometrically spaced over [1e-2 / (H P^2), 1 / (6 q H P)]."""
    H = math.sqrt(P)
    lo = 1e-2 / (H * P * P)
    hi = 1.0 / (6.0 * q * H * P)
    return np.geomspace(lo, hi, n)


def near_rational_samples(P: float, n_total: int, per: int = 8, q_max: int | None = None) -> list[Phase]:
    """alpha = a/q + beta points, signs alternating and kept inside [0, 1]."""
    pairs = farey_pairs(max(1, n_total // per), q_max)
    out = []
    for a, q in pairs:
        for j, b in enumerate(near_rational_betas(q, P, per)):
            sign = 1.0 if j % 2 == 0 else -1.0
            if a == 0:
                sign = 1.0
            elif a == q:
                sign = -1.0
            out.append(Phase(a % q, q, sign * float(b)))
            if len(out) == n_total:
                return out
    return out


def random_samples(n: int, seed: int) -> list[float]:
    rng = np.random.default_rng(seed)
    return rng.random(n).tolist()


def minor_samples(n: int, seed: int, P: float) -> list[float]:
    """``n`` uniform alphas on the minor arcs at P (rejection sampling)."""
    rng = np.random.default_rng(seed)
    out: list[float] = []
    while len(out) < n:
        for a in rng.random(2 * (n - len(out)) + 8).tolist():
            if classify(a, P).kind is ArcKind.MINOR:
                out.append(a)
                if len(out) == n:
                    break
    return out


def phase_fraction(ph: Phase) -> Fraction:
    """The exact value of a phase, shifted by an integer into [0, 1)."""
    x = Fraction(ph.num, ph.den) + Fraction(ph.beta)
    return x - math.floor(x)


@dataclass
class EnvelopeRow:
    alpha: float
    kind: str
    q: int
    abs_F: float
    envelope: float
    ratio: float


def theorem12_report(P: float, w: Modulus, samples: list, envelope: str = "upsilon",
                     epsilon: float = EPSILON, threads: int = 1) -> list[EnvelopeRow]:
    """|F_w(alpha)| against HP log(P) Upsilon_w(alpha) + P^(1+eps) (or the Xi envelope)."""
    H = math.sqrt(P)
    floor_ = P ** (1 + epsilon)
    labels = []
    for s in samples:
        labels.append(classify(phase_fraction(s) if isinstance(s, Phase) else s, P, w))
    values = F_w_many(samples, WeylParams(P, w), threads=threads)
    rows = []
    for s, lab, v in zip(samples, labels, values):
        weight = lab.upsilon if envelope == "upsilon" else lab.xi
        env = H * P * log_floor(P) * weight + floor_
        q = lab.approximant.q if lab.approximant else 0
        rows.append(EnvelopeRow(float(phase_fraction(as_phase(s))), lab.kind.value, q, abs(v.value), env, abs(v.value) / env))
    return rows
