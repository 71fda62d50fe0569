import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubex.ntheory import PrimorialSpec
from cubex.phase import Phase, as_phase, frac_mul
from cubex.weyl import (
    F_w,
    F_w_direct,
    F_w_h_expansion,
    F_w_many,
    F_w_mobius,
    F_w_term_count,
    WeylParams,
    cubic_G,
    cubic_G_rows,
    quad_f,
    quad_g,
)

import oracles


def literal_G(alpha, X, Y):
    alpha = Fraction(alpha)
    return sum(oracles.e_frac(alpha * h * (3 * x * x + 3 * x * h + h * h))
               for h in range(1, math.floor(Y) + 1)
               for x in range(math.floor(X) + 1, math.floor(2 * X) + 1))


def literal_F(alpha: Fraction, P: int, w: int) -> complex:
    H = math.isqrt(P)
    return sum(oracles.e_frac(alpha * h * (3 * x * x + 3 * x * h + h * h))
               for h in range(1, H + 1)
               for x in range(P + 1, 2 * P + 1)
               if math.gcd(math.gcd(x, h), w) == 1)


def circ(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


@pytest.mark.parametrize("args, expected", [((0, 0, 10.5), 10), ((0.5, 0, 4), 0)])
def test_quad_f_examples(args, expected):
    assert abs(quad_f(*args).value - expected) < 1e-12


def test_quad_f_oracle():
    v = quad_f(Fraction(1, 3), Fraction(1, 7), 100)
    ref = sum(oracles.e_frac(Fraction(x, 3) + Fraction(x * x, 7)) for x in range(1, 101))
    assert abs(v.value - ref) < 1e-11
    assert abs(v.value) <= 100


@pytest.mark.parametrize("args, expected", [((0, 0, 10), 10), ((0.5, 0, 10), 0)])
def test_quad_g_examples(args, expected):
    assert abs(quad_g(*args).value - expected) < 1e-12


def test_quad_g_oracle():
    ref = sum(oracles.e(0.1 * x + 0.01 * x * x) for x in range(51, 101))
    assert abs(quad_g(0.1, 0.01, 50).value - ref) < 1e-11


def test_quad_rejects_small_X():
    with pytest.raises(ValueError):
        quad_f(0.1, 0.1, 0.5)


@pytest.mark.parametrize("alpha", [0, 1])
def test_cubic_G_trivial(alpha):
    assert abs(cubic_G(alpha, 100, 10).value - 1000) < 1e-9


def test_cubic_G_oracle():
    ref = literal_G(Fraction(1, 7), 20, 4)
    assert abs(cubic_G(Fraction(1, 7), 20, 4).value - ref) < 1e-11
    assert abs(cubic_G(1 / 7, 20, 4).value - ref) < 1e-10
    rows = cubic_G_rows(Fraction(1, 7), 20, 4)
    assert rows.shape == (4,) and abs(rows.sum() - ref) < 1e-11


def test_cubic_G_rejects_Y_above_X():
    with pytest.raises(ValueError):
        cubic_G(0.1, 10, 11)
    with pytest.warns(UserWarning):
        v = cubic_G(0.1, 10, 11, strict=False)
    assert abs(v.value - literal_G(0.1, 10, 11)) < 1e-10


def test_F_w_examples():
    assert abs(F_w_direct(0, WeylParams(100, 1)).value - 1000) < 1e-9
    assert abs(F_w_direct(0, WeylParams(100, 2)).value - 750) < 1e-9
    assert abs(F_w_mobius(0, WeylParams(100, 2)).value - 750) < 1e-9
    assert F_w_term_count(WeylParams(100, 2)) == 750
    a = Fraction(123, 1000)
    ref = literal_F(a, 400, 30)
    assert abs(F_w_direct(a, WeylParams(400, 30)).value - ref) < 1e-9
    assert abs(F_w_mobius(a, WeylParams(400, 30)).value - ref) < 1e-9


def test_F_w_frozen_value():
    # frozen from the literal double loop at alpha = 0.25, P = 400, w = 6
    v = F_w_mobius(Fraction(1, 4), WeylParams(400, 6)).value
    assert abs(v - literal_F(Fraction(1, 4), 400, 6)) < 1e-9
    assert abs(v - (66 - 1j)) < 1e-9


def test_F_w_single_divisor_is_G():
    for a in (0.3141, Fraction(2, 9), 0.5 + 1e-7):
        assert abs(F_w_mobius(a, WeylParams(900, 1)).value - cubic_G(a, 900, 30).value) < 1e-9


def test_F_w_mobius_matches_direct_w6():
    p = WeylParams(900, 6)
    assert abs(F_w_mobius(0.3141, p).value - F_w_direct(0.3141, p).value) < 1e-8 * 30 * 900


def test_F_w_primorial_and_h_expansion():
    p = WeylParams(2500, PrimorialSpec(2500**0.25))
    for a in (0.1234567, Fraction(3, 7)):
        d = F_w_direct(a, p).value
        assert abs(F_w_mobius(a, p).value - d) < 1e-8 * 50 * 2500
        assert abs(F_w_h_expansion(a, p).value - d) < 1e-8 * 50 * 2500
    assert F_w(0.1, p, "direct").value == F_w_direct(0.1, p).value
    with pytest.raises(ValueError):
        F_w(0.1, p, "bogus")


def test_F_w_many_keeps_order_and_matches_serial():
    p = WeylParams(400, 6)
    alphas = [0.1, 0.2, Fraction(1, 3), 0.77]
    serial = [v.value for v in F_w_many(alphas, p, threads=1)]
    threaded = [v.value for v in F_w_many(alphas, p, threads=3)]
    assert serial == threaded == [F_w(a, p).value for a in alphas]


def test_weyl_params_validation():
    with pytest.raises(ValueError):
        WeylParams(0.5)
    with pytest.raises(ValueError):
        WeylParams(100, 12)
    assert WeylParams(400).H == 20.0


def test_phase_reduction_is_exact_for_large_multipliers():
    rng = random.Random(5)
    for _ in range(500):
        beta = rng.random() * 1e-6
        m = rng.randint(2**40, 2**52)
        num, den = rng.randint(0, 996), 997
        got = frac_mul(num, den, beta, m)
        exact = float((Fraction(num, den) * m + Fraction(beta) * m) % 1)
        assert circ(got, exact) < 1e-15


def test_as_phase_forms():
    assert as_phase(Fraction(7, 3)) == Phase(1, 3, 0.0)
    assert as_phase(5) == Phase(0, 1, 0.0)
    assert as_phase(-0.25).beta == 0.75
    with pytest.raises(ValueError):
        as_phase(float("nan"))


@given(st.floats(0, 1, allow_nan=False), st.integers(100, 1000))
@settings(max_examples=30, deadline=None)
def test_F_w_conjugation_symmetry(a, P):
    p = WeylParams(P, 6)
    HP = math.sqrt(P) * P
    v = F_w(a, p).value
    assert abs(F_w(-a, p).value - v.conjugate()) <= 1e-9 * HP


@given(st.integers(0, 10**6), st.integers(1, 10**6), st.integers(-3, 3), st.integers(100, 1000))
@settings(max_examples=30, deadline=None)
def test_F_w_periodicity(a, q, k, P):
    alpha = Fraction(a, q)
    p = WeylParams(P, 30)
    assert F_w(alpha + k, p).value == F_w(alpha, p).value


@given(st.floats(0, 1, allow_nan=False), st.integers(100, 3000), st.sampled_from([1, 2, 6, 30, 210]))
@settings(max_examples=40, deadline=None)
def test_mobius_identity_property(a, P, w):
    p = WeylParams(P, w)
    HP = math.sqrt(P) * P
    assert abs(F_w_mobius(a, p).value - F_w_direct(a, p).value) <= 1e-8 * HP


@given(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False), st.integers(1, 400))
@settings(max_examples=50, deadline=None)
def test_quad_g_is_difference_of_f(a1, a2, X):
    diff = quad_f(a1, a2, 2 * X).value - quad_f(a1, a2, X).value
    g = quad_g(a1, a2, X)
    assert abs(g.value - diff) <= 1e-9 * X
    assert abs(g.value) <= g.terms + g.err_budget
