import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubex.complete_sums import (
    cubic_gauss_row,
    divisor_set_D,
    gauss_quad,
    gauss_quad_table,
    hua_sum,
    hua_T,
    hua_table,
    kappa,
    kappa_sq,
    kappa_sq_table,
    local_series,
    local_series_D,
    paired_sum_W,
    paired_sum_W_divisor_form,
    restricted_cubic_sum,
    w_prime_power_decomposition,
)
from cubex.ntheory import PrimorialSpec

import oracles

C7 = 1 + 6 * math.cos(2 * math.pi / 7)


@pytest.mark.parametrize(
    "args, expected",
    [((1, 0, 0), 1), ((3, 0, 1), 1j * math.sqrt(3)), ((4, 1, 2), 0)],
)
def test_gauss_quad_examples(args, expected):
    assert abs(gauss_quad(*args).value - expected) < 1e-12


@pytest.mark.parametrize(
    "args, expected",
    [((1, 5, 7), 1), ((7, 1, 0), C7), ((9, 1, 0), 3 * (1 + 2 * math.cos(2 * math.pi / 9)))],
)
def test_hua_sum_examples(args, expected):
    assert abs(hua_sum(*args).value - expected) < 1e-12


def test_hua_sum_frozen_values():
    assert abs(hua_sum(7, 1, 0).value - 4.740938811152129) < 1e-12
    assert abs(hua_sum(9, 1, 0).value - 7.596266658713868) < 1e-12


def test_restricted_examples():
    assert abs(restricted_cubic_sum(1, 1).value - 1) < 1e-12
    assert abs(restricted_cubic_sum(2, 1).value + 1) < 1e-12
    v = restricted_cubic_sum(9, 1).value
    assert abs(v - oracles.U_star(9, 1)) < 1e-12
    assert abs(v) > 1


@pytest.mark.parametrize("args, expected", [((1, 1), 1), ((5, 1), -1), ((7, 1), C7**2 - 1)])
def test_paired_W_examples(args, expected):
    assert abs(paired_sum_W(*args).value - expected) < 1e-10


def test_hua_T_examples():
    assert abs(hua_T(1, 1, 1).value - 1) < 1e-12
    assert abs(hua_T(7, 1, 0).value - C7**2) < 1e-10
    assert abs(hua_T(7, 1, 0).value - 22.476) < 1e-3
    assert abs(hua_T(4, 1, 2).value - abs(oracles.U(4, 1, 2)) ** 2) < 1e-10


def test_rejects_zero_modulus():
    for fn in (lambda: gauss_quad(0, 1, 1), lambda: hua_sum(0, 1), lambda: restricted_cubic_sum(0, 1),
               lambda: paired_sum_W(0, 1), lambda: hua_T(0, 1, 1)):
        with pytest.raises(ValueError):
            fn()


def test_small_sums_match_literal_oracles():
    for q in range(1, 25):
        for a in range(q):
            b = (3 * a + 1) % q
            assert abs(gauss_quad(q, a, b).value - oracles.S_linear(q, a, b)) < 1e-9 * q
            assert abs(hua_sum(q, a, b).value - oracles.U(q, a, b)) < 1e-9 * q
        assert abs(restricted_cubic_sum(q, 2).value - oracles.U_star(q, 2)) < 1e-9 * q
    for q in range(1, 13):
        assert abs(paired_sum_W(q, 1).value - oracles.W(q, 1)) < 1e-9 * q * q
        assert abs(hua_T(q, 1, 2).value - oracles.T(q, 1, 2)) < 1e-9 * q * q


def test_crt_and_direct_paths_agree():
    for q in (60, 210, 341, 1000, 2310):
        for a, b in ((1, 0), (7, 3), (11, 0)):
            d = hua_sum(q, a, b, method="direct").value
            c = hua_sum(q, a, b, method="crt").value
            assert abs(d - c) < 1e-9 * q
            d = gauss_quad(q, a, b, method="direct").value
            c = gauss_quad(q, a, b, method="crt").value
            assert abs(d - c) < 1e-9 * q
    for r in (30, 60, 84):
        assert abs(paired_sum_W(r, 5, method="direct").value - paired_sum_W(r, 5, method="crt").value) < 1e-8 * r * r
        assert abs(hua_T(r, 5, 2, method="direct").value - hua_T(r, 5, 2, method="crt").value) < 1e-8 * r * r


def test_tables_match_pointwise():
    q = 36
    S = gauss_quad_table(q)
    U = hua_table(q)
    row = cubic_gauss_row(q)
    for a1, a2 in ((0, 0), (5, 7), (12, 18)):
        assert abs(S[a1, a2] - gauss_quad(q, a1, a2).value) < 1e-9 * q
    for c, b in ((1, 0), (5, 7), (12, 3)):
        assert abs(U[c, b] - hua_sum(q, c, b).value) < 1e-9 * q
        assert abs(row[c] - hua_sum(q, c, 0).value) < 1e-9 * q


def test_W_divisor_form_and_prime_power_split():
    for r in (1, 4, 7, 12, 18, 25, 27, 30):
        for b in (1, 2, 5):
            assert abs(paired_sum_W(r, b).value - paired_sum_W_divisor_form(r, b)) < 1e-8 * r * r
    for p in (2, 3, 5, 7, 11, 13):
        for l in (1, 2, 3):
            for b in (1, 2):
                if b % p == 0:
                    continue
                assert abs(paired_sum_W(p**l, b).value - w_prime_power_decomposition(p, l, b)) < 1e-8 * p ** (2 * l)


def test_W_vanishing_table():
    for p in (2, 3, 5, 7, 11):
        for l in (1, 2, 3):
            if p**l > 400:
                continue
            v = abs(paired_sum_W(p**l, 1).value)
            if (p != 3 and l >= 2) or (p == 3 and l >= 3):
                assert v <= 1e-6 * p ** (2 * l)
    assert abs(paired_sum_W(9, 1).value) > 1


def test_lemma_vanishing_cases():
    # (a1, a2, q) = 1 and (q, a2) > 1 forces S = 0
    for q in range(2, 40):
        for a1 in range(q):
            for a2 in range(q):
                if math.gcd(math.gcd(a1, a2), q) == 1 and math.gcd(q, a2) > 1:
                    assert abs(gauss_quad(q, a1, a2).value) <= 1e-6 * q


@pytest.mark.parametrize(
    "q, w, expected",
    [(8, 1, Fraction(1, 4)), (12, 1, Fraction(1, 3)), (9, 3, Fraction(1)), (1, 1, Fraction(1)),
     (2, 1, Fraction(2)), (4, 1, Fraction(1, 4)), (4, 2, Fraction(0)), (27, 3, Fraction(0)), (3, 3, Fraction(4))],
)
def test_kappa_sq_examples(q, w, expected):
    assert kappa_sq(q, w) == expected


def test_kappa_examples():
    assert kappa(8, 1) == pytest.approx(0.5, abs=1e-15)
    assert kappa(12, 1) == pytest.approx(3**-0.5, abs=1e-15)
    assert kappa(9, 3) == 1.0
    assert kappa(27, PrimorialSpec(5)) == 0.0


def test_kappa_rejects_non_squarefree_w():
    with pytest.raises(ValueError):
        kappa(5, 4)


def test_kappa_table_matches_pointwise():
    for w in (1, 6, 30, PrimorialSpec(20)):
        num, den = kappa_sq_table(3000, w)
        for q in range(1, 3001):
            k = kappa_sq(q, w)
            assert (int(num[q]), int(den[q])) == (k.numerator, k.denominator)


@pytest.mark.parametrize(
    "a, q, w, expected",
    [(1, 1, 1, 1.0), (1, 7, 1, C7**2 / 49)],
)
def test_local_series_examples(a, q, w, expected):
    assert local_series(a, q, w) == pytest.approx(expected, abs=1e-14)


def test_local_series_q7_w7_literal():
    expected = (abs(oracles.U(7, 1, 0)) ** 2 - abs(oracles.U(7, 343, 0)) ** 2 / 49) / 49
    assert local_series(1, 7, 7) == pytest.approx(expected, abs=1e-13)
    assert local_series(1, 7, 7) == pytest.approx((C7**2 - 1) / 49, abs=1e-13)


def test_local_series_literal_vs_factored():
    for a, q in ((1, 7), (2, 9), (5, 12), (7, 30)):
        for w in (1, 6, 30, 210):
            assert local_series(a, q, w, "literal") == pytest.approx(local_series(a, q, w), abs=1e-13)


def test_local_series_rejects_non_coprime():
    with pytest.raises(ValueError):
        local_series(2, 4, 1)


def test_divisor_set_D():
    assert divisor_set_D(0.0, 100, 30) == [(1, 1), (2, -1), (3, -1), (5, -1), (6, 1), (10, 1)]
    assert divisor_set_D(0.999 / (48 * 100**2 * 3), 100, 30) == [(1, 1), (2, -1), (3, -1)]
    assert local_series_D(1, 7, 1, 0.0, 100) == pytest.approx(local_series(1, 7, 1), abs=1e-15)


@given(st.integers(1, 60), st.integers(1, 60), st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_hua_multiplicativity(q1, q2, c, b):
    if math.gcd(q1, q2) != 1:
        return
    q = q1 * q2
    lhs = hua_sum(q, c, b).value
    rhs = hua_sum(q1, c * q2 * q2, b).value * hua_sum(q2, c * q1 * q1, b).value
    assert abs(lhs - rhs) <= 1e-8 * q


@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 10**4))
@settings(max_examples=100, deadline=None)
def test_W_multiplicativity(r1, r2, b):
    if math.gcd(r1, r2) != 1:
        return
    lhs = paired_sum_W(r1 * r2, b).value
    rhs = paired_sum_W(r1, r2 * r2 * b).value * paired_sum_W(r2, r1 * r1 * b).value
    assert abs(lhs - rhs) <= 1e-8 * (r1 * r2) ** 2


@given(st.integers(1, 200), st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_T_equals_abs_U_squared(q, a, b):
    t = hua_T(q, a, b)
    assert abs(t.value - abs(hua_sum(q, a, b).value) ** 2) <= 1e-8 * q * q
    assert abs(t.imag) <= max(t.err_budget, 1e-8 * q * q)


@given(st.integers(1, 200), st.integers(-500, 500), st.integers(-500, 500), st.integers(1, 6))
@settings(max_examples=200, deadline=None)
def test_gauss_reduction(q, a1, a2, g):
    # q^-1 S(q, a1, a2) is unchanged when q, a1, a2 are all scaled by g
    lhs = gauss_quad(q * g, a1 * g, a2 * g).value / (q * g)
    rhs = gauss_quad(q, a1, a2).value / q
    assert abs(lhs - rhs) <= 1e-9


@given(st.integers(1, 300), st.integers(0, 10**5), st.integers(0, 10**5))
@settings(max_examples=200, deadline=None)
def test_sum_value_within_trivial_bound(q, a, b):
    for v in (hua_sum(q, a, b), gauss_quad(q, a, b)):
        assert abs(v.value) <= v.terms + v.err_budget
        assert v.err_budget >= 0
