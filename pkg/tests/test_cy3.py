import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import cy3, opalg


def six_f_five(b):
    # oracle for omega_0 at a = 0
    p = [mpmath.mpf(k) / 18 for k in (1, 5, 7, 11, 13, 17)]
    q = [mpmath.mpf(1) / 3, mpmath.mpf(2) / 3, 1, 1, 1]
    z = mpmath.mpf(18) ** 18 / (mpmath.mpf(9) ** 9 * 6 ** 6) / mpmath.mpc(b) ** 18
    return complex(mpmath.hyper(p, q, z))


def test_small_u_k():
    assert cy3.u_k_coefficients(0) == {0: 1}
    assert cy3.u_k_coefficients(1) == {1: 1}
    assert cy3.u_k_coefficients(3) == {3: 1, 0: 6}
    assert cy3.u_nu(2.0, 3) == 14


def test_c_k():
    # Pochhammer form 432^k (1/6)_k (5/6)_k / k!^2
    poch = lambda x, k: math.prod((x + i for i in range(k)), start=Fraction(1))
    for k in range(12):
        assert cy3.c_k(k) == 432 ** k * poch(Fraction(1, 6), k) * poch(Fraction(5, 6), k) / math.factorial(k) ** 2
    assert cy3.c_k(1) == 60


@pytest.mark.parametrize("nu", [2, 5, 7])
@pytest.mark.parametrize("a", [1.5, -2.0 + 1j, 4j])
def test_pfq_matches_finite(nu, a):
    assert abs(cy3.u_nu(a, nu, "pfq") - cy3.u_nu(a, nu)) < 1e-10 * max(1, abs(a) ** nu)


def test_pfq_needs_large_a():
    with pytest.raises(ValueError):
        cy3.u_nu(0.5, Fraction(1, 2), "pfq")


@pytest.mark.parametrize("nu", [Fraction(1, 2), Fraction(-1), Fraction(-5, 6)])
def test_barnes_matches_pfq_on_overlap(nu):
    a = 1.6 + 0.7j
    assert abs(cy3.u_nu(a, nu, "barnes", 150) - cy3.u_nu(a, nu, "pfq")) < 1e-10


def test_barnes_reduces_to_finite_sum():
    s = cy3.barnes_series(3, 20)
    c = s.coefficients()
    assert abs(c[0] - 6) < 1e-12 and abs(c[3] - 1) < 1e-12
    assert all(abs(x) < 1e-12 for i, x in enumerate(c) if i not in (0, 3))


@pytest.mark.parametrize("nu", [Fraction(1, 2), Fraction(-1), Fraction(-7, 6)])
def test_barnes_annihilated(nu):
    assert cy3.barnes_annihilation(nu, 60).ok


def test_printed_display_differs_by_rescaling():
    # the displayed series equals 3^-nu rho^(nu/2) U_nu(3 rho a)
    nu, a = Fraction(1, 2), 0.2 + 0.1j
    lhs = cy3.barnes_display(a, nu)
    rhs = 3 ** (-0.5) * cy3.RHO ** 0.25 * cy3.u_nu(3 * cy3.RHO * a, nu, "barnes", 200)
    assert abs(lhs - rhs) < 1e-10


def test_lnu_chart():
    # a = -3 psi
    assert cy3.lnu_a(0) == opalg.l_cy3().change_chart("a", Fraction(-1, 3), 1)


def test_fundamental_period_two_ways():
    a, b = cy3.fundamental_period(9, 9), cy3.fundamental_period_double_sum(9, 9)
    assert a.same_as(b) and a.in_lattice()


def test_d1_d2_annihilate():
    assert all(r.ok for r in cy3.annihilation_check(8, 20))


def test_d1_with_opposite_sign_fails():
    w = cy3.fundamental_period(8, 20)
    ta, tb = opalg.theta(("a", "b"), 0), opalg.theta(("a", "b"), 1)
    wrong = opalg.d1() - 2 * Fraction(-1, 72) * ta * tb
    out, complete = cy3.apply_operator(wrong, w)
    assert any(out[k] != 0 for k in complete)


def test_recursion():
    assert cy3.recursion_check(15).ok


def test_six_f_five_is_the_a0_period():
    b = 5.0
    direct = sum(cy3.c_k(3 * l) * math.factorial(3 * l) / math.factorial(l) ** 3 * b ** (-18 * l) for l in range(6))
    assert abs(six_f_five(b) - direct) < 1e-14


def test_d_coefficients_reproduce_period():
    b = 1 + 0.5j
    e = cy3.orbifold_expansion_b0(K=60, order=10)
    assert abs(e.evaluate(0, b) - six_f_five(b)) < 1e-12


def test_missing_layers():
    assert cy3.d_coefficient(0).is_zero and cy3.d_coefficient(6).is_zero
    assert not cy3.d_coefficient(1).is_zero and not cy3.d_coefficient(5).is_zero
    assert cy3.d_coefficient(2).is_zero and cy3.d_coefficient(3).is_zero


def test_u_minus1_lacks_j3_class():
    ratios, missing = cy3.oscillating_ratio(20)
    assert missing == [2, 5, 8, 11, 14, 17, 20]
    vals = [r for r in ratios if r is not None]
    assert all(abs(r - 27 / (4 * math.pi ** 2)) < 1e-12 for r in vals)


def test_flagged_reports():
    e = cy3.orbifold_expansion_b0(K=12, order=30, workers=2)
    status = {r.check: r.status for r in e.reports}
    assert status["cy3.orbifold.layers"] == "pass"
    assert status["cy3.orbifold.u0_u_minus1"] == "flagged"
    assert status["cy3.orbifold.u_minus1_oscillating"] == "flagged"


def test_bi_series_csv():
    text = cy3.fundamental_period(1, 1).to_csv()
    assert text.splitlines() == ["m,k,numerator,denominator", "0,0,1,1", "1,1,60,1"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 40))
def test_theta_a_u_recursion(k):
    lhs = {e: e * c for e, c in cy3.u_k_coefficients(k + 1).items() if e * c}
    rhs = {e + 1: (k + 1) * c for e, c in cy3.u_k_coefficients(k).items()}
    assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 30), st.complex_numbers(min_magnitude=1.2, max_magnitude=3))
def test_u_k_pfq_form(k, a):
    scale = sum(abs(c) * abs(a) ** m for m, c in cy3.u_k_coefficients(k).items())
    assert abs(cy3.u_nu(a, k, "pfq") - cy3.u_nu(a, k)) < 1e-12 * scale
