import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import frobenius, modular
from hessegkz.modular import QSeries


def product_oracle(N):
    # B by plain polynomial products, truncating each step
    out = np.zeros(N + 1, dtype=object)
    out[0] = 1
    for n in range(1, N + 1):
        f = np.zeros(N + 1, dtype=object)
        f[0], f[n] = 1, -1
        for _ in range(3):
            out = np.convolve(out, f)[: N + 1]
        # 1/(1 - q^3n) = sum q^(3nk)
        g = np.zeros(N + 1, dtype=object)
        g[:: 3 * n] = 1
        out = np.convolve(out, g)[: N + 1]
    return [int(x) for x in out]


def test_chi():
    assert [modular.chi_minus3(n) for n in range(7)] == [0, 1, -1, 0, 1, -1, 0]
    with pytest.raises(ValueError):
        modular.chi_minus3(-1)


def test_b_against_product_oracle():
    assert list(modular.eta_quotient_B(40).coeffs) == product_oracle(40)


def test_b3_first_coefficients():
    # frozen from the Lambert sum
    assert list(modular.lambert_B3(10).coeffs) == [1, -9, 27, -9, -117, 216, 27, -450, 459, -9, -648]


def test_lambert_equals_eta_cubed():
    assert modular.lambert_B3(60) == modular.eta_quotient_B(60) ** 3


def test_mirror_map_derivative():
    d = modular.mirror_map_D(60)
    assert d.coeffs[0] == 1 and d.coeffs[1] == -9
    assert d == modular.lambert_B3(60)


def test_li2_second_derivative():
    t = modular.t_gkz_qseries(50)
    d2 = t.D().D()
    assert d2.poly == (1, 0, 0)
    assert d2.constant_plus_series() == QSeries.one(50) + modular.li2_chi_part(50).D().D()
    assert modular.li2_chi_part(50).D().D() == QSeries.one(50) - modular.lambert_B3(50)


def test_b3_numeric_matches_series():
    q = 0.05 + 0.02j
    assert abs(modular.b3_numeric(q) - modular.lambert_B3(40).evaluate(q)) < 1e-14
    with pytest.raises(ValueError):
        modular.b3_numeric(1.0)


def test_cusp_tau_in_upper_half_plane():
    r = modular.hauptmodul_bridge()
    assert r.upper_half_plane
    assert r.deviation < 1e-8
    assert abs(r.qs[0]) < abs(r.qs[1]) < abs(r.qs[2])


def test_theta_alpha_mirror_map_is_omega0():
    a = 0.05
    assert abs(modular.theta_alpha_mirror_map(a) - frobenius.omega0(a)) < 1e-8


def test_wronskian():
    assert modular.wronskian_value(0) == 0
    assert modular.wronskian_constant(60) == -1
    with pytest.raises(ZeroDivisionError):
        modular.wronskian_value(1)


def test_wronskian_fit_exact():
    f = modular.wronskian_solution_fit(40)
    assert f.residual_zero
    assert (f.a, f.b, f.c) == (0, 0, -2)


def test_pairing():
    v, a = 0.03, 0.08
    assert abs(modular.singular_cycle_pairing(v, a) + modular.singular_cycle_pairing(a, v)) < 1e-12
    assert abs(modular.singular_cycle_pairing(a, a)) < 1e-12
    assert modular.beltrami_residual(v, a) < 1e-10


def test_qseries_inverse():
    b = modular.eta_quotient_B(30)
    assert b * b.inverse() == QSeries.one(30)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=8, max_size=8), st.lists(st.integers(-5, 5), min_size=8, max_size=8))
def test_D_is_a_derivation(a, b):
    A, B = QSeries(tuple(a)), QSeries(tuple(b))
    assert (A * B).D() == A.D() * B + A * B.D()
