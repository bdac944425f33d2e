from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import frobenius as fr
from hessegkz import opalg
from hessegkz.opalg import apply_to_series


def partial_sum(spec, x, n):
    # exact rational partial sum, evaluated at the end
    return sum(complex(c) * x ** (spec.power * k) for k, c in enumerate(fr.pfq_coefficients(spec, n)))


def test_pfq_at_zero():
    assert fr.pfq(fr.F_PI1, 0) == 1


@pytest.mark.parametrize("spec, x", [(fr.F_OMEGA, 0.1), (fr.PFqSpec((1, 1, 1), (Fraction(4, 3), Fraction(5, 3))), 0.2)])
def test_pfq_against_rational_partial_sums(spec, x):
    assert abs(fr.pfq(spec, x) - partial_sum(spec, x, 60)) < 1e-14


def test_pfq_divergence_and_bad_parameter():
    with pytest.raises(fr.DivergenceError):
        fr.pfq_eval(fr.F_OMEGA, 1.0)
    with pytest.raises(ValueError):
        fr.PFqSpec((1,), (0,))


def test_orbifold_basis_leading_terms():
    p1, p2, j3 = fr.orbifold_basis(60)
    assert p1.rho == 1 and p1.coefficient(0, 1) == 1
    assert p2.rho == 2 and j3.rho == 3


def test_orbifold_annihilation():
    p1, p2, j3 = fr.orbifold_basis(200)
    for s in (p1, p2, j3):
        assert fr.annihilates(opalg.d_gkz(), s)
    assert fr.annihilates(opalg.l_pf(), p1) and fr.annihilates(opalg.l_pf(), p2)
    assert not fr.annihilates(opalg.l_pf(), j3)


def test_inhomogeneous_constant_in_psi_chart():
    assert fr.psi_chart_inhomogeneity(200) == 2
    p1, _, _ = fr.orbifold_basis(40)
    assert fr.inhomogeneous_constant(opalg.l_pf(), p1) == 0


def test_inhomogeneity_not_constant_raises():
    _, _, j3 = fr.orbifold_basis(40)
    with pytest.raises(fr.NotConstantError):
        fr.inhomogeneous_constant(opalg.d_gkz() + opalg.theta("psi"), j3)


def test_cusp_values():
    assert fr.omega0(0) == 1
    r = fr.connection_residuals(0.05)
    assert r.omega0 < 1e-10
    assert r.omega1_fitted < 1e-10


def test_frobenius_at_cusp_has_log_ladder():
    basis = fr.frobenius_solve(opalg.d_gkz_alpha(), 60)
    assert [s.depth for s in basis] == [0, 1, 2]
    for s in basis:
        assert fr.annihilates(opalg.d_gkz_alpha(), s)


def test_frobenius_at_orbifold_matches_basis():
    basis = fr.frobenius_solve(opalg.l_pf(), 40)
    assert sorted(s.rho for s in basis) == [1, 2]
    assert all(s.depth == 0 for s in basis)
    p1, p2, _ = fr.orbifold_basis(40)
    for s, ref in zip(sorted(basis, key=lambda s: s.rho), (p1, p2)):
        c = s.coefficient(0, s.rho)
        for k in range(0, 30, 3):
            assert s.coefficient(0, s.rho + k) == c * ref.coefficient(0, ref.rho + k)


def test_frobenius_alpha_pf():
    basis = fr.frobenius_solve(opalg.l_pf_alpha(), 40)
    assert sorted(s.depth for s in basis) == [0, 1]


def test_epsilon_deformation_identities():
    f = fr.epsilon_deformation(100)
    L, D = fr.l_pf_u(), fr.d_gkz_u()
    assert list(apply_to_series(L, f[2]).nonzero_terms()) == [(0, 0, 1)]
    assert list(apply_to_series(L, f[3]).nonzero_terms()) == [(1, 0, 1)]
    assert list(apply_to_series(D, f[3]).nonzero_terms()) == [(0, 0, 1)]
    assert apply_to_series(L, f[0]).is_zero() and apply_to_series(L, f[1]).is_zero()


def test_f0_is_omega0():
    f0 = fr.epsilon_deformation(30)[0]
    om = fr.pfq_series(fr.F_OMEGA, 30, 0, "alpha")
    for n in range(31):
        assert f0.coefficient(0, n) == om.coefficient(0, n) * 27 ** n


def test_monodromy():
    M = fr.monodromy_at("orbifold")
    assert np.allclose(M, np.diag([fr.RHO, fr.RHO ** 2, 1]), atol=1e-12)
    assert np.allclose(np.linalg.matrix_power(M, 3), np.eye(3), atol=1e-12)
    basis = fr.frobenius_solve(opalg.d_gkz_alpha(), 20)
    C = fr.monodromy_matrix(basis)
    C2 = fr.monodromy_matrix(basis, 2)
    assert np.allclose(C @ C, C2, atol=1e-9)


def test_csv_exact():
    p1, _, _ = fr.orbifold_basis(7)
    text = fr.series_to_csv(p1)
    assert text.splitlines()[0] == "j,k,numerator,denominator"
    assert "0,3,1,6" in text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 150))
def test_term_ratio_forced_by_operator(k):
    # (n+3 - 2)(n+3 - 1) c_(n+3) = n^2 c_n for L_PF on pi1 = sum c_n psi^n
    p1, p2, _ = fr.orbifold_basis(200)
    for s in (p1, p2):
        n = s.rho + 3 * (k // 3)
        if n + 3 > s.top:
            continue
        c, c3 = s.coefficient(0, n), s.coefficient(0, n + 3)
        assert (n + 1) * (n + 2) * c3 == n * n * c
