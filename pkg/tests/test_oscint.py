import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import oscint
from hessegkz.oscint import RHO


def direct_series(psi, N=200):
    # oracle: Gamma values straight from mpmath, no recurrence
    psi = mpmath.mpc(psi)
    return complex(psi * mpmath.fsum((3 * psi) ** n / mpmath.factorial(n) * mpmath.gamma(mpmath.mpf(n + 1) / 3) ** 3
                                     for n in range(N)) / 27)


def test_series_vanishes_at_zero():
    assert oscint.oscillating_series(0).value == 0
    assert oscint._series_terms(0.5, 1)[0] == pytest.approx(0.5 * math.gamma(1 / 3) ** 3 / 27)


@pytest.mark.parametrize("psi", [0.3, -0.4 + 0.2j, 0.7j])
def test_series_matches_direct_gamma_sum(psi):
    assert abs(oscint.oscillating_series(psi).value - direct_series(psi)) < 1e-13


def test_series_rejects_outside_disc():
    with pytest.raises(ValueError):
        oscint.oscillating_series(1.2)


def test_tail_bound_is_honest():
    psi = 0.8
    short = oscint.oscillating_series(psi, 60)
    long = oscint.oscillating_series(psi, 600)
    assert abs(short.value - long.value) <= short.error


def test_j_pieces_sum_and_classes():
    psi = 0.25 + 0.1j
    J = oscint.j_decomposition(psi)
    S = oscint.j_residue_sums(psi)
    for a, b in zip(J, S):
        assert abs(a - b) < 1e-13
    assert abs(sum(J) - oscint.oscillating_series(psi).value) < 1e-13


def test_j3_closed_form_and_j2_at_zero():
    assert oscint.j_decomposition(0)[1] == 0
    # leading term psi (3 psi)^2 / 2! / 27
    psi = 0.01
    J3 = oscint.j_decomposition(psi)[2]
    assert J3 / psi ** 3 == pytest.approx(1 / 6, rel=1e-5)


def test_reflection_prefactor():
    assert oscint.reflection_prefactor_residual() < 1e-14


def test_functional_relations():
    r = oscint.functional_relations(0.3 + 0.1j)
    assert max(r.rho, r.rho2, r.difference) < 1e-12
    assert r.period_fit < 1e-10


def test_quadrature_3d_matches_series():
    psi = -0.3
    q = oscint.quadrature_3d(oscint.OscillatingSetup(psi))
    assert q.meta["in_domain"]
    assert abs(q.value - oscint.oscillating_series(psi).value) < 1e-6


def test_rotation_equivariance():
    # I on the chain rho^k D_3 at psi equals the k = 0 integral at rho^k psi
    psi = -0.2 + 0.1j
    for k in (1, 2):
        q = oscint.quadrature_3d(oscint.OscillatingSetup(RHO ** (-k) * psi, rotation=k))
        assert abs(q.value - oscint.quadrature_3d(oscint.OscillatingSetup(psi)).value) < 1e-9


def test_bad_rotation():
    with pytest.raises(ValueError):
        oscint.OscillatingSetup(0.1, rotation=3)


def test_quadrature_2d_reduction():
    psi = -0.5
    q = oscint.quadrature_2d(psi)
    assert abs(q.value / oscint.REDUCTION_FACTOR - oscint.oscillating_series(psi).value) < 1e-9


def test_quadrature_2d_rejects_real_psi_above_one():
    with pytest.raises(ValueError):
        oscint.quadrature_2d(1.5)


def test_scorer_origin_value():
    v = oscint.airy_scorer(0, 0.0)
    assert abs(v.value - math.gamma(1 / 3) / 3) < 1e-12


def test_scorer_outside_wedge():
    with pytest.raises(ValueError):
        oscint.airy_scorer(0, math.pi / 2)
    assert oscint.wedge_index(2 * math.pi / 3) == 1
    assert oscint.wedge_index(math.pi / 6) is None
    assert oscint.wedge_index(0.5) == 0
    assert oscint.wedge_index(math.pi / 3) is None


def test_scorer_ode():
    assert oscint.scorer_ode_residual(0.2, 0.0) < 1e-4


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 2 * math.pi))
def test_cyclic_relation(r, phi):
    psi = r * cmath.exp(1j * phi)
    J1, J2, J3 = oscint.j_decomposition(psi)
    lhs = oscint.oscillating_series(RHO * psi).value
    assert abs(lhs - (RHO * J1 + RHO ** 2 * J2 + J3)) < 1e-10
