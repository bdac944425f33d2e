import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import curves
from hessegkz.curves import RHO


def k_oracle(psi, n=400):
    """Out-and-back integral from x_o = -1 to the branch point where the
    y = (3 psi x_o)^(1/2) sheet meets y = 0, with np.roots tracking and
    x = x_b + (x_o - x_b) s^2 to absorb the square-root end."""
    xo = -1 + 0j
    ys = cmath.sqrt(3 * psi * xo)
    s, w = np.polynomial.legendre.leggauss(n)
    s, w = (s + 1) / 2, w / 2
    idx = np.argsort(-s)
    s, w = s[idx], w[idx]
    best = None
    for xb in curves.branch_points(psi):
        ya, yb, tot = ys, 0j, 0j
        for si, wi in zip(s, w):
            x = xb + (xo - xb) * si * si
            r = np.roots([1, 0, -3 * psi * x, x ** 3 + 1])
            ya, yb = r[np.argmin(abs(r - ya))], r[np.argmin(abs(r - yb))]
            g = psi / (3 * ya * ya - 3 * psi * x) - psi / (3 * yb * yb - 3 * psi * x)
            tot -= wi * g * 2 * (xo - xb) * si
        if best is None or abs(ya - yb) < best[1]:
            best = (tot, abs(ya - yb))
    return best[0]


def test_branch_points_solve_discriminant():
    psi = 0.4 + 0.1j
    xb = curves.branch_points(psi)
    assert len(xb) == 6
    assert np.max(np.abs((xb ** 3 + 1) ** 2 - 4 * psi ** 3 * xb ** 3)) < 1e-12
    for x in xb:
        y = curves.double_root(x, psi)
        assert abs(curves.curve(x, y, psi)) < 1e-12 and abs(curves.f_y(x, y, psi)) < 1e-12


@pytest.mark.parametrize("psi", [0, 1, RHO])
def test_degenerate_psi_rejected(psi):
    with pytest.raises(ValueError):
        curves.branch_points(psi)


def test_loop_round_nothing_is_identity():
    assert curves.loop_permutation(curves.circle_path(3 + 3j, 0.1), 0.3) == (0, 1, 2)


def test_keyhole_loops_are_transpositions():
    for _, _, perm in curves.transposition_loops(0.3 + 0.05j):
        assert curves.permutation_sign(perm) == -1


def test_permutation_helpers():
    assert curves.compose_permutations((1, 0, 2), (1, 0, 2)) == (0, 1, 2)
    assert curves.permutation_sign((1, 2, 0)) == 1


def test_K_against_oracle():
    psi = 0.3
    K = curves.chain_integral_K(psi, curves.standard_chain(psi))
    assert abs(K - k_oracle(psi)) < 1e-8
    # frozen value, psi = 0.3
    assert abs(K - 0.0955372538j) < 1e-9


def test_K_path_independent():
    psi = 0.25
    a = curves.chain_integral_K(psi, curves.standard_chain(psi))
    b = curves.chain_integral_K(psi, curves.standard_chain(psi, detour=0.3))
    c = curves.chain_integral_K(psi, curves.arc_chain(psi))
    assert abs(a - b) < 1e-8 and abs(a - c) < 1e-8


def test_bad_chain_endpoints():
    psi = 0.3
    with pytest.raises(curves.EndpointError):
        curves.chain_integral_K(psi, curves.ContourPath((curves.line(-1, -0.5),), None, cmath.sqrt(-3 * psi)))


def test_endpoint_constants():
    assert curves.ENDPOINT_START == Fraction(1, 6)
    assert curves.ENDPOINT_END == Fraction(-1, 3)
    assert curves.PRINTED_ENDPOINT_DIFFERENCE == Fraction(5, 18)
    with pytest.raises(ZeroDivisionError):
        curves.endpoint_term(1)


def test_inhomogeneity_of_K_is_not_constant():
    # the computed inhomogeneity moves with psi, so K is not a solution of an
    # inhomogeneous equation with constant right-hand side
    a = curves.inhomogeneity_of_K(0.25)
    b = curves.inhomogeneity_of_K(0.3)
    assert a.matches_primitive and b.matches_primitive
    assert abs(a.value - b.value) > 0.1
    assert not a.matches_printed


def test_torsion_chain_is_a_period():
    psis = [0.3 + 0.02 * cmath.exp(2j * cmath.pi * j / 5) for j in range(5)]
    vals = [curves.torsion_chain_integral(p, 3, 1) for p in psis]
    fit = curves.fit_to_periods(psis, vals)
    assert fit.residual / fit.scale < 1e-8


def test_translations():
    psi = 0.3
    x = 0.4 + 0.2j
    y = curves.cover_roots(x, psi)[0]
    p = curves.SheetPoint(x, y)
    for g in ("sigma1", "sigma2"):
        q = curves.translation_apply(p, g)
        if isinstance(q, curves.SheetPoint):
            assert abs(curves.curve(q.x, q.y, psi)) < 1e-12
        else:
            assert abs(curves.projective_curve(*q, psi)) < 1e-12
    # sigma1 cubed is the identity
    q = p
    for _ in range(3):
        q = curves.translation_apply(q, "sigma1")
    assert abs(q.x - p.x) < 1e-14 and abs(q.y - p.y) < 1e-14
    with pytest.raises(ValueError):
        curves.translation_apply(p, "sigma3")


def test_path_json_round_trip():
    path = curves.standard_chain(0.3)
    again = curves.ContourPath.from_json(path.to_json())
    assert again == path


def test_symbolic_json_points():
    text = '{"segments": [{"type": "line", "start": {"orbifold": 0}, "end": {"branch": 2}}]}'
    p = curves.ContourPath.from_json(text, 0.3)
    assert p.start == -1
    assert p.end == curves.branch_points(0.3)[2]
    with pytest.raises(ValueError):
        curves.ContourPath.from_json(text)


def test_weierstrass_scaling_oracle():
    assert abs(curves.weierstrass_chain(0, -2) - curves.weierstrass_scaling_oracle(-2)) < 1e-8
    assert abs(curves.weierstrass_operator_residual(-1, -1)) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0, 6.2))
def test_galois_symmetry(r, phi):
    assert curves.galois_residual(r * cmath.exp(1j * phi)) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=3), st.floats(0.1, 0.9))
def test_vieta(x, psi):
    assert curves.vieta_residual(x, psi) < 1e-9 * (1 + abs(x)) ** 3
