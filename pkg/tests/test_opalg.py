from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessegkz import opalg
from hessegkz.opalg import (
    apply_to_series,
    builtin,
    compose,
    const,
    derive_gkz,
    normal_form_equal,
    parse,
    theta,
    var,
)
from hessegkz.series import LogSeries


def test_theta_past_monomial():
    z = var()
    assert compose(theta(), z) == z * (theta() + 1)


def test_identity_is_neutral():
    assert compose(const(1, ("psi",)), opalg.l_pf()) == opalg.l_pf()


def test_factorization_up_to_constant():
    left = compose(theta("alpha"), opalg.l_pf_alpha())
    assert normal_form_equal(opalg.d_gkz_alpha(), left, up_to_constant=True)
    assert opalg.proportionality_constant(opalg.d_gkz_alpha(), left) == 1


def test_raw_chart_constant():
    # the alpha image of D_GKZ before making it monic
    assert opalg.d_gkz_alpha_constant() == -27


def test_orders_differ():
    assert not normal_form_equal(opalg.l_pf(), opalg.l_cy3())
    assert normal_form_equal(opalg.l_pf(), opalg.l_pf())


def test_theta_on_cube_root():
    s = LogSeries.monomial(Fraction(1, 3), 4, var="z")
    out = apply_to_series(theta(), s)
    assert out.coefficient(0, Fraction(1, 3)) == Fraction(1, 3)


def test_variable_mismatch_rejected():
    with pytest.raises(ValueError):
        compose(theta("psi"), theta("z"))
    with pytest.raises(ValueError):
        apply_to_series(theta("psi"), LogSeries.monomial(0, 3, var="z"))


def test_hesse_reduction():
    got = derive_gkz(opalg.HESSE).reduced
    want = parse("theta^3 + z*(-3*theta-3)*(-3*theta-2)*(-3*theta-1)")
    assert normal_form_equal(got, want)


def test_weierstrass_reduction():
    q = Fraction
    t, w = theta("w"), var("w")
    want = t * (t - q(1, 4)) * (t - q(1, 2)) - w * (t + q(3, 4)) * (t + q(1, 12)) * (t + q(5, 12))
    assert normal_form_equal(derive_gkz(opalg.WEIERSTRASS).reduced, want)


def test_legendre_reduction_has_order_two():
    assert derive_gkz(opalg.LEGENDRE).reduced.order() == 2


def test_calabi_yau_flags():
    assert opalg.HESSE.calabi_yau and opalg.HESSE.box_valid()


def test_family_json_round_trip():
    for f in opalg.FAMILIES.values():
        assert opalg.FamilySpec.from_json(f.to_json()) == f


def test_lnu_specialisations():
    assert normal_form_equal(opalg.lnu(0), opalg.l_cy3())
    # nu = -1: psi L_(-1) psi^-1 = -psi^3 D_GKZ
    psi = var("psi")
    lhs = compose(compose(psi, opalg.lnu(-1)), var("psi", power=-1))
    assert lhs == -compose(var("psi", power=3), opalg.d_gkz())
    ind = opalg.lnu(Fraction(1, 2)).indicial()
    assert len(ind) == 4
    assert all(sum(c * r ** i for i, c in enumerate(ind)) == 0 for r in (0, 1, 2))


def test_builtin_golden_strings():
    assert str(builtin("L_PF")) == str((theta("psi") - 2) * (theta("psi") - 1) - var("psi") ** 3 * theta("psi") ** 2)
    ta = theta("alpha")
    assert builtin("L_PF_alpha") == ta * ta - var("alpha") * (ta + Fraction(1, 3)) * (ta + Fraction(2, 3))
    v = ("a", "b")
    d1 = Fraction(-1, 72) * theta(v, 0) * theta(v, 1) - var(v, 0) * var(v, 1) ** -6 * (theta(v, 1) - 1) * (theta(v, 1) - 5)
    assert builtin("D1") == d1


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("nope")


def test_parse_round_trip():
    for name in opalg.builtin_names():
        op = builtin(name)
        if op.nvars == 1:
            assert parse(str(op), op.variables) == op


# ---------------------------------------------------------------------------
# properties

coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def operators(draw):
    op = const(0)
    for _ in range(draw(st.integers(1, 3))):
        m = draw(st.integers(-2, 2))
        poly = const(draw(coef))
        for _ in range(draw(st.integers(0, 2))):
            poly = poly * (theta() - draw(coef))
        op = op + var(power=m) * poly if m else op + poly
    return op


@settings(max_examples=40, deadline=None)
@given(operators(), operators(), operators())
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@settings(max_examples=40, deadline=None)
@given(operators())
def test_identity_neutral(a):
    one = const(1)
    assert compose(one, a) == a == compose(a, one)


@settings(max_examples=30, deadline=None)
@given(operators(), operators(), st.lists(coef, min_size=12, max_size=12))
def test_action_is_a_module_action(a, b, terms):
    s = LogSeries.from_terms(Fraction(1, 3), terms)
    lhs = apply_to_series(compose(a, b), s)
    rhs = apply_to_series(a, apply_to_series(b, s))
    # compare on the range known to both
    lo = max(lhs.rho, rhs.rho)
    hi = min(lhs.top, rhs.top)
    e = lo
    while e <= hi:
        assert lhs.coefficient(0, e) == rhs.coefficient(0, e)
        e += 1
