"""Registry of named verification checks across all modules."""

from __future__ import annotations

import cmath
import fnmatch
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable

import numpy as np

from . import curves, cy3, frobenius, modular, opalg, oscint
from .report import VerificationReport, flagged, judge, timed

DEFAULTS: dict[str, float | int | str] = {
    "series_order": 200,
    "qseries_order": 100,
    "frobenius_order": 100,
    "cy3_K": 10,
    "cy3_M": 30,
    "cy3_recursion_K": 20,
    "barnes_order": 100,
    "orbifold_layers": 12,
    "orbifold_order": 60,
    "quad_order": 64,
    "quad_R": 6.0,
    "quad2d_order": 96,
    "theorem_points": "0.25,0.3",
    "chain_psi": 0.3,
    "workers": 1,
}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> dict:
    """key = value lines; '#' starts a comment.  Unknown keys are errors."""
    cfg = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key] = value
    return cfg


def resolve_config(overrides: dict | None = None) -> dict:
    cfg = dict(DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        kind = type(DEFAULTS[key])
        try:
            cfg[key] = kind(value) if kind is not int else int(str(value))
        except ValueError:
            raise ConfigError(f"{key}: cannot read {value!r} as {kind.__name__}") from None
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# opalg

def _factorization(cfg):
    c = opalg.proportionality_constant(opalg.d_gkz_alpha(),
                                       opalg.compose(opalg.theta("alpha"), opalg.l_pf_alpha()))
    return judge("opalg.factorization", 0 if c is not None else 1, 0, f"constant {c}")


def _golden(name, expected):
    def run(cfg):
        got = opalg.derive_gkz(opalg.FAMILIES[name]).reduced
        if expected is None:
            return judge(f"opalg.golden.{name}", abs(got.order() - 2), 0, f"order {got.order()}: {got}")
        ok = opalg.normal_form_equal(got, expected(), up_to_constant=True)
        return judge(f"opalg.golden.{name}", 0 if ok else 1, 0, str(got))
    return run


# ---------------------------------------------------------------------------
# frobenius

def _series_annihilation(cfg):
    b = frobenius.orbifold_basis(int(cfg["series_order"]))
    bad = sum(not frobenius.annihilates(opalg.d_gkz(), s) for s in b)
    bad += sum(not frobenius.annihilates(opalg.l_pf(), s) for s in b[:2])
    return judge("frobenius.annihilation", bad, 0, "D_GKZ on pi1, pi2, J3; L_PF on pi1, pi2")


def _inhomogeneity(cfg):
    try:
        c = frobenius.psi_chart_inhomogeneity(int(cfg["series_order"]))
    except frobenius.NotConstantError as e:
        return judge("frobenius.inhomogeneity", 1, 0, str(e))
    printed = Fraction(2, 9)
    if c == printed:
        return judge("frobenius.inhomogeneity", 0, 0, f"constant {c}")
    return flagged("frobenius.inhomogeneity", float(abs(c - printed)), 0,
                   f"constant {c} exactly; printed value {printed}; ratio {c / printed} = (-3)^2 from theta_psi = -3 theta_z")


def _deformation(cfg):
    N = int(cfg["frobenius_order"])
    f = frobenius.epsilon_deformation(N)
    L, D = frobenius.l_pf_u(), frobenius.d_gkz_u()

    def is_log_power(s, j):
        return list(s.nonzero_terms()) == [(j, Fraction(0), Fraction(1))]

    bad = (not is_log_power(opalg.apply_to_series(L, f[2]), 0)) + (not is_log_power(opalg.apply_to_series(L, f[3]), 1)) \
        + (not is_log_power(opalg.apply_to_series(D, f[3]), 0))
    return judge("frobenius.deformation", bad, 0, f"L f2 = 1, L f3 = log(alpha/27), D f3 = 1 through order {N}")


def _monodromy(cfg):
    M = frobenius.monodromy_at("orbifold")
    target = np.diag([frobenius.RHO, frobenius.RHO ** 2, 1])
    res = max(float(np.max(np.abs(M - target))), float(np.max(np.abs(np.linalg.matrix_power(M, 3) - np.eye(3)))))
    return judge("frobenius.monodromy", res, 1e-10, "orbifold loop on (pi1, pi2, J3)")


# ---------------------------------------------------------------------------
# oscint

def _quadrature(cfg):
    worst = 0.0
    for psi in (-0.3, -0.2 + 0.1j):
        s = oscint.oscillating_series(psi).value
        q = oscint.quadrature_3d(oscint.OscillatingSetup(psi, R=float(cfg["quad_R"]), order=int(cfg["quad_order"]))).value
        d = oscint.quadrature_2d(psi, order=int(cfg["quad2d_order"])).value / oscint.REDUCTION_FACTOR
        worst = max(worst, abs(q - s), abs(d - s) / 10, abs(d - q) / 10)
    return judge("oscint.quadrature", worst, 1e-6, "3d vs series (1e-6); 2d vs both scaled to 1e-5")


def _decomposition(cfg):
    res = 0.0
    for psi in (0.3, -0.3, 0.2 + 0.2j, -0.3j, 0.1 - 0.25j):
        s = oscint.oscillating_series(psi).value
        res = max(res, abs(s - sum(oscint.j_decomposition(psi))))
    return judge("oscint.decomposition", res, 1e-12, "I = J1 + J2 + J3 for |psi| <= 0.3")


def _relations(cfg):
    res = 0.0
    for psi in (0.3, -0.2 + 0.1j):
        r = oscint.functional_relations(psi)
        res = max(res, r.rho, r.rho2, r.difference, r.period_fit)
    return judge("oscint.functional_relations", res, 1e-10, "I(rho^k psi) against the J pieces")


def _reflection(cfg):
    return judge("oscint.reflection", oscint.reflection_prefactor_residual(), 1e-12, "J1 prefactor")


def _scorer(cfg):
    res = max(oscint.scorer_ode_residual(0.1, a) for a in (0.0, 2 * math.pi / 3, 4 * math.pi / 3))
    return judge("oscint.scorer", res, 1e-4, "f''' - 9 psi f' - 9 f on the three wedges")


# ---------------------------------------------------------------------------
# modular

def _lambert(cfg):
    N = int(cfg["qseries_order"])
    ok = modular.lambert_B3(N) == modular.eta_quotient_B(N) ** 3
    return judge("modular.lambert", 0 if ok else 1, 0, f"Lambert sum vs eta quotient cubed through q^{N}")


def _mirror(cfg):
    N = int(cfg["qseries_order"])
    ok = modular.mirror_map_D(N) == modular.lambert_B3(N)
    return judge("modular.mirror_map", 0 if ok else 1, 0, f"D t = B^3 through q^{N}")


def _li2(cfg):
    N = int(cfg["qseries_order"])
    ok = modular.li2_chi_part(N).D().D() == modular.QSeries.one(N) - modular.lambert_B3(N)
    return judge("modular.li2", 0 if ok else 1, 0, f"D^2 of the Li2 part = 1 - B^3 through q^{N}")


def _bridge(cfg):
    r = modular.hauptmodul_bridge()
    res = r.deviation if r.upper_half_plane else math.inf
    return judge("modular.hauptmodul", res, 1e-8, f"(1 - alpha) omega0^3 / B^3 = {r.normalization:.12g}")


def _wronskian(cfg):
    try:
        c = modular.wronskian_constant(int(cfg["qseries_order"]))
    except ArithmeticError as e:
        return judge("modular.wronskian", 1, 0, str(e))
    return judge("modular.wronskian", 0, 0, f"pi1' pi2 - pi1 pi2' = {c} psi^2/(1 - psi^3)")


def _wronskian_fit(cfg):
    f = modular.wronskian_solution_fit(int(cfg["qseries_order"]))
    ok = f.residual_zero and (f.a, f.b, f.c) == (0, 0, -2)
    return judge("modular.wronskian_fit", 0 if ok else 1, 0, f"(a, b, c) = ({f.a}, {f.b}, {f.c})")


_PAIRS = ((0.05, 0.1), (0.02 + 0.01j, 0.08), (0.1, 0.03 - 0.02j))


def _pairing(cfg):
    res = 0.0
    for v, a in _PAIRS:
        res = max(res, abs(modular.singular_cycle_pairing(v, a) + modular.singular_cycle_pairing(a, v)),
                  abs(modular.singular_cycle_pairing(a, a)), modular.beltrami_residual(v, a))
    return judge("modular.pairing", res, 1e-8, "antisymmetry, vanishing at v = alpha, Beltrami form")


# ---------------------------------------------------------------------------
# curves

def _galois(cfg):
    res = max(curves.galois_residual(p) for p in (0.3, 0.5 + 0.2j, -0.7j))
    return judge("curves.galois", res, 1e-10, "branch set under x -> rho x and x -> 1/x")


def _vieta(cfg):
    res = max(curves.vieta_residual(x, p) for p in (0.3, 0.5 + 0.2j) for x in (0.4, -1.2 + 0.3j, 2j))
    return judge("curves.vieta", res, 1e-10, "sum, pair sum and product of the three sheets")


def _loop_monodromy(cfg):
    psi = float(cfg["chain_psi"])
    bad = 0
    free = curves.circle_path(3.0 + 3.0j, 0.1)
    bad += curves.loop_permutation(free, psi) != (0, 1, 2)
    total = (0, 1, 2)
    for _, _, perm in curves.transposition_loops(psi):
        bad += curves.permutation_sign(perm) != -1 or sum(i == p for i, p in enumerate(perm)) != 1
        total = curves.compose_permutations(total, perm)
    big = curves.circle_path(0j, 3 * max(abs(curves.branch_points(psi))))
    big = curves.ContourPath((curves.line(0j, big.start), *big.segments, curves.line(big.start, 0j)))
    bad += curves.loop_permutation(big, psi) != total
    return judge("curves.loop_monodromy", bad, 0,
                 "small loop trivial; keyhole loops are transpositions; their product is the big loop")


def _deformation_invariance(cfg):
    psi = float(cfg["chain_psi"])
    vals = [curves.chain_integral_K(psi, curves.standard_chain(psi)),
            curves.chain_integral_K(psi, curves.standard_chain(psi, detour=0.3)),
            curves.chain_integral_K(psi, curves.arc_chain(psi))]
    res = max(abs(v - vals[0]) for v in vals)
    return judge("curves.deformation", res, 1e-8, f"K({psi}) = {vals[0]:.12g} on three homotopic paths")


def _theorem(cfg):
    pts = [complex(s) for s in str(cfg["theorem_points"]).split(",")]
    inh = [curves.inhomogeneity_of_K(p) for p in pts]
    vals = [h.value for h in inh]
    scale = max(abs(v) for v in vals)
    spread = max(abs(v - vals[0]) for v in vals) / scale
    local = all(h.constant for h in inh)
    note = (f"(psi^-3 L_PF) K = {', '.join(f'{v:.6g}' for v in vals)} at psi = {', '.join(str(p) for p in pts)}; "
            f"locally constant: {local}; equals the exact-primitive endpoint value: {all(h.matches_primitive for h in inh)}; "
            f"endpoint oracle {inh[0].endpoint_oracle} matched: {any(h.matches_oracle for h in inh)}")
    return judge("curves.theorem", spread, 1e-4, note)


def _theorem_printed(cfg):
    d = curves.ENDPOINT_DIFFERENCE - curves.PRINTED_ENDPOINT_DIFFERENCE
    return flagged("curves.theorem_printed", float(abs(d)), 0,
                   f"endpoint terms {curves.ENDPOINT_END} - {curves.ENDPOINT_START} = {curves.ENDPOINT_DIFFERENCE}; "
                   f"printed 1/6 - (-1/9) = {curves.PRINTED_ENDPOINT_DIFFERENCE}")


def _torsion_periods(cfg):
    base = float(cfg["chain_psi"])
    psis = [base + 0.03 * cmath.exp(2j * math.pi * j / 6) for j in range(6)]
    vals = [curves.torsion_chain_integral(p, 3, 1) for p in psis]
    fit = curves.fit_to_periods(psis, vals)
    return judge("curves.torsion_periods", fit.residual / fit.scale, 1e-8,
                 "chain between 3-torsion points fitted by c1 pi1 + c2 pi2")


def _weierstrass(cfg):
    res = max(abs(curves.weierstrass_operator_residual(g2, g3)) for g2, g3 in ((-1, -1), (1, -2)))
    oracle = abs(curves.weierstrass_chain(0, -2) - curves.weierstrass_scaling_oracle(-2))
    return judge("curves.weierstrass", max(res, oracle), 1e-8, "chain integral under the w-operator; g2 = 0 closed form")


# ---------------------------------------------------------------------------
# cy3

def _cy3_annihilation(name):
    def run(cfg):
        reps = cy3.annihilation_check(int(cfg["cy3_K"]), int(cfg["cy3_M"]))
        return next(r for r in reps if r.check.endswith(name))
    return run


def _barnes(nu):
    def run(cfg):
        r = cy3.barnes_annihilation(nu, int(cfg["barnes_order"]))
        return VerificationReport(f"cy3.barnes[{nu}]", r.status, r.residual, r.tolerance, r.note)
    return run


def _orbifold(key):
    def run(cfg):
        e = cy3.orbifold_expansion_b0(int(cfg["orbifold_layers"]), int(cfg["orbifold_order"]))
        return next(r for r in e.reports if r.check == key)
    return run


def _c1(cfg):
    return judge("cy3.c1", abs(cy3.c_k(1) - 60), 0, f"c_1 = {cy3.c_k(1)}")


REGISTRY: dict[str, Callable[[dict], VerificationReport]] = {
    "opalg.factorization": _factorization,
    "opalg.golden.hesse": _golden("hesse", opalg.hesse_display),
    "opalg.golden.weierstrass": _golden("weierstrass", opalg.weierstrass_display),
    "opalg.golden.legendre": _golden("legendre", None),
    "frobenius.annihilation": _series_annihilation,
    "frobenius.inhomogeneity": _inhomogeneity,
    "frobenius.deformation": _deformation,
    "frobenius.monodromy": _monodromy,
    "oscint.quadrature": _quadrature,
    "oscint.decomposition": _decomposition,
    "oscint.functional_relations": _relations,
    "oscint.reflection": _reflection,
    "oscint.scorer": _scorer,
    "modular.lambert": _lambert,
    "modular.mirror_map": _mirror,
    "modular.li2": _li2,
    "modular.hauptmodul": _bridge,
    "modular.wronskian": _wronskian,
    "modular.wronskian_fit": _wronskian_fit,
    "modular.pairing": _pairing,
    "curves.galois": _galois,
    "curves.vieta": _vieta,
    "curves.loop_monodromy": _loop_monodromy,
    "curves.deformation": _deformation_invariance,
    "curves.theorem": _theorem,
    "curves.theorem_printed": _theorem_printed,
    "curves.torsion_periods": _torsion_periods,
    "curves.weierstrass": _weierstrass,
    "cy3.annihilation.D1": _cy3_annihilation("D1"),
    "cy3.annihilation.D2": _cy3_annihilation("D2"),
    "cy3.recursion": lambda cfg: cy3.recursion_check(int(cfg["cy3_recursion_K"])),
    "cy3.fundamental_period": lambda cfg: cy3.period_constructions_check(int(cfg["cy3_K"]), int(cfg["cy3_M"])),
    "cy3.c1": _c1,
    "cy3.barnes[-1]": _barnes(-1),
    "cy3.barnes[1/2]": _barnes(Fraction(1, 2)),
    "cy3.orbifold.layers": _orbifold("cy3.orbifold.layers"),
    "cy3.orbifold.nu0_seed": _orbifold("cy3.orbifold.nu0_seed"),
    "cy3.orbifold.u0_u_minus1": _orbifold("cy3.orbifold.u0_u_minus1"),
    "cy3.orbifold.u_minus1_oscillating": _orbifold("cy3.orbifold.u_minus1_oscillating"),
}


def select(pattern: str | None) -> list[str]:
    ids = sorted(REGISTRY)
    if pattern is None:
        return ids
    chosen = [i for i in ids if fnmatch.fnmatchcase(i, pattern)]
    if not chosen:
        raise KeyError(f"no check matches {pattern!r}")
    return chosen


def run_check(check_id: str, cfg: dict | None = None) -> VerificationReport:
    cfg = resolve_config(cfg) if cfg is None or set(cfg) != set(DEFAULTS) else cfg

    def body():
        r = REGISTRY[check_id](cfg)
        return VerificationReport(check_id, r.status, r.residual, r.tolerance, r.note)
    return timed(body)


def run_suite(pattern: str | None = None, overrides: dict | None = None) -> tuple[list[VerificationReport], dict]:
    """Run the matching checks; reports come back ordered by check id."""
    cfg = resolve_config(overrides)
    ids = select(pattern)
    workers = max(1, int(cfg["workers"]))
    if workers == 1:
        reports = [run_check(i, cfg) for i in ids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda i: run_check(i, cfg), ids))
    return reports, cfg


def suite_json(reports: list[VerificationReport], cfg: dict, timings: bool = False) -> str:
    return json.dumps({"suite": [r.as_dict(timings) for r in reports], "config_hash": config_hash(cfg)},
                      indent=2, sort_keys=True) + "\n"
