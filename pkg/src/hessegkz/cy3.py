"""The compact threefold in the (a, b) chart: fundamental period, U_nu and the b = 0 expansion.

Monomials are a^m (b^-6)^k; on such a monomial theta_a = m and theta_b = -6k.
U_nu is normalised as a^nu sum_l Gamma(nu+1)/(l!^3 Gamma(nu-3l+1)) a^(-3l), whose
hypergeometric form has argument -27/a^3.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import opalg
from .opalg import ThetaOperator, apply_to_series
from .report import VerificationReport, flagged, judge
from .series import LogSeries

RHO = cmath.exp(2j * math.pi / 3)

_BASES = {"-432": complex(-432), "2pi": complex(2 * math.pi), "3": complex(3)}


def _nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


@dataclass(frozen=True)
class GammaTerm:
    """coeff * prod Gamma(up) / prod Gamma(down) * prod base^exponent, kept symbolic.

    Powers use the principal branch.  A pole in ``down`` makes the term zero.
    """

    coeff: Fraction
    up: tuple[Fraction, ...] = ()
    down: tuple[Fraction, ...] = ()
    powers: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def zero(cls) -> "GammaTerm":
        return cls(Fraction(0))

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0 or any(_nonpositive_integer(x) for x in self.down)

    def value(self) -> complex:
        if self.is_zero:
            return 0j
        if any(_nonpositive_integer(x) for x in self.up):
            raise ZeroDivisionError(f"Gamma pole in {self}")
        v = mpmath.mpf(self.coeff.numerator) / self.coeff.denominator
        for x in self.up:
            v *= mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator)
        for x in self.down:
            v *= mpmath.rgamma(mpmath.mpf(x.numerator) / x.denominator)
        out = complex(v)
        for base, e in self.powers:
            out *= cmath.exp(float(e) * cmath.log(_BASES[base]))
        return out

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [str(self.coeff)]
        parts += [f"G({x})" for x in self.up]
        parts += [f"/G({x})" for x in self.down]
        parts += [f"({b})^({e})" for b, e in self.powers]
        return " ".join(parts)


# ---------------------------------------------------------------------------
# U_k and U_nu

def u_k_coefficients(k: int) -> dict[int, int]:
    """{exponent of a: coefficient} of the finite sum U_k."""
    if k < 0:
        raise ValueError("finite sum needs k >= 0")
    return {k - 3 * l: math.factorial(k) // (math.factorial(l) ** 3 * math.factorial(k - 3 * l))
            for l in range(k // 3 + 1)}


def _is_nonneg_int(nu: Fraction) -> bool:
    return nu.denominator == 1 and nu >= 0


@dataclass(frozen=True)
class BarnesSeries:
    """U_nu near a = 0: coefficient of a^n is tokens[n % 3] * ratios[n].

    Consecutive coefficients of one residue class are related by the rational
    factor -(n - nu)^3 / (27 (n+1)(n+2)(n+3)), so annihilation by L_nu can be
    checked class by class in exact arithmetic.  For integer nu >= 0 the
    Gamma(-nu) pole is resolved by its limit and the tokens are the rational 1.
    """

    nu: Fraction
    tokens: tuple[GammaTerm, GammaTerm, GammaTerm]
    ratios: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.ratios) - 1

    def class_series(self, r: int) -> LogSeries:
        terms = [self.ratios[n] if n % 3 == r else 0 for n in range(self.order + 1)]
        return LogSeries.from_terms(0, terms, var="a")

    def coefficients(self) -> list[complex]:
        vals = [t.value() for t in self.tokens]
        return [vals[n % 3] * float(self.ratios[n]) for n in range(self.order + 1)]

    def __call__(self, a: complex) -> complex:
        a = complex(a)
        return sum(c * a ** n for n, c in enumerate(self.coefficients()))


def barnes_series(nu, N: int = 100) -> BarnesSeries:
    """1/(3 Gamma(-nu)) sum_n Gamma((n-nu)/3)/Gamma(1-(n-nu)/3)^2 (-a)^n/n!, through a^N."""
    nu = Fraction(nu)
    ratios = [Fraction(0)] * (N + 1)
    if _is_nonneg_int(nu):
        k = int(nu)
        for e, c in u_k_coefficients(k).items():
            if e <= N:
                ratios[e] = Fraction(c)
        one = GammaTerm(Fraction(1))
        return BarnesSeries(nu, (one, one, one), tuple(ratios))
    tokens = []
    for r in range(3):
        s = (r - nu) / 3
        tokens.append(GammaTerm(Fraction((-1) ** r, 3 * math.factorial(r)), (s,), (-nu, 1 - s, 1 - s)))
        if r <= N:
            ratios[r] = Fraction(1)
    for n in range(N - 2):
        ratios[n + 3] = ratios[n] * -(n - nu) ** 3 / (27 * (n + 1) * (n + 2) * (n + 3))
    return BarnesSeries(nu, tuple(tokens), tuple(ratios))


def barnes_display(a: complex, nu, N: int = 200) -> complex:
    """The Gamma series written with (-3 rho a)^n and prefactor 3^(-1-nu) rho^(nu/2)/Gamma(-nu).

    It equals 3^(-nu) rho^(nu/2) U_nu(3 rho a); it is not itself annihilated by L_nu.
    """
    nu = Fraction(nu)
    if _is_nonneg_int(nu):
        raise ValueError("Gamma(-nu) pole: use barnes_series for integer nu >= 0")
    x = -3 * RHO * complex(a)
    total = mpmath.mpc(0)
    for n in range(N):
        s = mpmath.mpf(n - nu.numerator / nu.denominator) / 3
        g = mpmath.rgamma(1 - s) ** 2
        if g:
            total += mpmath.gamma(s) * g * mpmath.mpc(x) ** n / mpmath.factorial(n)
    nu_f = float(nu)
    pref = 3 ** (-1 - nu_f) * cmath.exp(1j * math.pi * nu_f / 3) / math.gamma(-nu_f)
    return pref * complex(total)


def u_nu(a: complex, nu, mode: str = "finite", N: int = 100) -> complex:
    """U_nu(a) from the finite sum, the hypergeometric form or the series at a = 0."""
    nu = Fraction(nu)
    a = complex(a)
    if mode == "finite":
        if not _is_nonneg_int(nu):
            raise ValueError("finite-sum mode needs a nonnegative integer nu")
        return sum(c * a ** e for e, c in u_k_coefficients(int(nu)).items())
    if mode == "pfq":
        if abs(a) <= 1:
            raise ValueError("pfq mode needs |a| > 1")
        nf = mpmath.mpf(nu.numerator) / nu.denominator
        f = mpmath.hyp3f2(-nf / 3, (1 - nf) / 3, (2 - nf) / 3, 1, 1, -27 / mpmath.mpc(a) ** 3)
        return complex(mpmath.mpc(a) ** nf * f)
    if mode == "barnes":
        if abs(a) >= 3:
            raise ValueError("barnes mode converges for |a| < 3")
        return barnes_series(nu, N)(a)
    raise ValueError(f"unknown mode {mode!r}; use finite, pfq or barnes")


def lnu_a(nu) -> ThetaOperator:
    """L_nu in the a chart, a = -3 psi."""
    return opalg.lnu(nu).change_chart("a", Fraction(-1, 3), 1)


def barnes_annihilation(nu, N: int = 100) -> VerificationReport:
    """L_nu on every residue class of the Barnes series, exactly through a^N."""
    bs = barnes_series(nu, N)
    op = lnu_a(nu)
    bad = 0
    for r in range(3):
        if bs.tokens[r].is_zero:
            continue
        out = apply_to_series(op, bs.class_series(r))
        bad += sum(1 for c in out.coeffs[0] if c != 0)
    return judge(f"cy3.barnes_annihilation[nu={nu}]", bad, 0,
                 f"nonzero coefficients of L_nu U_nu through a^{N}")


# ---------------------------------------------------------------------------
# two-variable series

@dataclass(frozen=True)
class BiSeries:
    """Exact coefficients of a^m (b^-6)^k for k <= K and m <= M."""

    coeffs: dict = field(hash=False)
    K: int
    M: int

    def __getitem__(self, key) -> Fraction:
        return self.coeffs.get(key, Fraction(0))

    def same_as(self, other: "BiSeries") -> bool:
        K, M = min(self.K, other.K), min(self.M, other.M)
        keys = {k for k in (*self.coeffs, *other.coeffs) if k[0] <= M and k[1] <= K}
        return all(self[k] == other[k] for k in keys)

    def in_lattice(self) -> bool:
        """Support lies on a^m (b^-6)^k with 0 <= m <= k and k - m divisible by 3."""
        return all(0 <= m <= k and (k - m) % 3 == 0 for (m, k), c in self.coeffs.items() if c)

    def evaluate(self, a: complex, b: complex) -> complex:
        w = complex(b) ** -6
        return sum(float(c) * complex(a) ** m * w ** k for (m, k), c in self.coeffs.items())

    def to_csv(self) -> str:
        rows = ["m,k,numerator,denominator"]
        for (m, k) in sorted(self.coeffs, key=lambda t: (t[1], t[0])):
            c = Fraction(self.coeffs[(m, k)])
            rows.append(f"{m},{k},{c.numerator},{c.denominator}")
        return "\n".join(rows) + "\n"


def c_k(k: int) -> int:
    return math.factorial(6 * k) // (math.factorial(3 * k) * math.factorial(2 * k) * math.factorial(k))


def fundamental_period(K: int = 10, M: int = 30) -> BiSeries:
    """omega_0 = sum_k c_k b^(-6k) U_k(a), truncated to k <= K, m <= M."""
    out = {}
    for k in range(K + 1):
        ck = c_k(k)
        for m, u in u_k_coefficients(k).items():
            if m <= M:
                out[(m, k)] = Fraction(ck * u)
    return BiSeries(out, K, M)


def fundamental_period_double_sum(K: int = 10, M: int = 30) -> BiSeries:
    """The same period from the (n, m) double sum, a^m (b^-6)^(3n+m)."""
    f = math.factorial
    out = {}
    for n in range(K // 3 + 1):
        for m in range(min(M, K - 3 * n) + 1):
            c = f(18 * n + 6 * m) // (f(9 * n + 3 * m) * f(6 * n + 2 * m) * f(n) ** 3 * f(m))
            out[(m, 3 * n + m)] = Fraction(c)
    return BiSeries(out, K, M)


def apply_operator(op: ThetaOperator, s: BiSeries) -> tuple[BiSeries, set]:
    """Exact action of an (a, b) operator; also returns the keys whose value is complete.

    Every b exponent in ``op`` must be a multiple of -6.  A result coefficient is
    complete when each source monomial it draws on lies inside the truncation.
    """
    if op.variables != ("a", "b"):
        raise ValueError("operator must be in (a, b)")
    shifts = []
    for (ea, eb), poly in op.terms:
        if eb % 6:
            raise ValueError("b exponents must be multiples of 6")
        shifts.append((ea, -eb // 6, poly))
    out: dict = {}
    for (m, k), c in s.coeffs.items():
        for ea, ek, poly in shifts:
            v = sum(coef * Fraction(m) ** da * Fraction(-6 * k) ** db for (da, db), coef in poly)
            if v:
                key = (m + ea, k + ek)
                out[key] = out.get(key, 0) + v * c
    complete = set()
    for m in range(-3, s.M + 1):
        for k in range(0, s.K + 1):
            if all(0 <= m - ea <= s.M and 0 <= k - ek <= s.K or (m - ea < 0 or k - ek < 0)
                   for ea, ek, _ in shifts):
                complete.add((m, k))
    return BiSeries({k: v for k, v in out.items() if v}, s.K, s.M), complete


def annihilation_check(K: int = 10, M: int = 30) -> list[VerificationReport]:
    """D1 and D2 on the truncated fundamental period."""
    w = fundamental_period(K, M)
    reports = []
    for name, op in (("D1", opalg.d1()), ("D2", opalg.d2())):
        out, complete = apply_operator(op, w)
        bad = [key for key in complete if out[key] != 0]
        reports.append(judge(f"cy3.annihilation.{name}", len(bad), 0,
                             f"nonzero complete coefficients of {name} omega_0 (k <= {K}, a-order <= {M})"))
    return reports


def recursion_check(K: int = 20) -> VerificationReport:
    """theta_a U_(k+1) = (k+1) a U_k exactly for k = 0..K."""
    bad = 0
    for k in range(K + 1):
        lhs = {e: e * c for e, c in u_k_coefficients(k + 1).items() if e * c}
        rhs = {e + 1: (k + 1) * c for e, c in u_k_coefficients(k).items()}
        bad += lhs != rhs
    return judge("cy3.recursion", bad, 0, f"failed indices among k <= {K}")


def period_constructions_check(K: int = 10, M: int = 30) -> VerificationReport:
    a, b = fundamental_period(K, M), fundamental_period_double_sum(K, M)
    bad = 0 if a.same_as(b) and a.in_lattice() else 1
    return judge("cy3.fundamental_period", bad, 0, f"double sum vs sum c_k U_k, c_1 = {c_k(1)}")


# ---------------------------------------------------------------------------
# expansion at b = 0

def d_coefficient(n: int) -> GammaTerm:
    """d_n in omega_0 = sum_n d_n b^n U_(-n/6)(a), from the residues at s = -n/6.

    Only n = 1, 5 (mod 6) carry a pole; the other layers are absent.
    """
    j, r = divmod(n, 6)
    if r == 1:
        other = Fraction(5 - n, 6)
    elif r == 5:
        other = Fraction(1 - n, 6)
    else:
        return GammaTerm.zero()
    s = Fraction(n, 6)
    return GammaTerm(Fraction((-1) ** j, math.factorial(j)), (s, other), (1 - s,),
                     (("-432", -s), ("2pi", Fraction(-1))))


@dataclass(frozen=True)
class OrbifoldExpansion:
    d: tuple[GammaTerm, ...]
    layers: tuple[BarnesSeries, ...]
    reports: tuple[VerificationReport, ...]

    def evaluate(self, a: complex, b: complex) -> complex:
        return sum(dn.value() * complex(b) ** n * layer(a)
                   for n, (dn, layer) in enumerate(zip(self.d, self.layers)) if not dn.is_zero)


def oscillating_ratio(N: int = 20) -> tuple[list[complex | None], list[int]]:
    """Ratios of psi U_(-1)(-3 psi) to the oscillating series coefficient by coefficient.

    Returns the ratios (None where U_(-1) has no term) and the indices where
    the oscillating series has a term that U_(-1) lacks.
    """
    from .oscint import _series_terms  # coefficient of psi^(n+1) at psi = 1

    layer = barnes_series(-1, N)
    coeffs = layer.coefficients()
    osc = _series_terms(1.0, N + 1)
    ratios, missing = [], []
    for n in range(N + 1):
        u = coeffs[n] * (-3) ** n
        if abs(u) == 0:
            ratios.append(None)
            if abs(osc[n]) > 0:
                missing.append(n)
        else:
            ratios.append(u / osc[n])
    return ratios, missing


def orbifold_expansion_b0(K: int = 12, order: int = 60, workers: int = 4) -> OrbifoldExpansion:
    """d_n and the layers U_(-n/6) for n <= K, with their checks."""
    ns = list(range(K + 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        layers = tuple(pool.map(lambda n: barnes_series(Fraction(-n, 6), order), ns))
    d = tuple(d_coefficient(n) for n in ns)
    reports = []
    bad = 0
    for n, layer in zip(ns, layers):
        op = lnu_a(Fraction(-n, 6))
        for r in range(3):
            if not layer.tokens[r].is_zero:
                bad += sum(1 for c in apply_to_series(op, layer.class_series(r)).coeffs[0] if c != 0)
    reports.append(judge("cy3.orbifold.layers", bad, 0, f"L_(-n/6) on layers n <= {K} through a^{order}"))
    seed = apply_to_series(opalg.l_cy3().rename("a"), layers[0].class_series(0))
    reports.append(judge("cy3.orbifold.nu0_seed", sum(1 for c in seed.coeffs[0] if c), 0,
                         "layer nu = 0 is the constant solution of L_CY3"))
    present = [n for n in (0, 6) if n <= K and not d[n].is_zero]
    reports.append(flagged("cy3.orbifold.u0_u_minus1", 2 - len(present), 0,
                           "d_0 = d_6 = 0: only n = 1, 5 mod 6 layers occur, so U_0 and U_(-1) do not appear"))
    ratios, missing = oscillating_ratio(20)
    vals = [r for r in ratios if r is not None]
    spread = max(abs(r - vals[0]) for r in vals) / abs(vals[0])
    reports.append(flagged("cy3.orbifold.u_minus1_oscillating", spread, 1e-12,
                           f"psi U_(-1)(-3 psi) = {vals[0].real:.15g} x (J1 + J2); "
                           f"the J3 class ({len(missing)} coefficients through 20) is absent"))
    return OrbifoldExpansion(d, layers, tuple(reports))
