"""Hypergeometric and Frobenius series solutions, connection data and monodromy."""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .opalg import (
    ThetaOperator,
    apply_to_series,
    const,
    d_gkz,
    d_gkz_alpha,
    l_pf,
    l_pf_alpha,
    taylor_coefficients,
    var,
)
from .series import LogSeries

RHO = cmath.exp(2j * math.pi / 3)
KAPPA = 1j / math.sqrt(3)
THIRD = Fraction(1, 3)


class DivergenceError(ValueError):
    pass


class ResonanceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# generalized hypergeometric series

@dataclass(frozen=True)
class PFqSpec:
    """pFq(upper; lower; scale * x^power)."""

    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    power: int = 1
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(Fraction(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(Fraction(b) for b in self.lower))
        object.__setattr__(self, "scale", Fraction(self.scale))
        for b in self.lower:
            if b <= 0 and b.denominator == 1:
                raise ValueError(f"lower parameter {b} is a non-positive integer")
        if self.power < 1:
            raise ValueError("power must be a positive integer")

    def ratio(self, n):
        """Term ratio t_{n+1}/t_n divided by the argument."""
        r = Fraction(1, n + 1) if isinstance(n, int) else 1 / (n + 1)
        for a in self.upper:
            r *= a + n
        for b in self.lower:
            r /= b + n
        return r


@dataclass(frozen=True)
class PFqResult:
    value: complex
    tail_bound: float
    terms: int

    def __complex__(self):
        return complex(self.value)


def pfq_coefficients(spec: PFqSpec, n_terms: int) -> list[Fraction]:
    """Exact coefficients (a)_n/((b)_n n!) scale^n, n < n_terms."""
    out = [Fraction(1)]
    for n in range(n_terms - 1):
        out.append(out[-1] * spec.ratio(n) * spec.scale)
    return out


def pfq_eval(spec: PFqSpec, x: complex, tol: float = 1e-15, max_terms: int = 100000) -> PFqResult:
    """Partial sums with a rigorous geometric tail bound.

    For p = q + 1 the term ratio at index m >= n is bounded by
    |X| prod (1 + |a_i - b_i| / (n + b_i)) once every n + b_i > 0, pairing the
    upper parameters with the lower ones and 1.
    """
    X = complex(spec.scale) * complex(x) ** spec.power
    if len(spec.upper) > len(spec.lower) + 1:
        raise DivergenceError("p > q + 1: series has zero radius of convergence")
    bounded = len(spec.upper) == len(spec.lower) + 1
    if bounded and abs(X) >= 1:
        raise DivergenceError(f"|argument| = {abs(X):.6g} >= 1 outside the disk of convergence")
    lowers = list(spec.lower) + ([Fraction(1)] if bounded else [])
    uppers = list(spec.upper) + [Fraction(0)] * (len(lowers) - len(spec.upper))
    total = 0j
    term = 1 + 0j
    for n in range(max_terms):
        total += term
        nxt = term * X * float(spec.ratio(n))
        m = n + 1
        if all(m + float(b) > 0 for b in lowers):
            R = abs(X)
            for a, b in zip(uppers, lowers):
                R *= 1 + abs(float(a - b)) / (m + float(b))
            if R < 1:
                bound = abs(nxt) / (1 - R)
                if bound < tol or nxt == 0:
                    return PFqResult(total + nxt, bound, n + 2)
        term = nxt
    raise DivergenceError(f"tolerance {tol} not reached in {max_terms} terms")


def pfq(spec: PFqSpec, x: complex, tol: float = 1e-15) -> complex:
    return pfq_eval(spec, x, tol).value


def pfq_series(spec: PFqSpec, order: int, rho=0, var_name: str = "z") -> LogSeries:
    """x^rho pFq(scale x^power) as an exact series known through x^(rho+order)."""
    coeffs = [Fraction(0)] * (order + 1)
    n_terms = order // spec.power + 1
    for n, c in enumerate(pfq_coefficients(spec, n_terms)):
        coeffs[n * spec.power] = c
    return LogSeries.from_terms(Fraction(rho), coeffs, order, var_name)


F_PI1 = PFqSpec((THIRD, THIRD), (2 * THIRD,), power=3)
F_PI2 = PFqSpec((2 * THIRD, 2 * THIRD), (4 * THIRD,), power=3)
F_J3 = PFqSpec((1, 1, 1), (4 * THIRD, 5 * THIRD), power=3)
F_OMEGA = PFqSpec((THIRD, 2 * THIRD), (1,), power=1)


# ---------------------------------------------------------------------------
# orbifold point psi = 0

def orbifold_basis(N: int = 200) -> tuple[LogSeries, LogSeries, LogSeries]:
    """pi1, pi2, J3 as exact psi-series known through psi^N."""
    return (
        pfq_series(F_PI1, N - 1, 1, "psi"),
        pfq_series(F_PI2, N - 2, 2, "psi"),
        pfq_series(F_J3, N - 3, 3, "psi"),
    )


def pi1(psi: complex) -> complex:
    return complex(psi) * pfq(F_PI1, psi)


def pi2(psi: complex) -> complex:
    return complex(psi) ** 2 * pfq(F_PI2, psi)


def j3_normalized(psi: complex) -> complex:
    return complex(psi) ** 3 * pfq(F_J3, psi)


# ---------------------------------------------------------------------------
# cusp alpha = 0

G13 = math.gamma(1 / 3)
G23 = math.gamma(2 / 3)
C_PI1 = -RHO * G13 / G23 ** 2
C_PI2 = RHO ** 2 * math.gamma(-1 / 3) / G13 ** 2


def omega0(alpha: complex) -> complex:
    return pfq(F_OMEGA, alpha)


def omega1(alpha: complex) -> complex:
    """(i/sqrt 3) 2F1(1/3, 2/3; 1; 1 - alpha)."""
    return KAPPA * pfq(F_OMEGA, 1 - complex(alpha))


def _mp_2f1(a, b, c, x):
    return complex(mpmath.hyp2f1(a, b, c, x))


def pi_tilde(alpha: complex) -> tuple[complex, complex]:
    """Rescaled orbifold periods at psi = alpha^(-1/3) (principal root).

    For small |alpha| the point psi^3 = 1/alpha is outside the unit disk, so the
    two 2F1 factors are continued with mpmath.  Real alpha > 0 is read as the
    limit from Im alpha < 0, i.e. psi^3 approached from above the cut [1, oo).
    """
    alpha = complex(alpha)
    psi = alpha ** (-1 / 3)
    x = 1 / alpha
    if x.imag == 0 and x.real >= 1:
        x = mpmath.mpc(x.real, 1e-40)
    with mpmath.workdps(30):
        f1 = _mp_2f1(mpmath.mpf(1) / 3, mpmath.mpf(1) / 3, mpmath.mpf(2) / 3, x)
        f2 = _mp_2f1(mpmath.mpf(2) / 3, mpmath.mpf(2) / 3, mpmath.mpf(4) / 3, x)
    return C_PI1 * psi * f1, C_PI2 * psi ** 2 * f2


@dataclass(frozen=True)
class CuspBasis:
    """omega0 as an exact alpha-series plus numeric access to the rest."""

    omega0_series: LogSeries

    @staticmethod
    def omega0(alpha):
        return omega0(alpha)

    @staticmethod
    def omega1(alpha):
        return omega1(alpha)

    @staticmethod
    def pi_tilde(alpha):
        return pi_tilde(alpha)


def cusp_basis(N: int = 200) -> CuspBasis:
    return CuspBasis(pfq_series(F_OMEGA, N, 0, "alpha"))


@dataclass(frozen=True)
class ConnectionResidual:
    alpha: complex
    omega0: float
    omega1_displayed: float
    omega1_fitted: float
    fitted_coefficients: tuple[complex, complex]


def connection_residuals(alpha: complex) -> ConnectionResidual:
    """Residuals of  omega0 = pt1 + pt2  and of two omega1 combinations.

    ``omega1_displayed`` uses kappa(-rho pt1 + rho^2 pt2); ``omega1_fitted`` uses
    kappa(-rho^2 pt1 + rho pt2), the combination that holds on the same branch
    on which the omega0 identity holds.
    """
    t1, t2 = pi_tilde(alpha)
    w0, w1 = omega0(alpha), omega1(alpha)
    shown = KAPPA * (-RHO * t1 + RHO ** 2 * t2)
    fitted = KAPPA * (-RHO ** 2 * t1 + RHO * t2)
    return ConnectionResidual(
        complex(alpha),
        abs(w0 - t1 - t2),
        abs(w1 - shown),
        abs(w1 - fitted),
        (-RHO ** 2 * KAPPA, RHO * KAPPA),
    )


# ---------------------------------------------------------------------------
# Frobenius method

def _series_div(a: list, b: list, K: int) -> list:
    """a / b as truncated power series in eps (b[0] != 0)."""
    out = []
    for n in range(K + 1):
        s = a[n] if n < len(a) else 0
        for i in range(1, n + 1):
            if i < len(b):
                s -= b[i] * out[n - i]
        out.append(s / b[0])
    return out


def _series_mul(a: list, b: list, K: int) -> list:
    out = [0] * (K + 1)
    for i, x in enumerate(a[: K + 1]):
        if x:
            for j, y in enumerate(b[: K + 1 - i]):
                out[i + j] += x * y
    return out


def _poly_roots_rational(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Rational roots with multiplicity; raises if the polynomial does not split."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    roots: list[Fraction] = []
    # strip zero roots
    while coeffs and coeffs[0] == 0:
        roots.append(Fraction(0))
        coeffs = coeffs[1:]
    deg = len(coeffs) - 1
    if deg <= 0:
        return roots
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]

    def divisors(n):
        n = abs(n)
        return [d for d in range(1, n + 1) if n % d == 0]

    cands = sorted({Fraction(s * p, q) for p in divisors(ints[0]) for q in divisors(ints[-1]) for s in (1, -1)})
    work = coeffs
    for r in cands:
        while len(work) > 1 and sum(c * r ** k for k, c in enumerate(work)) == 0:
            roots.append(r)
            # synthetic division
            n = len(work) - 1
            q = [Fraction(0)] * n
            acc = Fraction(0)
            for d in range(n, 0, -1):
                acc = acc * r + work[d]
                q[d - 1] = acc
            work = q
    if len(work) > 1:
        raise ValueError("indicial polynomial does not split over the rationals")
    return roots


def _prepared(A: ThetaOperator):
    """Terms of z^(-m_min) A as {shift: dense theta polynomial}."""
    if A.nvars != 1:
        raise ValueError("one-variable operator required")
    mmin = A.terms[0][0][0]
    out = {}
    for (m,), _ in A.terms:
        out[m - mmin] = A.univariate(m)
    return out


def frobenius_ladder(A: ThetaOperator, root, N: int, K: int, var_name: str | None = None) -> list[LogSeries]:
    """f_0..f_K = eps-Taylor coefficients of the eps-deformed solution at ``root``.

    y(z, eps) = sum_k c_k(eps) z^(k + root + eps), c_0 = 1, solves
    A y = P_0(root + eps) z^(root + eps), so f_j solves A f = 0 for j below the
    multiplicity of ``root``.
    """
    terms = _prepared(A)
    root = Fraction(root)
    var_name = var_name or A.variables[0]
    P0 = terms[0]
    c = [[Fraction(1)] + [Fraction(0)] * K]
    for k in range(1, N + 1):
        rhs = [Fraction(0)] * (K + 1)
        for m, P in terms.items():
            if m == 0 or m > k:
                continue
            prev = c[k - m]
            if not any(prev):
                continue
            tp = taylor_coefficients(P, root + k - m)
            prod = _series_mul(tp, prev, K)
            rhs = [r - p for r, p in zip(rhs, prod)]
        if not any(rhs):
            c.append([Fraction(0)] * (K + 1))
            continue
        den = taylor_coefficients(P0, root + k) + [Fraction(0)] * (K + 1)
        if den[0] == 0:
            raise ResonanceError(f"indicial polynomial vanishes at {root + k} with nonzero recursion input")
        c.append(_series_div(rhs, den, K))
    out = []
    for n in range(K + 1):
        rows = [[c[k][n - j] for k in range(N + 1)] for j in range(n + 1)]
        out.append(LogSeries(root, tuple(map(tuple, rows)), N, var_name))
    return out


def frobenius_solve(A: ThetaOperator, N: int = 200) -> list[LogSeries]:
    """Basis at the chart origin: each indicial root of multiplicity mu gives
    solutions of log depth 0 .. mu-1.  Roots at integer distance whose
    recursion would need a log are reported as resonant."""
    roots = _poly_roots_rational(A.indicial())
    if len(roots) != A.indicial().__len__() - 1:
        raise ValueError("indicial polynomial degree mismatch")
    basis = []
    seen = []
    for r in sorted(set(roots)):
        mult = roots.count(r)
        series = frobenius_ladder(A, r, N, mult - 1)
        basis.extend(series[:mult])
        seen.append(r)
    return basis


def annihilates(A: ThetaOperator, s: LogSeries) -> bool:
    return apply_to_series(A, s).is_zero()


class NotConstantError(ValueError):
    def __init__(self, first_order, value):
        super().__init__(f"nonconstant result: first offending exponent {first_order} (coefficient {value})")
        self.first_order = first_order
        self.value = value


def inhomogeneous_constant(A: ThetaOperator, s: LogSeries) -> Fraction:
    """The constant c with A s = c through the known range."""
    r = apply_to_series(A, s)
    c = Fraction(0)
    for j, e, v in r.nonzero_terms():
        if j == 0 and e == 0:
            c = v
        else:
            raise NotConstantError(e, v)
    return c


# ---------------------------------------------------------------------------
# epsilon deformation of omega0 around the cusp

def epsilon_deformation(N: int = 100, K: int = 6) -> list[LogSeries]:
    """f_0..f_K with  omega0(alpha, eps) = sum_k f_k eps^k.

    omega0(alpha, eps) = sum_n Q(eps) Gamma(3n+3eps+1)/Gamma(n+eps+1)^3 (alpha/27)^(n+eps),
    Q = Gamma(1+eps)^3/Gamma(1+3eps).  The series are in u = alpha/27 so that
    L_j = log(alpha/27)^j / j!; coefficients follow from the log-Gamma ratio
    recursion c_(n+1)/c_n = 27 (n+eps+1/3)(n+eps+2/3)/(n+1+eps)^2.
    """
    if K < 2:
        raise ValueError("depth K >= 2 required")
    c = [[Fraction(1)] + [Fraction(0)] * K]
    for n in range(N):
        num = _series_mul([n + THIRD, Fraction(1)], [n + 2 * THIRD, Fraction(1)], K)
        num = [27 * x for x in num]
        den = _series_mul([Fraction(n + 1), Fraction(1)], [Fraction(n + 1), Fraction(1)], K)
        c.append(_series_mul(c[-1], _series_div(num, den, K), K))
    out = []
    for k in range(K + 1):
        rows = [[c[n][k - j] for n in range(N + 1)] for j in range(k + 1)]
        out.append(LogSeries(0, tuple(map(tuple, rows)), N, "u"))
    return out


def l_pf_u() -> ThetaOperator:
    """L_PF_alpha rewritten in u = alpha/27."""
    return l_pf_alpha().change_chart("u", 27, 1)


def d_gkz_u() -> ThetaOperator:
    return d_gkz_alpha().change_chart("u", 27, 1)


# ---------------------------------------------------------------------------
# monodromy

def monodromy_image(s: LogSeries, turns=1) -> LogSeries:
    """Continuation along z -> e^(2 pi i turns) z.

    z^e picks up e^(2 pi i turns e) and log z -> log z + 2 pi i turns.
    """
    tw = 2j * math.pi * float(turns)
    rows = []
    for j in range(s.depth + 1):
        row = [0j] * (s.order + 1)
        for i in range(s.depth - j + 1):
            w = tw ** i / math.factorial(i)
            src = s.coeffs[j + i]
            for k in range(s.order + 1):
                row[k] += w * complex(src[k])
        rows.append(row)
    phase = [cmath.exp(tw * float(s.rho + k)) for k in range(s.order + 1)]
    rows = [tuple(r[k] * phase[k] for k in range(s.order + 1)) for r in rows]
    return LogSeries(s.rho, tuple(rows), s.order, s.var)


def _flatten(s: LogSeries, rho, order: int, depth: int) -> np.ndarray:
    return np.array([complex(s.coefficient(j, rho + k)) for j in range(depth + 1) for k in range(order + 1)])


def monodromy_matrix(basis: Sequence[LogSeries], turns=1) -> np.ndarray:
    """M with T(b_i) = sum_j M[i, j] b_j, solved on the coefficient vectors."""
    rho = min(b.rho for b in basis)
    top = min(b.top for b in basis)
    order = int(top - rho)
    depth = max(b.depth for b in basis)
    B = np.array([_flatten(b, rho, order, depth) for b in basis])
    M = []
    for b in basis:
        img = _flatten(monodromy_image(b, turns), rho, order, depth)
        x, *_ = np.linalg.lstsq(B.T, img, rcond=None)
        M.append(x)
    return np.array(M)


def monodromy_at(point: str, N: int = 30) -> np.ndarray:
    """Local monodromy of the moduli coordinate around the point.

    At the orbifold the coordinate is psi^3 (equivalently alpha = psi^-3 is a
    cube of the uniformizer), so one loop is psi -> e^(2 pi i/3) psi acting on
    (pi1, pi2, J3).  At the cusp the loop is alpha -> e^(2 pi i) alpha on the
    Frobenius basis (f0, f1, f2) of D_GKZ.
    """
    if point == "orbifold":
        return monodromy_matrix(orbifold_basis(N), Fraction(1, 3))
    if point == "cusp":
        return monodromy_matrix(frobenius_solve(d_gkz_alpha(), N))
    raise ValueError("point must be 'orbifold' or 'cusp'")


# ---------------------------------------------------------------------------
# CSV

def series_to_csv(s: LogSeries) -> str:
    """Columns j, k, numerator, denominator (exact) or j, k, re, im."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    exact = all(isinstance(c, (int, Fraction)) for row in s.coeffs for c in row)
    w.writerow(["j", "k", "numerator", "denominator"] if exact else ["j", "k", "re", "im"])
    for j, row in enumerate(s.coeffs):
        for k, c in enumerate(row):
            if exact:
                c = Fraction(c)
                w.writerow([j, k, c.numerator, c.denominator])
            else:
                c = complex(c)
                w.writerow([j, k, repr(c.real), repr(c.imag)])
    return buf.getvalue()


def psi_chart_inhomogeneity(N: int = 200) -> Fraction:
    """(psi^-3 o L_PF) J3 for J3 = psi^3 3F2(1,1,1;4/3,5/3;psi^3)."""
    _, _, j3 = orbifold_basis(N)
    return inhomogeneous_constant(var("psi", power=-3) * l_pf(), j3)

