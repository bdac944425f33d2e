"""Oscillating integrals over the V-chain and its rotations, their series and pieces."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .frobenius import F_J3, F_PI1, F_PI2, RHO, pfq

G13 = math.gamma(1 / 3)
G23 = math.gamma(2 / 3)
G43 = math.gamma(4 / 3)
G53 = math.gamma(5 / 3)
TWO_PI_RT3 = 2 * math.pi / math.sqrt(3)

# Gamma prefactors of the three hypergeometric pieces
PREF_J1 = TWO_PI_RT3 * G13 ** 2 / G23 / 27
PREF_J2 = TWO_PI_RT3 * G23 ** 2 / G43 / 27
PREF_J3 = TWO_PI_RT3 / (G43 * G53) / 27

# The 2d integral  int int a0 dx dy / F(x, y, 1)  with a0 = -3 psi equals
# 3 a0 / psi = -9 times the 3d integral I(psi).
REDUCTION_FACTOR = -9


@dataclass(frozen=True)
class Value:
    """A numeric result with error metadata."""

    value: complex
    error: float = 0.0
    meta: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------------------
# series side

def _series_terms(psi: complex, N: int) -> list[complex]:
    """t_n = psi (3 psi)^n / n! Gamma((n+1)/3)^3 / 27 via t_(n+3) = t_n psi^3 (n+1)^2/((n+2)(n+3))."""
    psi = complex(psi)
    t = [psi * G13 ** 3 / 27, psi * 3 * psi * G23 ** 3 / 27, psi * (3 * psi) ** 2 / 2 / 27]
    p3 = psi ** 3
    for n in range(N - 3):
        t.append(t[n] * p3 * (n + 1) ** 2 / ((n + 2) * (n + 3)))
    return t[:N]


def oscillating_series(psi: complex, N: int = 400) -> Value:
    """I(psi) = psi sum_(n<N) (3 psi)^n/n! Gamma((n+1)/3)^3/27, |psi| < 1.

    Tail bound: within a residue class mod 3 consecutive terms shrink by at
    least |psi|^3, so the omitted part is at most (|t_N|+|t_N+1|+|t_N+2|)/(1-|psi|^3).
    """
    psi = complex(psi)
    if abs(psi) >= 1:
        raise ValueError("series needs |psi| < 1")
    t = _series_terms(psi, N + 3)
    total = sum(t[:N])
    tail = sum(abs(x) for x in t[N:N + 3]) / (1 - abs(psi) ** 3)
    return Value(total, tail, {"terms": N})


def j_residue_sums(psi: complex, N: int = 400) -> tuple[complex, complex, complex]:
    """The three residue-class partial sums of the Gamma series."""
    t = _series_terms(psi, N)
    return tuple(sum(t[i::3]) for i in range(3))


def j_decomposition(psi: complex) -> tuple[complex, complex, complex]:
    """J1, J2, J3 from their closed hypergeometric forms."""
    psi = complex(psi)
    if abs(psi) >= 1:
        raise ValueError("pieces need |psi| < 1")
    return (
        PREF_J1 * psi * pfq(F_PI1, psi),
        PREF_J2 * psi ** 2 * pfq(F_PI2, psi),
        PREF_J3 * psi ** 3 * pfq(F_J3, psi),
    )


def reflection_prefactor_residual() -> float:
    """Relative gap between Gamma(1/3)^3/27 and the J1 prefactor."""
    lhs = G13 ** 3 / 27
    return abs(lhs - PREF_J1) / abs(lhs)


# ---------------------------------------------------------------------------
# quadrature side

@dataclass(frozen=True)
class OscillatingSetup:
    psi: complex
    rotation: int = 0
    R: float = 6.0
    order: int = 64

    def __post_init__(self):
        if self.rotation not in (0, 1, 2):
            raise ValueError("rotation must be 0, 1 or 2")

    @property
    def in_domain(self) -> bool:
        """Re(rho^k psi) <= 0, the condition under which Re F >= 0 on the chain."""
        return (RHO ** self.rotation * complex(self.psi)).real <= 0


def _gl(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _cube_tail(c: float, R: float) -> float:
    """Bound for int_R^oo e^(-c x^3) dx."""
    return math.exp(-c * R ** 3) / (3 * c * R ** 2)


def _quad3(psi: complex, R: float, n: int) -> complex:
    x, w = _gl(n, 0.0, R)
    e = np.exp(-x ** 3)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W2 = np.outer(w * e, w * e)
    XY = X * Y
    total = 0j
    for zk, wk, ek in zip(x, w, e):
        total += wk * ek * np.sum(W2 * np.exp(3 * psi * XY * zk))
    return psi * total


def quadrature_3d(setup: OscillatingSetup, tol: float = 1e-6) -> Value:
    """Gauss-Legendre over [0, R]^3 of psi e^(-F), chain rho^k D_3.

    The rotated chain y in rho^k R_+ is realised by y = rho^k t, Jacobian rho^k,
    which turns the integrand into the k = 0 one at rho^k psi.
    """
    psi = complex(setup.psi)
    k = setup.rotation
    eff = RHO ** k * psi
    val = _quad3(eff, setup.R, setup.order)
    coarse = _quad3(eff, setup.R, max(8, (3 * setup.order) // 4))
    # Re F >= (1 - |psi|)(x^3+y^3+z^3) on the octant when |psi| < 1 (AM-GM)
    c = 1 - abs(eff) if abs(eff) < 1 else 0.0
    if c > 0:
        full = G43 / c ** (1 / 3)
        tail = 3 * abs(eff) * full ** 2 * _cube_tail(c, setup.R)
    else:
        tail = math.inf
    meta = {"in_domain": setup.in_domain, "rotation": k, "tail_bound": tail,
            "quad_error_est": abs(val - coarse), "R": setup.R, "order": setup.order}
    if tail > tol:
        r_needed = ((math.log(1 / tol) + 5) / max(c, 1e-3)) ** (1 / 3) if c > 0 else math.inf
        meta["suggested_R"] = r_needed
    return Value(val, abs(val - coarse) + tail, meta)


def _quad2_polar(psi: complex, split: float, n: int) -> complex:
    phi, wphi = _gl(n, 0.0, math.pi / 2)
    r, wr = _gl(n, 0.0, 1.0)
    c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
    A = c ** 3 + s ** 3
    B = 3 * psi * c * s
    R = split * r[None, :]
    inner = R / (A * R ** 3 - B * R ** 2 + 1) * split
    # r > split: r = split / u, dr = split du / u^2
    u = r[None, :]
    outer = split ** 2 / (A * split ** 3 - B * split ** 2 * u + u ** 3)
    return np.sum(((inner + outer) @ wr) * wphi)


def quadrature_2d(psi: complex, R: float = 1.0, order: int = 96) -> Value:
    """int int_(0,oo)^2 a0 dx dy / F(x, y, 1; psi) with a0 = -3 psi.

    Polar coordinates; the radial range is split at ``R`` and the outer part is
    mapped back by r -> R/u, so the algebraic tail is integrated, not cut off.
    Divide by REDUCTION_FACTOR to compare with I(psi).
    """
    psi = complex(psi)
    if psi.imag == 0 and psi.real >= 1:
        raise ValueError("real psi >= 1: the curve meets the integration chain")
    val = -3 * psi * _quad2_polar(psi, R, order)
    coarse = -3 * psi * _quad2_polar(psi, R, max(8, (3 * order) // 4))
    return Value(val, abs(val - coarse), {"R": R, "order": order, "reduction_factor": REDUCTION_FACTOR})


# ---------------------------------------------------------------------------
# functional relations

@dataclass(frozen=True)
class RelationResiduals:
    rho: float
    rho2: float
    difference: float
    period_fit: float
    fit_coefficients: tuple[complex, complex]


def functional_relations(psi: complex, N: int = 400) -> RelationResiduals:
    """I(rho psi) = rho J1 + rho^2 J2 + J3 and I(rho^2 psi) = rho^2 J1 + rho J2 + J3.

    Also fits I(rho psi) - I(psi) against span{pi1, pi2} on points near psi.
    """
    psi = complex(psi)
    J1, J2, J3 = j_decomposition(psi)
    I0 = oscillating_series(psi, N).value
    I1 = oscillating_series(RHO * psi, N).value
    I2 = oscillating_series(RHO ** 2 * psi, N).value
    r1 = abs(I1 - (RHO * J1 + RHO ** 2 * J2 + J3))
    r2 = abs(I2 - (RHO ** 2 * J1 + RHO * J2 + J3))
    rd = abs((I1 - I0) - ((RHO - 1) * J1 + (RHO ** 2 - 1) * J2))
    # periods: pi1 = psi 2F1(...), pi2 = psi^2 2F1(...)
    pts = [psi + 0.02 * cmath.exp(2j * math.pi * j / 8) for j in range(8)]
    rows, rhs = [], []
    for p in pts:
        rows.append([p * pfq(F_PI1, p), p ** 2 * pfq(F_PI2, p)])
        rhs.append(oscillating_series(RHO * p, N).value - oscillating_series(p, N).value)
    A = np.array(rows)
    b = np.array(rhs)
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    fit = float(np.max(np.abs(A @ coef - b))) if abs(psi) else 0.0
    return RelationResiduals(r1, r2, rd, fit, (complex(coef[0]), complex(coef[1])))


# ---------------------------------------------------------------------------
# Airy / Scorer model

def wedge_index(angle: float) -> int | None:
    """k with |angle - 2 pi k/3| < pi/6 (mod 2 pi), else None.

    Boundary rays are excluded: there e^(-y^3) only oscillates and a truncated
    quadrature has no meaning.
    """
    for k in range(3):
        d = (angle - 2 * math.pi * k / 3 + math.pi) % (2 * math.pi) - math.pi
        if abs(d) < math.pi / 6 - 1e-12:
            return k
    return None


def airy_scorer(psi: complex, angle: float, R: float = 8.0, order: int = 200) -> Value:
    """int over y = t e^(i angle), t in [0, R], of e^(-y^3 + 3 psi y) dy."""
    k = wedge_index(angle)
    if k is None:
        raise ValueError(f"ray angle {angle} lies outside the convergence wedges")
    d = np.exp(1j * angle)
    t, w = _gl(order, 0.0, R)
    y = t * d
    val = d * np.sum(w * np.exp(-y ** 3 + 3 * complex(psi) * y))
    decay = math.cos(3 * (angle - 2 * math.pi * k / 3))
    meta = {"wedge": k}
    tail = math.exp(-decay * R ** 3 + 3 * abs(psi) * R) / (decay * 3 * R ** 2)
    return Value(complex(val), tail, meta)


def scorer_ode_residual(psi: complex, angle: float, h: float = 5e-4) -> float:
    """Residual of f''' - 9 psi f' - 9 f = 0 by central differences."""
    f = lambda p: airy_scorer(p, angle).value
    p = complex(psi)
    f_m2, f_m1, f0, f_p1, f_p2 = (f(p + j * h) for j in (-2, -1, 0, 1, 2))
    d1 = (f_p1 - f_m1) / (2 * h)
    d3 = (f_p2 - 2 * f_p1 + 2 * f_m1 - f_m2) / (2 * h ** 3)
    return abs(d3 - 9 * p * d1 - 9 * f0)
