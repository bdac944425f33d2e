"""q-series for the cusp alpha = 0: the eta quotient B, its Lambert form, t_GKZ,
the mirror map, the Hauptmodul bridge, Wronskians and the singular-cycle pairing.

All q-series identities use D = q d/dq.  Since q = exp(2 pi i tau), a tau
derivative is 2 pi i D; the polynomial part of t_GKZ is carried in a formal
variable T with D T = 1 (T stands for log q).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .frobenius import F_J3, F_PI1, F_PI2, omega0, omega1, pfq_series
from .series import LogSeries


def chi_minus3(n: int) -> int:
    """0, 1, -1 for n = 0, 1, 2 mod 3."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return (0, 1, -1)[n % 3]


# ---------------------------------------------------------------------------
# q-series

@dataclass(frozen=True)
class QSeries:
    """sum_k c_k q^(k + offset), known for k <= N."""

    coeffs: tuple
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "offset", Fraction(self.offset))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, N: int) -> "QSeries":
        return cls((1,) + (0,) * N)

    def _align(self, other: "QSeries"):
        if self.offset != other.offset:
            raise ValueError("offsets differ")
        n = min(self.N, other.N)
        return self.coeffs[: n + 1], other.coeffs[: n + 1]

    def __add__(self, other: "QSeries") -> "QSeries":
        a, b = self._align(other)
        return QSeries(tuple(x + y for x, y in zip(a, b)), self.offset)

    def __sub__(self, other: "QSeries") -> "QSeries":
        a, b = self._align(other)
        return QSeries(tuple(x - y for x, y in zip(a, b)), self.offset)

    def __neg__(self) -> "QSeries":
        return QSeries(tuple(-x for x in self.coeffs), self.offset)

    def scale(self, c) -> "QSeries":
        return QSeries(tuple(c * x for x in self.coeffs), self.offset)

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = min(self.N, other.N)
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(n + 1):
            if a[i]:
                ai = a[i]
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return QSeries(tuple(out), self.offset + other.offset)

    def __pow__(self, k: int) -> "QSeries":
        out = QSeries.one(self.N)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "QSeries":
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("leading coefficient is zero")
        c0 = Fraction(c0) if isinstance(c0, int) else c0
        inv = [1 / c0]
        for n in range(1, self.N + 1):
            s = sum(self.coeffs[k] * inv[n - k] for k in range(1, n + 1))
            inv.append(-s / c0)
        return QSeries(tuple(_clean(x) for x in inv), -self.offset)

    def __truediv__(self, other: "QSeries") -> "QSeries":
        return self * other.inverse()

    def D(self) -> "QSeries":
        """q d/dq."""
        return QSeries(tuple((k + self.offset) * c for k, c in enumerate(self.coeffs)), self.offset)

    def truncate(self, N: int) -> "QSeries":
        return QSeries(self.coeffs[: N + 1], self.offset)

    def evaluate(self, q: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * q + complex(c)
        return acc * complex(q) ** float(self.offset) if self.offset else acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.offset != other.offset:
            return False
        n = min(self.N, other.N)
        return all(x == y for x, y in zip(self.coeffs[: n + 1], other.coeffs[: n + 1]))

    __hash__ = None  # type: ignore[assignment]


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def eta_quotient_B(N: int = 100) -> QSeries:
    """B = eta(tau)^3 / eta(3 tau) = prod (1 - q^n)^3 / (1 - q^(3n)); the q^(1/8 - 1/8) prefactors cancel."""
    c = [0] * (N + 1)
    c[0] = 1
    for n in range(1, N + 1):
        for _ in range(3):
            for k in range(N, n - 1, -1):
                c[k] -= c[k - n]
        # divide by 1 - q^(3n): running sum with stride 3n
        m = 3 * n
        for k in range(m, N + 1):
            c[k] += c[k - m]
    return QSeries(tuple(c))


def lambert_B3(N: int = 100) -> QSeries:
    """1 - 9 sum_n chi(n) n^2 q^n / (1 - q^n)."""
    c = [0] * (N + 1)
    c[0] = 1
    for n in range(1, N + 1):
        w = chi_minus3(n) * n * n
        if w:
            for k in range(n, N + 1, n):
                c[k] -= 9 * w
    return QSeries(tuple(c))


def b3_numeric(q: complex, tol: float = 1e-18) -> complex:
    """1 - 9 sum chi(n) n^2 q^n/(1-q^n), summed until the terms fall below ``tol``."""
    q = complex(q)
    if abs(q) >= 1:
        raise ValueError("|q| must be < 1")
    total = 1 + 0j
    qn = 1 + 0j
    n = 0
    while True:
        n += 1
        qn *= q
        term = chi_minus3(n) * n * n * qn / (1 - qn)
        total -= 9 * term
        if n > 3 and n * n * abs(qn) < tol:
            return total


# ---------------------------------------------------------------------------
# t_GKZ and the mirror map

def li2_chi_part(N: int = 100) -> QSeries:
    """9 sum_n chi(n) Li2(q^n) = 9 sum_(n,k) chi(n) q^(nk) / k^2."""
    c = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        ch = chi_minus3(n)
        if ch:
            for k in range(1, N // n + 1):
                c[n * k] += Fraction(9 * ch, k * k)
    return QSeries(tuple(_clean(x) for x in c))


@dataclass(frozen=True)
class TauPolynomialPlusQSeries:
    """p2 T^2 + p1 T + p0 + (q-series), with D T = 1."""

    poly: tuple[Fraction, Fraction, Fraction]   # (p0, p1, p2)
    qpart: QSeries

    def D(self) -> "TauPolynomialPlusQSeries":
        p0, p1, p2 = self.poly
        return TauPolynomialPlusQSeries((p1, 2 * p2, Fraction(0)), self.qpart.D())

    def constant_plus_series(self) -> QSeries:
        """The whole object as a q-series when its T-dependence has dropped out."""
        p0, p1, p2 = self.poly
        if p1 or p2:
            raise ValueError("T-dependent part remains")
        c = list(self.qpart.coeffs)
        c[0] += p0
        return QSeries(tuple(c), self.qpart.offset)

    def __sub__(self, other: "TauPolynomialPlusQSeries") -> "TauPolynomialPlusQSeries":
        return TauPolynomialPlusQSeries(tuple(a - b for a, b in zip(self.poly, other.poly)),
                                        self.qpart - other.qpart)


def t_gkz_qseries(N: int = 100, a=0, b=0, half=Fraction(1, 2)) -> TauPolynomialPlusQSeries:
    """half T^2 + b T + a + 9 sum chi(n) Li2(q^n), expanded through q^N."""
    return TauPolynomialPlusQSeries((Fraction(a), Fraction(b), Fraction(half)), li2_chi_part(N))


def mirror_map_log_part(N: int = 100) -> QSeries:
    """9 sum_n n chi(n) log(1 - q^n) = -9 sum_(n,k) n chi(n) q^(nk)/k."""
    c = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        w = n * chi_minus3(n)
        if w:
            for k in range(1, N // n + 1):
                c[n * k] -= Fraction(9 * w, k)
    return QSeries(tuple(_clean(x) for x in c))


def mirror_map_D(N: int = 100) -> QSeries:
    """D t for t = log(-q) + 9 sum n chi(n) log(1 - q^n): 1 plus the D of the series part."""
    s = mirror_map_log_part(N).D()
    c = list(s.coeffs)
    c[0] += 1
    return QSeries(tuple(c))


# ---------------------------------------------------------------------------
# the cusp: tau(alpha), q(alpha) and the bridge

def tau_of_alpha(alpha: complex) -> complex:
    return omega1(alpha) / omega0(alpha)


def q_of_alpha(alpha: complex) -> complex:
    return cmath.exp(2j * math.pi * tau_of_alpha(alpha))


@dataclass(frozen=True)
class BridgeReport:
    alphas: tuple[complex, ...]
    ratios: tuple[complex, ...]
    taus: tuple[complex, ...]
    qs: tuple[complex, ...]
    deviation: float
    upper_half_plane: bool

    @property
    def normalization(self) -> complex:
        return self.ratios[0]


def hauptmodul_bridge(alphas: Sequence[complex] = (0.01, 0.05, 0.1)) -> BridgeReport:
    """(1 - alpha) omega0^3 / B^3(q(alpha)) at each sample, and its spread."""
    ratios, taus, qs = [], [], []
    for a in alphas:
        a = complex(a)
        if not 0 < abs(a) < 1 or abs(1 - a) >= 1:
            raise ValueError(f"alpha = {a} outside the domain of the cusp expansions")
        t = tau_of_alpha(a)
        q = cmath.exp(2j * math.pi * t)
        taus.append(t)
        qs.append(q)
        ratios.append((1 - a) * omega0(a) ** 3 / b3_numeric(q))
    dev = max(abs(r - ratios[0]) for r in ratios)
    return BridgeReport(tuple(complex(a) for a in alphas), tuple(ratios), tuple(taus), tuple(qs),
                        dev, all(t.imag > 0 for t in taus))


def mirror_map_value(alpha: complex) -> complex:
    """t(alpha) = 2 pi i tau + i pi + 9 sum n chi(n) log(1 - q^n)."""
    t = tau_of_alpha(alpha)
    q = cmath.exp(2j * math.pi * t)
    s = 2j * math.pi * t + 1j * math.pi
    qn = 1 + 0j
    n = 0
    while True:
        n += 1
        qn *= q
        s += 9 * n * chi_minus3(n) * cmath.log(1 - qn)
        if n > 3 and n * abs(qn) < 1e-18:
            return s


def theta_alpha_mirror_map(alpha: complex, radius: float = 0.1, nodes: int = 32) -> complex:
    """theta_alpha t by Cauchy differentiation on a circle of relative radius ``radius``."""
    alpha = complex(alpha)
    r = radius * abs(alpha)
    acc = 0j
    for j in range(nodes):
        e = cmath.exp(2j * math.pi * j / nodes)
        acc += mirror_map_value(alpha + r * e) / e
    return alpha * acc / (nodes * r)


# ---------------------------------------------------------------------------
# Wronskians at the orbifold point

def wronskian_value(psi: complex) -> complex:
    """W(psi) = psi^2 / (1 - psi^3)."""
    psi = complex(psi)
    if abs(1 - psi ** 3) < 1e-14:
        raise ZeroDivisionError("W has a pole at psi^3 = 1")
    return psi ** 2 / (1 - psi ** 3)


def wronskian_series(N: int = 100) -> LogSeries:
    """pi1' pi2 - pi1 pi2' as an exact psi-series through psi^N."""
    p1 = pfq_series(F_PI1, N, 1, "psi")
    p2 = pfq_series(F_PI2, N, 2, "psi")
    w = p1.derivative().mul(p2) - p1.mul(p2.derivative())
    return w.truncate(int(N - w.rho))


def wronskian_constant(N: int = 100) -> Fraction:
    """c with pi1' pi2 - pi1 pi2' = c psi^2/(1 - psi^3) exactly through psi^N; raises if none."""
    w = wronskian_series(N)
    c = None
    for e in range(0, N + 1):
        got = w.coefficient(0, e)
        expect = 1 if e >= 2 and (e - 2) % 3 == 0 else 0
        if expect:
            if c is None:
                c = Fraction(got)
            elif got != c:
                raise ArithmeticError(f"coefficient of psi^{e} breaks proportionality")
        elif got != 0:
            raise ArithmeticError(f"unexpected psi^{e} term {got}")
    return c


@dataclass(frozen=True)
class WronskianFit:
    a: Fraction
    b: Fraction
    c: Fraction
    residual_zero: bool
    order: int


def wronskian_solution_fit(N: int = 100) -> WronskianFit:
    """Solve psi^3 3F2(1,1,1;4/3,5/3;psi^3) = a pi1 + b pi2 + c X exactly, where
    X(psi) = int_0^psi v^-1 (pi1(psi) pi2(v) - pi2(psi) pi1(v)) dv.
    """
    p1 = pfq_series(F_PI1, N, 1, "psi")
    p2 = pfq_series(F_PI2, N, 2, "psi")
    j3 = pfq_series(F_J3, N, 3, "psi")
    P1 = p1.shift(-1).integrate()
    P2 = p2.shift(-1).integrate()
    X = p1.mul(P2) - p2.mul(P1)
    cols = [p1, p2, X]

    def coeff(s: LogSeries, e: int):
        return Fraction(s.coefficient(0, e))

    rows = [[coeff(s, e) for s in cols] for e in (1, 2, 3)]
    rhs = [coeff(j3, e) for e in (1, 2, 3)]
    sol = _solve3(rows, rhs)
    a, b, c = sol
    ok = all(a * coeff(p1, e) + b * coeff(p2, e) + c * coeff(X, e) == coeff(j3, e) for e in range(1, N + 1))
    return WronskianFit(a, b, c, ok, N)


def _solve3(A, b):
    M = [list(r) + [v] for r, v in zip(A, b)]
    n = 3
    for i in range(n):
        p = next(r for r in range(i, n) if M[r][i] != 0)
        M[i], M[p] = M[p], M[i]
        for r in range(n):
            if r != i and M[r][i]:
                f = M[r][i] / M[i][i]
                M[r] = [x - f * y for x, y in zip(M[r], M[i])]
    return tuple(M[i][n] / M[i][i] for i in range(n))


# ---------------------------------------------------------------------------
# singular cycles

def singular_cycle_pairing(v: complex, alpha: complex) -> complex:
    """u1(v) u2(alpha) - u1(alpha) u2(v) with u1 = omega0, u2 = omega1."""
    return omega0(v) * omega1(alpha) - omega0(alpha) * omega1(v)


def beltrami_pairing(v: complex, alpha: complex) -> complex:
    """The same pairing from the Cayley-transform data h(v; alpha), mu(v; alpha).

    int Omega(v) ^ Omega(alpha) = -omega0(v) omega0(alpha) h mu (tau(alpha) - conj tau(alpha)).
    """
    tv, ta = tau_of_alpha(v), tau_of_alpha(alpha)
    tb = ta.conjugate()
    h = (tv - tb) / (ta - tb)
    mu = (tv - ta) / (tv - tb)
    return -omega0(v) * omega0(alpha) * h * mu * (ta - tb)


def beltrami_residual(v: complex, alpha: complex) -> float:
    """|pairing + (tau(v) - tau(alpha)) omega0(v) omega0(alpha)|, plus the Cayley-transform form."""
    p = singular_cycle_pairing(v, alpha)
    direct = -(tau_of_alpha(v) - tau_of_alpha(alpha)) * omega0(v) * omega0(alpha)
    return max(abs(p - direct), abs(p - beltrami_pairing(v, alpha)))
