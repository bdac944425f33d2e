"""Truncated log-power series  sum_j L_j(z) sum_k c[j][k] z^(k+rho),  L_j = log(z)^j / j!."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

Number = Fraction | int | float | complex


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class LogSeries:
    """Log-power series known exactly for exponents rho .. rho + order.

    ``coeffs[j][k]`` multiplies ``log(z)^j / j! * z^(k + rho)``.  Coefficients
    may be Fractions (exact work) or complex numbers.
    """

    rho: Fraction
    coeffs: tuple[tuple, ...]
    order: int
    var: str = "z"

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        rows = tuple(tuple(r) + (0,) * (self.order + 1 - len(r)) for r in self.coeffs) or ((0,) * (self.order + 1),)
        if any(len(r) != self.order + 1 for r in rows):
            raise ValueError("coefficient rows longer than order + 1")
        # drop empty top log blocks
        while len(rows) > 1 and all(_is_zero(c) for c in rows[-1]):
            rows = rows[:-1]
        object.__setattr__(self, "coeffs", rows)

    # -- constructors -------------------------------------------------
    @classmethod
    def from_terms(cls, rho, terms: Sequence, order: int | None = None, var: str = "z") -> "LogSeries":
        """Depth-0 series from a coefficient list."""
        terms = list(terms)
        if order is None:
            order = len(terms) - 1
        return cls(Fraction(rho), (tuple(terms[: order + 1]),), order, var)

    @classmethod
    def from_function(cls, rho, fn: Callable[[int], Number], order: int, var: str = "z") -> "LogSeries":
        return cls.from_terms(rho, [fn(k) for k in range(order + 1)], order, var)

    @classmethod
    def monomial(cls, exponent, order: int, coeff=Fraction(1), log_power: int = 0, var: str = "z") -> "LogSeries":
        """``coeff * z^exponent * L_log_power`` known through ``order`` further steps."""
        rows = [[0] * (order + 1) for _ in range(log_power + 1)]
        rows[log_power][0] = coeff
        return cls(Fraction(exponent), tuple(map(tuple, rows)), order, var)

    # -- basic queries ------------------------------------------------
    @property
    def depth(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, j: int, exponent) -> Number:
        """Coefficient of ``L_j z^exponent`` (0 outside the stored range)."""
        k = Fraction(exponent) - self.rho
        if k.denominator != 1 or not 0 <= k <= self.order or j >= len(self.coeffs):
            return 0
        return self.coeffs[j][int(k)]

    @property
    def top(self) -> Fraction:
        """Largest exponent known exactly."""
        return self.rho + self.order

    def is_zero(self) -> bool:
        return all(_is_zero(c) for row in self.coeffs for c in row)

    def nonzero_terms(self):
        """Yield ``(j, exponent, coeff)`` for every stored nonzero coefficient."""
        for j, row in enumerate(self.coeffs):
            for k, c in enumerate(row):
                if not _is_zero(c):
                    yield j, self.rho + k, c

    def max_abs(self) -> float:
        return max((abs(c) for row in self.coeffs for c in row), default=0.0)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "LogSeries"):
        if other.var != self.var:
            raise ValueError(f"variable mismatch {self.var} vs {other.var}")
        if (self.rho - other.rho).denominator != 1:
            raise ValueError("exponent offsets differ by a non-integer")

    def _dense(self, rho: Fraction, order: int, depth: int):
        rows = []
        for j in range(depth + 1):
            rows.append([self.coefficient(j, rho + k) for k in range(order + 1)])
        return rows

    def __add__(self, other: "LogSeries") -> "LogSeries":
        self._check(other)
        rho = min(self.rho, other.rho)
        order = int(min(self.top, other.top) - rho)
        depth = max(self.depth, other.depth)
        a = self._dense(rho, order, depth)
        b = other._dense(rho, order, depth)
        rows = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
        return LogSeries(rho, rows, order, self.var)

    def __neg__(self) -> "LogSeries":
        return self.scale(-1)

    def __sub__(self, other: "LogSeries") -> "LogSeries":
        return self + (-other)

    def scale(self, c) -> "LogSeries":
        return LogSeries(self.rho, tuple(tuple(c * x for x in row) for row in self.coeffs), self.order, self.var)

    def __rmul__(self, c) -> "LogSeries":
        return self.scale(c)

    def shift(self, m) -> "LogSeries":
        """Multiply by ``z^m``."""
        return LogSeries(self.rho + Fraction(m), self.coeffs, self.order, self.var)

    def truncate(self, order: int) -> "LogSeries":
        order = min(order, self.order)
        return LogSeries(self.rho, tuple(row[: order + 1] for row in self.coeffs), order, self.var)

    def rebase(self, rho) -> "LogSeries":
        """Re-express with a lower offset ``rho`` (zero padding), same top."""
        rho = Fraction(rho)
        if rho > self.rho or (self.rho - rho).denominator != 1:
            raise ValueError("rebase needs a lower offset at integer distance")
        order = int(self.top - rho)
        return LogSeries(rho, tuple(map(tuple, self._dense(rho, order, self.depth))), order, self.var)

    def mul(self, other: "LogSeries") -> "LogSeries":
        """Cauchy product (log blocks multiply via binomial weights of L_j)."""
        self._check(other)
        order = min(self.order, other.order)
        depth = self.depth + other.depth
        rows = [[0] * (order + 1) for _ in range(depth + 1)]
        for i, ra in enumerate(self.coeffs):
            for j, rb in enumerate(other.coeffs):
                w = math.comb(i + j, i)
                out = rows[i + j]
                for k in range(order + 1):
                    a = ra[k]
                    if _is_zero(a):
                        continue
                    for l in range(order + 1 - k):
                        b = rb[l]
                        if not _is_zero(b):
                            out[k + l] += w * a * b
        return LogSeries(self.rho + other.rho, tuple(map(tuple, rows)), order, self.var)

    def derivative(self) -> "LogSeries":
        """d/dz of a depth-0 series."""
        if self.depth:
            raise ValueError("derivative implemented for log-free series")
        terms = [(self.rho + k) * c for k, c in enumerate(self.coeffs[0])]
        return LogSeries(self.rho - 1, (tuple(terms),), self.order, self.var)

    def integrate(self) -> "LogSeries":
        """Termwise primitive of a depth-0 series (no z^-1 term allowed)."""
        if self.depth:
            raise ValueError("integrate implemented for log-free series")
        terms = []
        for k, c in enumerate(self.coeffs[0]):
            e = self.rho + k + 1
            if e == 0:
                if not _is_zero(c):
                    raise ValueError("z^-1 term has no power primitive")
                terms.append(0)
            else:
                terms.append(c / e if isinstance(c, (int, Fraction)) else c / float(e))
        return LogSeries(self.rho + 1, (tuple(terms),), self.order, self.var)

    def compose_power(self, p: int) -> "LogSeries":
        """Substitute ``z -> z^p`` in a depth-0 series with integer offset."""
        if self.depth or self.rho.denominator != 1 or p < 1:
            raise ValueError("compose_power needs a log-free series, integer offset, p >= 1")
        order = self.order * p
        terms = [0] * (order + 1)
        for k, c in enumerate(self.coeffs[0]):
            terms[k * p] = c
        return LogSeries(self.rho * p, (tuple(terms),), order, self.var)

    # -- numerics -------------------------------------------------------
    def evaluate(self, z: complex, log_z: complex | None = None) -> complex:
        """Numeric value with principal branches unless ``log_z`` is given."""
        z = complex(z)
        if z == 0:
            if self.rho > 0 or self.is_zero():
                return 0j
            if self.depth == 0 and self.rho == 0:
                return complex(self.coeffs[0][0])
            raise ZeroDivisionError("series singular at z = 0")
        lz = cmath.log(z) if log_z is None else complex(log_z)
        total = 0j
        lj = 1 + 0j
        for j, row in enumerate(self.coeffs):
            if j:
                lj *= lz / j
            acc = 0j
            for c in reversed(row):
                acc = acc * z + complex(c)
            total += lj * acc
        return total * cmath.exp(float(self.rho) * lz)

    def __repr__(self) -> str:
        return f"LogSeries(var={self.var!r}, rho={self.rho}, depth={self.depth}, order={self.order})"
