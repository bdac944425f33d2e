"""Exact theta-operator calculus and GKZ operators from monomial family data.

An operator is a finite sum  z^m P(theta)  kept in left-normal form: the
Laurent monomial sits to the left of the theta polynomial.  One or two base
variables are supported; exponents and theta degrees are tuples of that length.
Composition uses  P(theta) z^m = z^m P(theta + m).
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .series import LogSeries

Poly = dict  # {degree tuple: Fraction}


# ---------------------------------------------------------------------------
# multivariate polynomials in theta, exact rational coefficients

def _padd(p: Poly, q: Poly, s=1) -> Poly:
    out = dict(p)
    for d, c in q.items():
        v = out.get(d, 0) + s * c
        if v:
            out[d] = v
        else:
            out.pop(d, None)
    return out


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for d1, c1 in p.items():
        for d2, c2 in q.items():
            d = tuple(a + b for a, b in zip(d1, d2))
            out[d] = out.get(d, 0) + c1 * c2
    return {d: c for d, c in out.items() if c}


def _pshift(p: Poly, m: Sequence) -> Poly:
    """P(theta + m), componentwise."""
    out: Poly = dict(p)
    for i, mi in enumerate(m):
        if not mi:
            continue
        nxt: Poly = {}
        for d, c in out.items():
            n = d[i]
            for r in range(n + 1):
                dd = d[:i] + (r,) + d[i + 1:]
                nxt[dd] = nxt.get(dd, 0) + c * math.comb(n, r) * Fraction(mi) ** (n - r)
        out = {d: c for d, c in nxt.items() if c}
    return out


def _pscale_vars(p: Poly, s: Sequence) -> Poly:
    """P(s_1 theta_1, ..., s_n theta_n)."""
    out = {}
    for d, c in p.items():
        f = Fraction(c)
        for si, di in zip(s, d):
            f *= Fraction(si) ** di
        if f:
            out[d] = f
    return out


def _peval(p: Poly, x: Sequence):
    total = 0
    for d, c in p.items():
        t = c
        for xi, di in zip(x, d):
            t = t * xi ** di
        total += t
    return total


def taylor_coefficients(coeffs: Sequence, e) -> list:
    """Coefficients a_i with P(e + t) = sum a_i t^i for P = sum coeffs[d] x^d."""
    n = len(coeffs)
    out = []
    for i in range(n):
        s = 0
        for d in range(i, n):
            if coeffs[d]:
                s += coeffs[d] * math.comb(d, i) * e ** (d - i)
        out.append(s)
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaOperator:
    """Sum of terms  x^m P(theta)  in one or two variables.

    ``terms`` is a sorted tuple of ``(exponent tuple, ((degree tuple, coeff), ...))``.
    Build operators with :func:`theta`, :func:`var`, :func:`const` or :func:`parse`
    and combine them with ``+``, ``-`` and ``*`` (composition).
    """

    variables: tuple[str, ...]
    terms: tuple = field(default=())

    @classmethod
    def from_dict(cls, variables: Sequence[str], terms: Mapping) -> "ThetaOperator":
        variables = tuple(variables)
        if not 1 <= len(variables) <= 2:
            raise ValueError("operators carry one or two variables")
        n = len(variables)
        items = []
        for m, poly in terms.items():
            m = tuple(int(x) for x in m)
            clean = tuple(sorted((tuple(d), Fraction(c)) for d, c in poly.items() if c))
            if len(m) != n or any(len(d) != n for d, _ in clean):
                raise ValueError("exponent/degree vector length mismatch")
            if clean:
                items.append((m, clean))
        return cls(variables, tuple(sorted(items)))

    def as_dict(self) -> dict:
        return {m: dict(p) for m, p in self.terms}

    @property
    def nvars(self) -> int:
        return len(self.variables)

    # -- algebra -----------------------------------------------------------
    def _same(self, other: "ThetaOperator"):
        if self.variables != other.variables:
            raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")

    def __add__(self, other):
        if not isinstance(other, ThetaOperator):
            other = const(other, self.variables)
        self._same(other)
        a = self.as_dict()
        for m, p in other.as_dict().items():
            a[m] = _padd(a.get(m, {}), p)
        return ThetaOperator.from_dict(self.variables, a)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ThetaOperator) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "ThetaOperator":
        c = Fraction(c)
        return ThetaOperator.from_dict(self.variables, {m: {d: c * x for d, x in p} for m, p in self.terms})

    def __mul__(self, other):
        if isinstance(other, ThetaOperator):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1 / Fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1 and self.terms[0][1] == ((tuple([0] * self.nvars), Fraction(1)),):
                return monomial([x * n for x in self.terms[0][0]], self.variables)
            raise ValueError("negative powers only for monomials")
        out = const(1, self.variables)
        for _ in range(n):
            out = compose(out, self)
        return out

    # -- structure ------------------------------------------------------------
    def order(self) -> int:
        return max((sum(d) for _, p in self.terms for d, _ in p), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def leading_coefficient(self) -> Fraction:
        """Top-degree coefficient of the term with the largest exponent vector."""
        if not self.terms:
            return Fraction(0)
        _, p = self.terms[-1]
        return max(p, key=lambda dc: (sum(dc[0]), dc[0]))[1]

    def exponents(self) -> list[tuple[int, ...]]:
        return [m for m, _ in self.terms]

    def coefficient_poly(self, m: Sequence[int]) -> dict:
        for mm, p in self.terms:
            if mm == tuple(m):
                return dict(p)
        return {}

    def univariate(self, m: int = 0) -> list[Fraction]:
        """Dense coefficient list of the theta polynomial at x^m (one variable)."""
        if self.nvars != 1:
            raise ValueError("univariate view needs one variable")
        p = self.coefficient_poly((m,))
        deg = max((d[0] for d in p), default=-1)
        return [p.get((k,), Fraction(0)) for k in range(deg + 1)]

    def indicial(self) -> list[Fraction]:
        """Theta polynomial of the lowest-exponent term (one variable)."""
        return self.univariate(self.terms[0][0][0]) if self.terms else []

    def left_divisible_by_theta(self) -> bool:
        """True when the operator equals theta o R for some R (one variable).

        theta o x^m Q(theta) = x^m (theta + m) Q(theta), so each term must vanish
        at theta = -m.
        """
        if self.nvars != 1:
            raise ValueError("one variable only")
        return all(_peval(dict(p), (-m[0],)) == 0 for m, p in self.terms)

    def left_quotient_by_theta(self) -> "ThetaOperator":
        """R with theta o R equal to this operator (one variable)."""
        if not self.left_divisible_by_theta():
            raise ValueError("operator has no theta left factor")
        out = {}
        for (m,), p in self.terms:
            coeffs = self.univariate(m)
            q = _divide_linear(coeffs, Fraction(-m))
            out[(m,)] = {(k,): c for k, c in enumerate(q) if c}
        return ThetaOperator.from_dict(self.variables, out)

    def change_chart(self, new_var: str, scale, power) -> "ThetaOperator":
        """Rewrite in ``u`` where the old variable is ``x = scale * u^power``.

        Then theta_x = theta_u / power and x^m = scale^m u^(power m); ``power``
        may be rational as long as every power * m is an integer.
        """
        if self.nvars != 1:
            raise ValueError("one variable only")
        scale = Fraction(scale)
        power = Fraction(power)
        out = {}
        for (m,), p in self.terms:
            e = power * m
            if e.denominator != 1:
                raise ValueError(f"x^{m} is not an integral power of {new_var}")
            q = _pscale_vars(dict(p), (1 / power,))
            c = scale ** m
            key = (int(e),)
            out[key] = _padd(out.get(key, {}), {d: c * x for d, x in q.items()})
        return ThetaOperator.from_dict((new_var,), out)

    def rename(self, *names: str) -> "ThetaOperator":
        return ThetaOperator(tuple(names), self.terms)

    def normalized_at_origin(self) -> "ThetaOperator":
        """Scaled so the exponent-0 theta polynomial has leading coefficient 1."""
        return _normalized_at_origin(self)

    def normalized(self) -> "ThetaOperator":
        """Scaled so the leading coefficient is 1."""
        lc = self.leading_coefficient()
        return self if lc in (0, 1) else self.scale(1 / lc)

    def __str__(self) -> str:
        return format_operator(self)


def _divide_linear(coeffs: Sequence[Fraction], r: Fraction) -> list[Fraction]:
    """Quotient of sum coeffs[d] x^d by (x - r), remainder assumed zero."""
    n = len(coeffs) - 1
    q = [Fraction(0)] * n
    acc = Fraction(0)
    for d in range(n, 0, -1):
        acc = acc * r + coeffs[d]
        q[d - 1] = acc
    return q


# ---------------------------------------------------------------------------
# constructors

def _vars(variables) -> tuple[str, ...]:
    return (variables,) if isinstance(variables, str) else tuple(variables)


def const(c, variables=("z",)) -> ThetaOperator:
    v = _vars(variables)
    z = tuple([0] * len(v))
    return ThetaOperator.from_dict(v, {z: {z: Fraction(c)}})


def theta(variables=("z",), i: int = 0) -> ThetaOperator:
    v = _vars(variables)
    z = tuple([0] * len(v))
    d = tuple(1 if k == i else 0 for k in range(len(v)))
    return ThetaOperator.from_dict(v, {z: {d: Fraction(1)}})


def monomial(m: Sequence[int], variables=("z",)) -> ThetaOperator:
    v = _vars(variables)
    return ThetaOperator.from_dict(v, {tuple(m): {tuple([0] * len(v)): Fraction(1)}})


def var(variables=("z",), i: int = 0, power: int = 1) -> ThetaOperator:
    v = _vars(variables)
    return monomial(tuple(power if k == i else 0 for k in range(len(v))), v)


def from_univariate(poly: Sequence, m: int = 0, variable: str = "z") -> ThetaOperator:
    """x^m sum poly[d] theta^d."""
    return ThetaOperator.from_dict((variable,), {(m,): {(d,): Fraction(c) for d, c in enumerate(poly)}})


def product_of_linear(roots: Iterable, scale=1, m: int = 0, variable: str = "z") -> ThetaOperator:
    """scale * x^m * prod (theta - r)."""
    coeffs = [Fraction(scale)]
    for r in roots:
        r = Fraction(r)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] -= r * c
        coeffs = nxt
    return from_univariate(coeffs, m, variable)


# ---------------------------------------------------------------------------
# core operations

def compose(A: ThetaOperator, B: ThetaOperator) -> ThetaOperator:
    """Left-normal form of A o B."""
    A._same(B)
    out: dict = {}
    for ma, pa in A.terms:
        for mb, pb in B.terms:
            m = tuple(x + y for x, y in zip(ma, mb))
            prod = _pmul(_pshift(dict(pa), mb), dict(pb))
            out[m] = _padd(out.get(m, {}), prod)
    return ThetaOperator.from_dict(A.variables, out)


def normal_form_equal(A: ThetaOperator, B: ThetaOperator, up_to_constant: bool = False) -> bool:
    """Exact equality of normal forms, optionally after one rational rescale."""
    A._same(B)
    if not up_to_constant:
        return A.terms == B.terms
    if A.is_zero() or B.is_zero():
        return A.is_zero() and B.is_zero()
    return A.normalized().terms == B.normalized().terms


def proportionality_constant(A: ThetaOperator, B: ThetaOperator) -> Fraction | None:
    """c with A = c B, or None."""
    if not normal_form_equal(A, B, up_to_constant=True) or B.is_zero():
        return None
    return A.leading_coefficient() / B.leading_coefficient()


def apply_to_series(A: ThetaOperator, s: LogSeries) -> LogSeries:
    """Exact action of a one-variable operator on a log series.

    theta acts on z^e L_j as e z^e L_j + z^e L_(j-1).  The result starts at
    rho + min(m) and keeps the same number of known coefficients.
    """
    if A.nvars != 1:
        raise ValueError("series action needs a one-variable operator")
    if A.variables[0] != s.var:
        raise ValueError(f"operator in {A.variables[0]} applied to series in {s.var}")
    if A.is_zero():
        return LogSeries(s.rho, ((0,) * (s.order + 1),), s.order, s.var)
    shifts = [m[0] for m, _ in A.terms]
    mmin = min(shifts)
    N = s.order
    depth = s.depth
    rows = [[0] * (N + 1) for _ in range(depth + 1)]
    cols = list(zip(*s.coeffs))  # cols[k][j]
    for (m,), p in A.terms:
        dense = [Fraction(0)] * (max(d[0] for d, _ in p) + 1)
        for (d,), c in p:
            dense[d] = c
        for k in range(N + 1):
            t = k + m - mmin
            if t > N:
                break
            v = cols[k]
            if all(c == 0 for c in v):
                continue
            a = taylor_coefficients(dense, s.rho + k)
            for j in range(depth + 1):
                acc = 0
                for i, ai in enumerate(a):
                    if j + i > depth:
                        break
                    if ai:
                        acc += ai * v[j + i]
                rows[j][t] += acc
    return LogSeries(s.rho + mmin, tuple(map(tuple, rows)), N, s.var)


# ---------------------------------------------------------------------------
# text grammar

def parse(text: str, variables=("z",)) -> ThetaOperator:
    """Parse e.g. ``theta^3 + z*(-3*theta-3)*(-3*theta-2)*(-3*theta-1)``.

    Symbols: each variable name, ``theta_<name>`` and, for one variable, plain
    ``theta``.  ``*`` composes, ``/`` only divides by constants, ``^`` takes
    nonnegative integer powers (negative powers of bare monomials allowed).
    """
    v = _vars(variables)
    symbols = {}
    for i, name in enumerate(v):
        symbols[name] = var(v, i)
        symbols[f"theta_{name}"] = theta(v, i)
    if len(v) == 1:
        symbols["theta"] = theta(v, 0)
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def const_value(op: ThetaOperator):
        if op.is_zero():
            return Fraction(0)
        zero = tuple([0] * len(v))
        if len(op.terms) == 1 and op.terms[0][0] == zero and len(op.terms[0][1]) == 1 and op.terms[0][1][0][0] == zero:
            return op.terms[0][1][0][1]
        return None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return const(node.value, v)
        if isinstance(node, ast.Name):
            if node.id not in symbols:
                raise ValueError(f"unknown symbol {node.id!r}")
            return symbols[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = ev(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.BinOp):
            left = ev(node.left)
            if isinstance(node.op, ast.Pow):
                e = ev(node.right)
                n = const_value(e)
                if n is None or n.denominator != 1:
                    raise ValueError("exponent must be an integer constant")
                return left ** int(n)
            right = ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return compose(left, right)
            if isinstance(node.op, ast.Div):
                c = const_value(right)
                if not c:
                    raise ValueError("division only by nonzero constants")
                return left.scale(1 / c)
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return ev(tree)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_poly(p: Mapping, names: Sequence[str]) -> str:
    pieces = []
    for d, c in sorted(p.items(), key=lambda dc: (-sum(dc[0]), tuple(-x for x in dc[0]))):
        factors = []
        for name, k in zip(names, d):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else _fmt_rational(mag) + "*" + "*".join(factors)
        else:
            body = _fmt_rational(mag)
        pieces.append(("-" if c < 0 else "+", body))
    if not pieces:
        return "0"
    s = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        s += f" {sign} {body}"
    return s


def format_operator(op: ThetaOperator) -> str:
    """Canonical text: terms by increasing exponent, theta polynomials expanded."""
    if op.is_zero():
        return "0"
    tnames = ["theta"] if op.nvars == 1 else [f"theta_{n}" for n in op.variables]
    parts = []
    for m, p in op.terms:
        mono = []
        for name, k in zip(op.variables, m):
            if k == 1:
                mono.append(name)
            elif k:
                mono.append(f"{name}^{k}")
        poly = _fmt_poly(dict(p), tnames)
        if mono:
            parts.append("*".join(mono) + f"*({poly})")
        elif len(p) == 1:
            parts.append(poly)
        else:
            parts.append(f"({poly})")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


# ---------------------------------------------------------------------------
# named operators

def _psi_ops(name="psi"):
    return theta(name), var(name)


def l_pf() -> ThetaOperator:
    t, x = _psi_ops()
    return (t - 2) * (t - 1) - x ** 3 * t * t


def l_pf_alpha() -> ThetaOperator:
    t, a = _psi_ops("alpha")
    return t * t - a * (t + Fraction(1, 3)) * (t + Fraction(2, 3))


def d_gkz() -> ThetaOperator:
    t, x = _psi_ops()
    return t ** 3 - x ** -3 * (t - 3) * (t - 2) * (t - 1)


def l_cy3() -> ThetaOperator:
    return l_pf() * theta("psi")


def lnu(nu) -> ThetaOperator:
    """(theta-1)(theta-2)theta - psi^3 (theta - nu)^3 in the psi chart."""
    nu = Fraction(nu)
    t, x = _psi_ops()
    return (t - 1) * (t - 2) * t - x ** 3 * (t - nu) ** 3


def d1() -> ThetaOperator:
    v = ("a", "b")
    ta, tb, a, b = theta(v, 0), theta(v, 1), var(v, 0), var(v, 1)
    return Fraction(1, (-3) ** 2 * (-2) ** 3) * ta * tb - a * b ** -6 * (tb - 1) * (tb - 5)


def d2() -> ThetaOperator:
    v = ("a", "b")
    ta, tb, a = theta(v, 0), theta(v, 1), var(v, 0)
    return Fraction(1, (-18) ** 3) * (tb + 6 * ta) ** 3 - a ** -3 * (ta - 1) * (ta - 2) * ta


def weierstrass_display() -> ThetaOperator:
    t, w = _psi_ops("w")
    q = Fraction
    return t * (t - q(1, 4)) * (t - q(1, 2)) - w * (t + q(3, 4)) * (t + q(1, 12)) * (t + q(5, 12))


def hesse_display() -> ThetaOperator:
    return parse("theta^3 + z*(-3*theta-3)*(-3*theta-2)*(-3*theta-1)", ("z",))


def d_gkz_alpha() -> ThetaOperator:
    """D_GKZ carried to alpha = psi^-3 and made monic at alpha^0.

    The chart change itself produces -27 times this operator; see
    :func:`d_gkz_alpha_constant`.
    """
    return d_gkz().change_chart("alpha", 1, Fraction(-1, 3)).normalized_at_origin()


def d_gkz_alpha_constant() -> Fraction:
    """Factor between the raw alpha-chart image of D_GKZ and :func:`d_gkz_alpha`."""
    raw = d_gkz().change_chart("alpha", 1, Fraction(-1, 3))
    return proportionality_constant(raw, d_gkz_alpha())


_REGISTRY = {
    "theta_psi": lambda: theta("psi"),
    "theta_alpha": lambda: theta("alpha"),
    "L_PF": l_pf,
    "L_PF_alpha": l_pf_alpha,
    "D_GKZ": d_gkz,
    "D_GKZ_alpha": d_gkz_alpha,
    "L_CY3": l_cy3,
    "D1": d1,
    "D2": d2,
    "W_GKZ": weierstrass_display,
    "HESSE_Z": hesse_display,
}


def builtin(name: str) -> ThetaOperator:
    if name.startswith("L_nu:"):
        return lnu(Fraction(name.split(":", 1)[1]))
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown operator {name!r}; known: {sorted(_REGISTRY)} or L_nu:<rational>") from None


def builtin_names() -> list[str]:
    return sorted(_REGISTRY)


# ---------------------------------------------------------------------------
# GKZ derivation

@dataclass(frozen=True)
class FamilySpec:
    """Monomial family  F = sum_j a_j x^(v_j)  with integrand mu_0 / F.

    ``prefactor`` is the exponent vector s in Omega = a^s mu_0/F that makes the
    period a function of the single variable  z = z_scale * prod a_j^box_j.
    """

    name: str
    coefficients: tuple[str, ...]
    exponents: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    box: tuple[int, ...]
    prefactor: tuple[Fraction, ...]
    z_scale: Fraction = Fraction(1)
    variable: str = "z"
    interior: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefactor", tuple(Fraction(s) for s in self.prefactor))
        object.__setattr__(self, "z_scale", Fraction(self.z_scale))
        n = len(self.coefficients)
        if len(self.exponents) != n or len(self.box) != n or len(self.prefactor) != n:
            raise ValueError("coefficient, exponent, box and prefactor lengths differ")
        d = len(self.weights)
        if any(len(r) != d for r in self.exponents):
            raise ValueError("exponent rows must match the number of weights")

    @property
    def degree(self) -> int:
        degs = {sum(r) for r in self.exponents}
        if len(degs) != 1:
            raise ValueError("family is not homogeneous")
        return degs.pop()

    def box_valid(self) -> bool:
        d = len(self.weights)
        ok = all(sum(l * r[i] for l, r in zip(self.box, self.exponents)) == 0 for i in range(d))
        return ok and sum(self.box) == 0 and any(self.box)

    @property
    def calabi_yau(self) -> bool:
        return sum(self.weights) == self.degree

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "coefficients": list(self.coefficients),
            "exponents": [list(r) for r in self.exponents],
            "weights": list(self.weights),
            "box": list(self.box),
            "prefactor": [_fmt_rational(s) for s in self.prefactor],
            "z_scale": _fmt_rational(self.z_scale),
            "variable": self.variable,
            "interior": self.interior,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FamilySpec":
        d = json.loads(text)
        return cls(
            name=d["name"],
            coefficients=tuple(d["coefficients"]),
            exponents=tuple(tuple(int(x) for x in r) for r in d["exponents"]),
            weights=tuple(int(x) for x in d["weights"]),
            box=tuple(int(x) for x in d["box"]),
            prefactor=tuple(Fraction(s) for s in d["prefactor"]),
            z_scale=Fraction(d.get("z_scale", "1")),
            variable=d.get("variable", "z"),
            interior=d.get("interior"),
        )


HESSE = FamilySpec(
    name="hesse",
    coefficients=("a1", "a2", "a3", "a0"),
    exponents=((3, 0, 0), (0, 3, 0), (0, 0, 3), (1, 1, 1)),
    weights=(1, 1, 1),
    box=(1, 1, 1, -3),
    prefactor=(0, 0, 0, 1),
    z_scale=-1,
    variable="z",
    interior=3,
)

# Y^2 Z - 4 X^3 + g2 X Z^2 + g3 Z^3 in coordinates (X, Y, Z); w = 27 g3^2 / g2^3
WEIERSTRASS = FamilySpec(
    name="weierstrass",
    coefficients=("a1", "a2", "g2", "g3"),
    exponents=((0, 2, 1), (3, 0, 0), (1, 0, 2), (0, 0, 3)),
    weights=(1, 1, 1),
    box=(0, 1, -3, 2),
    prefactor=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), 0),
    z_scale=Fraction(-27, 4),
    variable="w",
)

# y^2 z - x^3 + (1 + lam) x^2 z - lam x z^2
LEGENDRE = FamilySpec(
    name="legendre",
    coefficients=("a1", "a2", "a3", "a4"),
    exponents=((0, 2, 1), (3, 0, 0), (2, 0, 1), (1, 0, 2)),
    weights=(1, 1, 1),
    box=(0, 1, -2, 1),
    prefactor=(Fraction(1, 2), 0, Fraction(1, 2), 0),
    z_scale=1,
    variable="z",
)

FAMILIES = {f.name: f for f in (HESSE, WEIERSTRASS, LEGENDRE)}


class GKZError(ValueError):
    pass


@dataclass(frozen=True)
class EulerOperator:
    """(sum_j coeffs[j] theta_{a_j} + constant) annihilating the period."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction

    def describe(self, names: Sequence[str]) -> str:
        parts = [f"{_fmt_rational(c)}*theta_{n}" for c, n in zip(self.coeffs, names) if c]
        if self.constant:
            parts.append(_fmt_rational(self.constant))
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class GKZSystem:
    family: FamilySpec
    euler: tuple[EulerOperator, ...]
    box: tuple[int, ...]
    reduced: ThetaOperator
    interior_form: ThetaOperator | None
    diagnostics: tuple[str, ...] = ()


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]):
    """One solution of rows x = rhs (Gauss-Jordan), or None if inconsistent."""
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    ncol = len(rows[0]) if rows else 0
    piv = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in m):
        return None
    x = [Fraction(0)] * ncol
    for i, c in enumerate(piv):
        x[c] = m[i][-1]
    return x


def _falling(gamma_j: Fraction, l: int, count: int) -> list[Fraction]:
    """Roots of prod_{i<count} (gamma_j + l theta - i) as theta - r factors, with scale."""
    return [(i - gamma_j) / l for i in range(count)]


def derive_gkz(f: FamilySpec) -> GKZSystem:
    """Euler operators, box operator and the reduced one-variable operator.

    The integrand omega = mu_0/F satisfies, for each coordinate scaling,
    (sum_j v_ji theta_{a_j} + deg_i) omega = 0, and (sum_j theta_{a_j} + 1) omega = 0.
    Writing omega = a^gamma f(z) with gamma = -prefactor, the box operator
    prod_{l_j>0} d_{a_j}^{l_j} - prod_{l_j<0} d_{a_j}^{-l_j} becomes
    P_+(theta_z) - z' P_-(theta_z) with z' = prod a^l = z / z_scale.
    """
    if not f.box_valid():
        raise GKZError("box relation does not annihilate the exponent matrix")
    n = len(f.coefficients)
    d = len(f.weights)
    A = [[Fraction(f.exponents[j][i]) for j in range(n)] for i in range(d)] + [[Fraction(1)] * n]
    beta = [Fraction(-w) for w in f.weights] + [Fraction(-1)]
    diags = []
    sol = _solve_rational(A, beta)
    if sol is None:
        raise GKZError(
            f"Euler system inconsistent: sum of form weights {sum(f.weights)} != degree {f.degree} "
            "(Calabi-Yau condition fails)")
    gamma = [-s for s in f.prefactor]
    if any(sum(a * g for a, g in zip(row, gamma)) != b for row, b in zip(A, beta)):
        raise GKZError("prefactor is incompatible with the Euler operators; period depends on more than z")
    # Euler operators on Omega = a^s omega: theta_{a_j} -> theta_{a_j} - s_j
    euler = []
    for row, b in zip(A, beta):
        const_ = -b - sum(a * s for a, s in zip(row, f.prefactor))
        euler.append(EulerOperator(tuple(row), const_))
    z = f.variable
    plus_roots, minus_roots = [], []
    plus_scale, minus_scale = Fraction(1), Fraction(1)
    for g, l in zip(gamma, f.box):
        if l > 0:
            plus_roots += _falling(g, l, l)
            plus_scale *= Fraction(l) ** l
        elif l < 0:
            minus_roots += _falling(g, l, -l)
            minus_scale *= Fraction(l) ** (-l)
    P = product_of_linear(plus_roots, plus_scale, 0, z)
    M = product_of_linear(minus_roots, minus_scale / f.z_scale, 1, z)
    reduced = _normalized_at_origin(P - M)
    interior = None
    if f.interior is not None:
        try:
            interior = _interior_form(f, A, beta)
        except GKZError as exc:
            diags.append(str(exc))
    return GKZSystem(f, tuple(euler), tuple(f.box), reduced, interior, tuple(diags))


def _normalized_at_origin(op: ThetaOperator) -> ThetaOperator:
    """Scale so the exponent-0 theta polynomial is monic."""
    p = op.coefficient_poly(tuple([0] * op.nvars))
    if not p:
        return op
    lead = max(p.items(), key=lambda dc: (sum(dc[0]), dc[0]))[1]
    return op.scale(1 / lead)



def _interior_form(f: FamilySpec, A, beta) -> ThetaOperator:
    """Box operator after eliminating theta_{a_j}, j != interior, other a_j set to 1.

    Returned in the interior coefficient's variable (named 'a0'), acting on
    Omega = a0^s0 omega with s0 the prefactor's interior component.
    """
    k = f.interior
    n = len(f.coefficients)
    others = [j for j in range(n) if j != k]
    # theta_{a_j} = p_j + q_j theta_{a_k} on omega, from A theta = beta
    rows = [[r[j] for j in others] for r in A]
    p = _solve_rational(rows, beta)
    q = _solve_rational(rows, [-r[k] for r in A])
    if p is None or q is None:
        raise GKZError("cannot eliminate the non-interior theta operators (Calabi-Yau condition fails)")
    for rowfull, b in zip(A, beta):
        lhs = sum(rowfull[j] * p[i] for i, j in enumerate(others))
        if lhs != b:
            raise GKZError("cannot eliminate the non-interior theta operators (Calabi-Yau condition fails)")
    v = "a0"
    t = theta(v)
    lin = {j: p[i] + q[i] * t for i, j in enumerate(others)}
    lin[k] = t

    def falling(j, count):
        out = const(1, v)
        for i in range(count):
            out = out * (lin[j] - i)
        return out

    pos = const(1, v)
    neg = const(1, v)
    for j, l in enumerate(f.box):
        mono = var(v, 0, -abs(l)) if j == k else const(1, v)
        if l > 0:
            pos = pos * mono * falling(j, l)
        elif l < 0:
            neg = neg * mono * falling(j, -l)
    op_omega = pos - neg
    s0 = f.prefactor[k]
    # on Omega = a0^s0 omega:  O omega = O a0^-s0 Omega = a0^-s0 O(theta - s0) Omega
    shifted = {}
    for (m,), poly in op_omega.terms:
        shifted[(m,)] = _pshift(dict(poly), (-s0,))
    return ThetaOperator.from_dict((v,), shifted)
