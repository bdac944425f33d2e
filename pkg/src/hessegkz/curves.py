"""The Hesse cubic y^3 - 3 psi x y + x^3 + 1 = 0 as a 3:1 cover of the x-line.

Branch points, sheet tracking along piecewise paths, the chain integral K(psi)
of psi dx / f_y, torsion translations and the Weierstrass chain integral.

Paths are lists of line or arc segments parametrised by sigma in [0, 1].  A
segment whose end is a branch point is reparametrised so that x - x_b is
quadratic in sigma there; y is then analytic in sigma through the passage and
the square-root kink disappears from the quadrature.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .frobenius import RHO, pi1, pi2
from .opalg import ThetaOperator, compose, l_pf, var

TWO_PI = 2 * math.pi


class TrackingError(RuntimeError):
    pass


class EndpointError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the cover

def curve(x, y, psi):
    """Affine Hesse cubic f(x, y) in the chart z = 1."""
    return y ** 3 - 3 * psi * x * y + x ** 3 + 1


def f_y(x, y, psi):
    return 3 * y ** 2 - 3 * psi * x


def _check_psi(psi: complex):
    p3 = complex(psi) ** 3
    if abs(p3) < 1e-14 or abs(p3 - 1) < 1e-12 or not np.isfinite(p3):
        raise ValueError(f"degenerate branch variety at psi = {psi} (psi^3 in {{0, 1, oo}})")


def branch_points(psi: complex) -> np.ndarray:
    """The six roots of (x^3+1)^2 = 4 psi^3 x^3.

    Labelled x1, rho x1, rho^2 x1, 1/x1, 1/(rho x1), 1/(rho^2 x1), where x1^3
    is the root u of u^2 + (2 - 4 psi^3) u + 1 = 0 with |u| <= 1.
    """
    _check_psi(psi)
    p3 = complex(psi) ** 3
    s = cmath.sqrt(p3 * p3 - p3)
    us = [2 * p3 - 1 + 2 * s, 2 * p3 - 1 - 2 * s]
    u = min(us, key=abs)
    x1 = u ** (1 / 3)
    base = [x1, RHO * x1, RHO ** 2 * x1]
    return np.array(base + [1 / b for b in base], dtype=complex)


def galois_residual(psi: complex) -> float:
    """Max distance from rho*x and 1/x to the nearest branch point, over all branch points."""
    xb = branch_points(psi)
    worst = 0.0
    for img in (RHO * xb, 1 / xb):
        for z in img:
            worst = max(worst, float(np.min(np.abs(xb - z))))
    return worst


def double_root(xb: complex, psi: complex) -> complex:
    """y_b with f = f_y = 0 above a branch point: y_b = (x_b^3+1)/(2 psi x_b)."""
    return (xb ** 3 + 1) / (2 * psi * xb)


def cover_roots(x, psi: complex) -> np.ndarray:
    """Roots in y of y^3 - 3 psi x y + (x^3+1), sorted by (re, im).

    Accepts an array of x; the result then has shape x.shape + (3,).
    """
    xs = np.asarray(x, dtype=complex)
    flat = xs.reshape(-1)
    p = -3 * complex(psi) * flat
    q = flat ** 3 + 1
    comp = np.zeros((flat.size, 3, 3), dtype=complex)
    comp[:, 0, 2] = -q
    comp[:, 1, 0] = 1
    comp[:, 1, 2] = -p
    comp[:, 2, 1] = 1
    r = np.linalg.eigvals(comp)
    for _ in range(2):
        g = r ** 3 + p[:, None] * r + q[:, None]
        dg = 3 * r ** 2 + p[:, None]
        ok = np.abs(dg) > 1e-8 * (1 + np.abs(r) ** 2)
        r = np.where(ok, r - g / np.where(ok, dg, 1), r)
    order = np.lexsort((r.imag, r.real), axis=-1)
    r = np.take_along_axis(r, order, axis=-1)
    return r.reshape(xs.shape + (3,))


def vieta_residual(x: complex, psi: complex) -> float:
    y1, y2, y3 = cover_roots(x, psi)
    return max(abs(y1 + y2 + y3),
               abs(y1 * y2 + y1 * y3 + y2 * y3 + 3 * psi * x),
               abs(y1 * y2 * y3 + x ** 3 + 1))


def orbifold_x(k: int) -> complex:
    """x_(o,k) = -rho^k."""
    z = -RHO ** (k % 3)
    return complex(z.real + 0.0, z.imag + 0.0)   # no signed zeros


# ---------------------------------------------------------------------------
# paths

@dataclass(frozen=True)
class SheetPoint:
    x: complex
    y: complex
    sheet: int | None = None

    def residual(self, psi: complex) -> float:
        return abs(curve(self.x, self.y, psi))


@dataclass(frozen=True)
class Segment:
    """Line from ``start`` to ``end``, or arc about ``center`` from ``start`` through ``sweep`` radians.

    ``branch`` lists which ends ("start", "end") sit on branch points.  At a
    branch start the exit sheet follows ``passage``: "through" continues
    straight on in the local square-root coordinate (for an out-and-back
    passage this exchanges the two meeting sheets), "reflect" keeps the sheet.
    """

    kind: str
    start: complex
    end: complex | None = None
    center: complex | None = None
    sweep: float = 0.0
    branch: tuple[str, ...] = ()
    passage: str = "through"

    def __post_init__(self):
        if self.kind not in ("line", "arc"):
            raise ValueError(f"unknown segment type {self.kind!r}")
        if self.kind == "line" and self.end is None:
            raise ValueError("line segment needs an end point")
        if self.kind == "arc" and self.center is None:
            raise ValueError("arc segment needs a center")
        if self.passage not in ("through", "reflect"):
            raise ValueError("passage must be 'through' or 'reflect'")

    @property
    def endpoint(self) -> complex:
        if self.kind == "line":
            return complex(self.end)
        return complex(self.center) + (complex(self.start) - complex(self.center)) * cmath.exp(1j * self.sweep)

    def _phi(self, s):
        a, b = "start" in self.branch, "end" in self.branch
        if a and b:
            return 3 * s ** 2 - 2 * s ** 3, 6 * s - 6 * s ** 2
        if a:
            return s ** 2, 2 * s
        if b:
            return 1 - (1 - s) ** 2, 2 * (1 - s)
        return s, np.ones_like(s)

    def x(self, s):
        """Return (x(sigma), dx/dsigma)."""
        s = np.asarray(s, dtype=float)
        ph, dph = self._phi(s)
        a = complex(self.start)
        if self.kind == "line":
            d = complex(self.end) - a
            return a + d * ph, d * dph
        c = complex(self.center)
        z = c + (a - c) * np.exp(1j * self.sweep * ph)
        return z, 1j * self.sweep * (z - c) * dph

    def to_json(self) -> dict:
        d: dict = {"type": self.kind, "start": _c2j(self.start)}
        if self.kind == "line":
            d["end"] = _c2j(self.end)
        else:
            d["center"] = _c2j(self.center)
            d["sweep"] = self.sweep
        if self.branch:
            d["annotation"] = {"branch_passage": list(self.branch), "passage": self.passage}
        return d


@dataclass(frozen=True)
class ContourPath:
    """Piecewise x-path with a starting sheet (index in the (re, im) ordering, or an explicit y)."""

    segments: tuple[Segment, ...]
    start_sheet: int | None = 0
    start_y: complex | None = None

    @property
    def start(self) -> complex:
        return complex(self.segments[0].start)

    @property
    def end(self) -> complex:
        return self.segments[-1].endpoint

    def then(self, other: "ContourPath") -> "ContourPath":
        return ContourPath(self.segments + other.segments, self.start_sheet, self.start_y)

    def to_json(self) -> str:
        d: dict = {"segments": [s.to_json() for s in self.segments]}
        if self.start_y is not None:
            d["start_y"] = _c2j(self.start_y)
        else:
            d["start_sheet"] = self.start_sheet
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, psi: complex | None = None) -> "ContourPath":
        """Parse the JSON path format.

        Points are [re, im] pairs, or {"branch": i} (i-th branch point at psi),
        or {"orbifold": k} for x = -rho^k.  Symbolic points need ``psi``.
        """
        d = json.loads(text) if isinstance(text, str) else text
        xb = branch_points(psi) if psi is not None else None

        def point(p):
            if isinstance(p, dict):
                if "branch" in p:
                    if xb is None:
                        raise ValueError("symbolic branch point needs psi")
                    return complex(xb[int(p["branch"])])
                if "orbifold" in p:
                    return orbifold_x(int(p["orbifold"]))
                raise ValueError(f"bad point {p!r}")
            return complex(p[0], p[1])

        segs = []
        for s in d["segments"]:
            ann = s.get("annotation") or {}
            bp = ann.get("branch_passage", ())
            if isinstance(bp, str):
                bp = ("start", "end") if bp == "both" else (bp,)
            common = dict(branch=tuple(bp), passage=ann.get("passage", "through"))
            if s["type"] == "line":
                segs.append(Segment("line", point(s["start"]), point(s["end"]), **common))
            elif s["type"] == "arc":
                segs.append(Segment("arc", point(s["start"]), center=point(s["center"]),
                                    sweep=float(s["sweep"]), **common))
            else:
                raise ValueError(f"unknown segment type {s['type']!r}")
        y0 = d.get("start_y")
        return cls(tuple(segs), d.get("start_sheet", 0) if y0 is None else None,
                   None if y0 is None else point(y0))


def _c2j(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def line(a: complex, b: complex, branch: Sequence[str] = (), passage: str = "through") -> Segment:
    return Segment("line", complex(a), complex(b), branch=tuple(branch), passage=passage)


def arc(start: complex, center: complex, sweep: float, branch: Sequence[str] = ()) -> Segment:
    return Segment("arc", complex(start), center=complex(center), sweep=float(sweep), branch=tuple(branch))


def circle_path(center: complex, radius: float, start_sheet: int = 0, start_y: complex | None = None) -> ContourPath:
    a = complex(center) + radius
    return ContourPath((arc(a, center, TWO_PI),), start_sheet if start_y is None else None, start_y)


# ---------------------------------------------------------------------------
# tracking

@dataclass
class _Tracked:
    sigma: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    y: np.ndarray


def _local_slope(xb: complex, yb: complex, psi: complex) -> complex:
    """kappa in (y - y_b)^2 ~ kappa (x - x_b) near a simple branch point."""
    return (psi * yb - xb ** 2) / yb


def _is_branch(x: complex, psi: complex, tol: float = 1e-7) -> bool:
    r = cover_roots(x, psi)
    d = min(abs(r[0] - r[1]), abs(r[0] - r[2]), abs(r[1] - r[2]))
    return d < tol ** 0.5 * (1 + abs(x))


def _track_segment(seg: Segment, psi: complex, sigma: np.ndarray, y_start: complex,
                   entry: complex | None, ratio: float = 0.5) -> _Tracked:
    """Continue y along ``seg`` over the increasing grid ``sigma`` (endpoints excluded).

    ``entry`` is y - y_b just before a branch start, used by the passage rule.
    """
    x, dx = seg.x(sigma)
    roots = cover_roots(x, psi)
    ys = np.empty(len(sigma), dtype=complex)
    s_prev2, y_prev2 = None, None
    s_prev, y_prev = 0.0, complex(y_start)
    for i, s in enumerate(sigma):
        cand = roots[i]
        if i == 0 and "start" in seg.branch:
            xb, yb = complex(seg.start), complex(y_start)
            step = cmath.sqrt(_local_slope(xb, yb, psi) * (x[i] - xb))
            if entry is not None:
                dot = (step * entry.conjugate()).real
                if (dot > 0) == (seg.passage == "through"):
                    step = -step
            pred = yb + step
        elif y_prev2 is None:
            pred = y_prev
        else:
            pred = y_prev + (y_prev - y_prev2) * (s - s_prev) / (s_prev - s_prev2)
        d = np.abs(cand - pred)
        j = int(np.argmin(d))
        d_sorted = np.sort(d)
        if d_sorted[1] > 0 and d_sorted[0] / d_sorted[1] > ratio and not (i == 0 and "start" in seg.branch):
            raise TrackingError(f"ambiguous sheet at sigma={s:.6g}, x={x[i]:.6g}")
        ys[i] = cand[j]
        s_prev2, y_prev2, s_prev, y_prev = s_prev, y_prev, s, ys[i]
    return _Tracked(sigma, x, dx, ys)


def _start_y(path: ContourPath, psi: complex) -> complex:
    roots = cover_roots(path.start, psi)
    if path.start_y is not None:
        return complex(roots[int(np.argmin(np.abs(roots - path.start_y)))])
    return complex(roots[path.start_sheet or 0])


def _gauss_grid(panels: int, m: int):
    t, w = np.polynomial.legendre.leggauss(m)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = edges[1] - edges[0]
    s = (edges[:-1, None] + 0.5 * h * (t[None, :] + 1)).reshape(-1)
    ws = np.tile(0.5 * h * w, panels)
    return s, ws


def _walk(path: ContourPath, psi: complex, panels: int, m: int):
    """Track y over composite Gauss nodes of every segment; return per-segment data."""
    psi = complex(psi)
    y = _start_y(path, psi)
    entry = None
    out = []
    for seg in path.segments:
        if "start" in seg.branch and not _is_branch(complex(seg.start), psi):
            raise TrackingError(f"annotated branch passage at {seg.start} is not a branch point")
        s, w = _gauss_grid(panels, m)
        for attempt in range(4):
            try:
                tr = _track_segment(seg, psi, s, y, entry)
                break
            except TrackingError:
                if attempt == 3:
                    raise
                panels *= 2
                s, w = _gauss_grid(panels, m)
        xe = seg.endpoint
        if "end" in seg.branch:
            if not _is_branch(xe, psi):
                raise TrackingError(f"annotated branch passage at {xe} is not a branch point")
            yb = double_root(xe, psi)
            entry = tr.y[-1] - yb
            y = yb
        else:
            roots = cover_roots(xe, psi)
            pred = tr.y[-1] + (tr.y[-1] - tr.y[-2]) * (1 - tr.sigma[-1]) / (tr.sigma[-1] - tr.sigma[-2])
            y = complex(roots[int(np.argmin(np.abs(roots - pred)))])
            entry = None
        out.append((seg, tr, w, y))
    return out


def track_path(path: ContourPath, psi: complex, panels: int = 16, m: int = 10) -> list[SheetPoint]:
    """Sheet points along the path: start, tracked interior nodes, segment ends."""
    psi = complex(psi)
    pts = []
    y0 = _start_y(path, psi)
    pts.append(_sheet_point(path.start, y0, psi))
    for seg, tr, _, y_end in _walk(path, psi, panels, m):
        for xv, yv in zip(tr.x, tr.y):
            pts.append(_sheet_point(xv, yv, psi))
        pts.append(_sheet_point(seg.endpoint, y_end, psi))
    return pts


def _sheet_point(x, y, psi) -> SheetPoint:
    roots = cover_roots(x, psi)
    return SheetPoint(complex(x), complex(y), int(np.argmin(np.abs(roots - y))))


def loop_permutation(loop: ContourPath, psi: complex) -> tuple[int, ...]:
    """Sheet permutation induced by a closed x-loop: start sheet i ends on sheet perm[i]."""
    if abs(loop.end - loop.start) > 1e-12 * (1 + abs(loop.start)):
        raise ValueError("loop is not closed in x")
    perm = []
    for i in range(3):
        p = ContourPath(loop.segments, i)
        perm.append(track_path(p, psi)[-1].sheet)
    return tuple(perm)


def permutation_sign(perm: Sequence[int]) -> int:
    seen, sign = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, n = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        sign *= (-1) ** (n - 1)
    return sign


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Loop ``first`` followed by loop ``second``."""
    return tuple(second[first[i]] for i in range(len(first)))


def keyhole_loop(base: complex, target: complex, radius: float) -> ContourPath:
    """Out along the ray to ``target``, once counterclockwise round it, back to ``base``."""
    base, target = complex(base), complex(target)
    u = (target - base) / abs(target - base)
    near = target - radius * u
    return ContourPath((line(base, near), arc(near, target, TWO_PI), line(near, base)))


def min_branch_separation(psi: complex) -> float:
    xb = branch_points(psi)
    d = np.abs(xb[:, None] - xb[None, :])
    return float(np.min(d[d > 0]))


# ---------------------------------------------------------------------------
# integrals along tracked paths

def _integrate(path: ContourPath, psi: complex, panels: int, m: int):
    total = 0j
    for _, tr, w, _ in _walk(path, psi, panels, m):
        total += np.sum(w * psi * tr.dx / f_y(tr.x, tr.y, psi))
    return total


@dataclass(frozen=True)
class PathIntegral:
    value: complex
    error: float
    start: SheetPoint
    end: SheetPoint
    panels: int


def path_integral(path: ContourPath, psi: complex, rtol: float = 1e-10, m: int = 10,
                  panels: int = 8, max_panels: int = 1024) -> PathIntegral:
    """int psi dx / f_y along the tracked path, panels doubled until two levels agree."""
    psi = complex(psi)
    prev = _integrate(path, psi, panels, m)
    while True:
        panels *= 2
        cur = _integrate(path, psi, panels, m)
        err = abs(cur - prev)
        if err <= rtol * max(abs(cur), 1e-300) or panels >= max_panels:
            break
        prev = cur
    pts = track_path(path, psi, panels, m)
    return PathIntegral(complex(cur), float(err), pts[0], pts[-1], panels)


def endpoint_term(y2_over_psi_x: Fraction) -> Fraction:
    """psi x / f_y at a point where y^2 = c psi x: f_y = (3c - 3) psi x, so the term is 1/(3c - 3)."""
    c = Fraction(y2_over_psi_x)
    if c == 1:
        raise ZeroDivisionError("f_y vanishes (branch point)")
    return 1 / (3 * c - 3)


ENDPOINT_START = endpoint_term(3)   # [x_o, (3 psi x_o)^(1/2)]: 1/6
ENDPOINT_END = endpoint_term(0)     # 3-torsion point [x_o, 0]: -1/3
# the value of (psi x / f_y) at the end of the chain minus at its start
ENDPOINT_DIFFERENCE = ENDPOINT_END - ENDPOINT_START
PRINTED_ENDPOINT_DIFFERENCE = Fraction(1, 6) - Fraction(-1, 9)


def _check_chain_endpoints(start: SheetPoint, end: SheetPoint, psi: complex, tol: float = 1e-8):
    for p in (start, end):
        if abs(p.x ** 3 + 1) > tol:
            raise EndpointError(f"chain endpoint x = {p.x} does not satisfy x^3 = -1")
    if abs(start.y ** 2 - 3 * psi * start.x) > tol or abs(start.y) < tol:
        raise EndpointError("chain must start at [x_o, (3 psi x_o)^(1/2)]")
    if abs(end.y) > tol:
        raise EndpointError(f"chain must end at a 3-torsion point [x_o, 0]; tracked y = {end.y}")


def chain_integral_K(psi: complex, path: ContourPath, rtol: float = 1e-10) -> complex:
    """K(psi) = int_C psi dx / (3 y^2 - 3 psi x) for a chain from [x_o, (3 psi x_o)^(1/2)] to [x_o', 0]."""
    res = path_integral(path, psi, rtol)
    _check_chain_endpoints(res.start, res.end, complex(psi))
    return res.value


def _chain_branch(psi: complex, xo: complex, ys: complex) -> complex:
    """The branch point next to x_o at which the sheet through ys meets the y = 0 sheet."""
    xb = branch_points(psi)
    near = sorted(xb, key=lambda z: abs(z - xo))[:2]
    scored = [(((double_root(z, psi)) * ys.conjugate()).real, z) for z in near]
    return max(scored, key=lambda t: t[0])[1]


def standard_chain(psi: complex, k: int = 3, sign: int = 1, detour: float = 0.0,
                   ref_psi: complex | None = None) -> ContourPath:
    """Out-and-back chain x_o -> x_b -> x_o leaving on y = sign (3 psi x_o)^(1/2).

    The square root is principal at ``ref_psi`` (default psi) and continued by
    (psi/ref_psi)^(1/2), so families of chains vary continuously in psi.
    ``detour`` bends both legs through a common waypoint on the side away
    from the partner branch point; the homotopy class is unchanged.
    """
    psi = complex(psi)
    ref = psi if ref_psi is None else complex(ref_psi)
    xo = orbifold_x(k)
    ys = sign * cmath.sqrt(3 * ref * xo) * cmath.sqrt(psi / ref)
    xb = _chain_branch(psi, xo, ys)
    if detour:
        xb_all = branch_points(psi)
        partner = min((z for z in xb_all if z != xb), key=lambda z: abs(z - xo))
        mid = 0.5 * (xo + xb)
        n = 1j * (xb - xo)
        if ((mid + n - partner) * (mid + n - partner).conjugate()).real < ((mid - n - partner) * (mid - n - partner).conjugate()).real:
            n = -n
        wp = mid + detour * n
        segs = (line(xo, wp), line(wp, xb, ("end",)), line(xb, wp, ("start",)), line(wp, xo))
    else:
        segs = (line(xo, xb, ("end",)), line(xb, xo, ("start",)))
    return ContourPath(segs, None, ys)


def arc_chain(psi: complex, k: int = 3, sign: int = 1, bulge: float = 0.5,
              ref_psi: complex | None = None) -> ContourPath:
    """Same passage as :func:`standard_chain` but with both legs along a circular arc."""
    base = standard_chain(psi, k, sign, 0.0, ref_psi)
    xo, xb = base.segments[0].start, base.segments[0].end
    mid = 0.5 * (xo + xb)
    partner = min((z for z in branch_points(psi) if abs(z - xb) > 1e-12), key=lambda z: abs(z - xo))
    n = 1j * (xb - xo)
    if abs(mid + n - partner) < abs(mid - n - partner):
        n = -n
    # circle through xo and xb with centre on the far side
    c = mid - (1 / bulge) * 0.5 * n
    a0 = cmath.phase(xo - c)
    a1 = cmath.phase(xb - c)
    sweep = (a1 - a0 + math.pi) % TWO_PI - math.pi
    segs = (arc(xo, c, sweep, ("end",)),
            Segment("arc", xb, center=c, sweep=-sweep, branch=("start",)))
    return ContourPath(segs, None, base.start_y)


# ---------------------------------------------------------------------------
# numeric operators via Cauchy differentiation

def _stirling2(n: int) -> list[list[int]]:
    S = [[0] * (n + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            S[i][k] = k * S[i - 1][k] + S[i - 1][k - 1]
    return S


def cauchy_derivatives(values: np.ndarray, radius: float, count: int) -> list[complex]:
    """f^(n)(c), n < count, from samples f(c + r e^(2 pi i j/N)) by the trapezoid rule."""
    N = len(values)
    a = np.fft.fft(values) / N
    return [complex(a[n]) * math.factorial(n) / radius ** n for n in range(count)]


def apply_operator_numeric(op: ThetaOperator, derivs: Sequence[complex], z0: complex) -> complex:
    """Evaluate (op f)(z0) given f^(n)(z0); theta^p = sum_k S(p, k) z^k d^k."""
    z0 = complex(z0)
    order = op.order()
    if order + 1 > len(derivs):
        raise ValueError("not enough derivatives for the operator order")
    S = _stirling2(order)
    total = 0j
    th = [sum(S[p][k] * z0 ** k * derivs[k] for k in range(p + 1)) for p in range(order + 1)]
    for (m,), poly in op.terms:
        val = sum(complex(c) * th[p] for (p,), c in poly)
        total += z0 ** m * val
    return total


def _poly_derivs(coeffs: Sequence[complex], h: complex, count: int) -> list[complex]:
    """Derivatives at c + h of the Taylor polynomial sum a_n (z - c)^n."""
    out = []
    for d in range(count):
        s = 0j
        for n in range(d, len(coeffs)):
            s += coeffs[n] * math.perm(n, d) * h ** (n - d)
        out.append(s)
    return out


def exact_primitive(x, y, psi):
    """G with dG = (psi^-3 o L_PF)(psi dx / f_y) on the curve, up to a function of psi alone.

    Found by reducing modulo the curve equation with a degree-5 numerator over
    f_y^3; on the curve G = -9 psi x y (x^3 - 1) / f_y^3.
    """
    return -9 * psi * x * y * (x ** 3 - 1) / f_y(x, y, psi) ** 3


def chain_endpoint_value(psi: complex, start: SheetPoint, end: SheetPoint) -> complex:
    """G(end) - G(start): what (psi^-3 o L_PF) K must equal for a chain with fixed x-endpoints."""
    return complex(exact_primitive(end.x, end.y, psi) - exact_primitive(start.x, start.y, psi))


@dataclass(frozen=True)
class Inhomogeneity:
    """(psi^-3 o L_PF) K at psi0, with its spread on an inner circle."""

    value: complex
    spread: float
    constant: bool
    psi0: complex
    radius: float
    primitive_value: complex
    endpoint_oracle: Fraction
    printed_value: Fraction
    samples: tuple[complex, ...] = field(default=(), repr=False)

    @property
    def matches_primitive(self) -> bool:
        return abs(self.value - self.primitive_value) < 1e-6 * max(1.0, abs(self.value))

    @property
    def matches_oracle(self) -> bool:
        return abs(self.value - complex(self.endpoint_oracle)) < 1e-6

    @property
    def matches_printed(self) -> bool:
        return abs(self.value - complex(self.printed_value)) < 1e-6

    @property
    def diagnostic(self) -> str:
        if self.constant:
            return "constant on the inner circle"
        return f"not constant near psi0: spread {self.spread:.3e} on radius {0.4 * self.radius:.3g}"


def psi_chart_pf_operator() -> ThetaOperator:
    """psi^-3 o L_PF."""
    return compose(var(("psi",), 0, -3), l_pf())


def inhomogeneity_of_K(psi0: complex, radius: float | None = None, nodes: int = 64,
                       k: int = 3, sign: int = 1, tol: float = 1e-6) -> Inhomogeneity:
    """(psi^-3 o L_PF) K at psi0 from K sampled on a circle; constancy checked on an inner circle."""
    psi0 = complex(psi0)
    r = 0.05 * abs(psi0) if radius is None else float(radius)
    pts = psi0 + r * np.exp(2j * math.pi * np.arange(nodes) / nodes)
    vals = np.array([chain_integral_K(p, standard_chain(p, k, sign, ref_psi=psi0)) for p in pts])
    a = np.fft.fft(vals) / nodes
    coeffs = [complex(a[n]) / r ** n for n in range(nodes // 2)]
    op = psi_chart_pf_operator()
    n_d = op.order() + 1
    centre = apply_operator_numeric(op, [c * math.factorial(i) for i, c in enumerate(coeffs[:n_d])], psi0)
    inner = []
    for j in range(8):
        h = 0.4 * r * cmath.exp(2j * math.pi * j / 8)
        inner.append(apply_operator_numeric(op, _poly_derivs(coeffs, h, n_d), psi0 + h))
    spread = max(abs(v - centre) for v in inner)
    chain = standard_chain(psi0, k, sign)
    res = path_integral(chain, psi0)
    prim = chain_endpoint_value(psi0, res.start, res.end)
    return Inhomogeneity(centre, spread, spread <= tol * max(1.0, abs(centre)), psi0, r, prim,
                         ENDPOINT_DIFFERENCE, PRINTED_ENDPOINT_DIFFERENCE, tuple(vals))


# ---------------------------------------------------------------------------
# cycles

@dataclass(frozen=True)
class CyclePeriod:
    value: complex
    closure: float


def cycle_period(psi: complex, loop: ContourPath, rtol: float = 1e-10) -> CyclePeriod:
    """int psi dx / f_y over a loop that closes on the cover."""
    res = path_integral(loop, psi, rtol)
    gap = abs(res.end.x - res.start.x) + abs(res.end.y - res.start.y)
    if gap > 1e-8:
        raise ValueError(f"loop does not close on the cover (gap {gap:.3e})")
    return CyclePeriod(res.value, gap)


@dataclass(frozen=True)
class PeriodFit:
    coefficients: tuple[complex, complex]
    residual: float
    scale: float


def fit_to_periods(psis: Sequence[complex], values: Sequence[complex]) -> PeriodFit:
    """Least-squares c1 pi1 + c2 pi2 through the sampled values."""
    A = np.array([[pi1(p), pi2(p)] for p in psis])
    b = np.array(values, dtype=complex)
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    return PeriodFit((complex(coef[0]), complex(coef[1])), float(np.max(np.abs(A @ coef - b))),
                     float(np.max(np.abs(b))))


def transposition_loops(psi: complex, base: complex = 0j, frac: float = 0.25):
    """Keyhole loops from ``base`` round each branch point, in counterclockwise order of argument.

    Returns (branch point, loop, permutation) triples.
    """
    xb = branch_points(psi)
    r = frac * min_branch_separation(psi)
    order = sorted(xb, key=lambda z: cmath.phase(z - base) % TWO_PI)
    out = []
    for z in order:
        loop = keyhole_loop(base, z, r)
        out.append((complex(z), loop, loop_permutation(loop, psi)))
    return out


def lifted_cycle(psi: complex, base: complex, first: int, second: int, sheet: int,
                 frac: float = 0.25) -> ContourPath:
    """Keyhole loop round branch point ``first`` then ``second`` (indices in counterclockwise order).

    Closed on the cover when both loops swap the same pair of sheets.
    """
    loops = transposition_loops(psi, base, frac)
    p = loops[first][1].then(loops[second][1])
    return ContourPath(p.segments, sheet)


def torsion_chain(psi: complex, k: int, l: int, via: complex = 0j, around: int | None = None,
                  frac: float = 0.25) -> ContourPath:
    """From the 3-torsion point [x_(o,k), 0] to x_(o,l) through ``via``.

    With ``around`` set, a keyhole loop from ``via`` round that branch point
    (index in counterclockwise order seen from ``via``) is inserted to change sheet.
    """
    xa, xc = orbifold_x(k), orbifold_x(l)
    segs: tuple[Segment, ...] = (line(xa, via),)
    if around is not None:
        xb = sorted(branch_points(psi), key=lambda z: cmath.phase(z - via) % TWO_PI)[around]
        segs += keyhole_loop(via, xb, frac * min_branch_separation(psi)).segments
    segs += (line(via, xc),)
    return ContourPath(segs, None, 0j)


def torsion_chain_integral(psi: complex, k: int, l: int, via: complex = 0j,
                           around: int | None | str = "auto", rtol: float = 1e-10) -> complex:
    """int psi dx / f_y from [x_(o,k), 0] to [x_(o,l), 0].

    ``around="auto"`` tries the direct path first, then one keyhole detour per
    branch point in order, and keeps the first that ends on the torsion point.
    """
    choices = [None, *range(6)] if around == "auto" else [around]
    last = None
    for c in choices:
        res = path_integral(torsion_chain(psi, k, l, via, c), psi, rtol)
        if abs(res.end.y) <= 1e-8:
            return res.value
        last = res.end.y
    raise EndpointError(f"path ends on y = {last}, not on the 3-torsion point")


# ---------------------------------------------------------------------------
# torsion translations

def translation_apply(p: SheetPoint | tuple, generator: str):
    """sigma1: (x, y, z) -> (x, rho y, rho^2 z); sigma2: (x, y, z) -> (y, z, x).

    Takes a SheetPoint (chart z = 1) or a projective triple.  Returns a
    SheetPoint when the image has z != 0, otherwise the projective triple.
    """
    if isinstance(p, SheetPoint):
        X, Y, Z = p.x, p.y, 1 + 0j
    else:
        X, Y, Z = (complex(c) for c in p)
    if generator == "sigma1":
        X, Y, Z = X, RHO * Y, RHO ** 2 * Z
    elif generator == "sigma2":
        X, Y, Z = Y, Z, X
    else:
        raise ValueError("generator must be 'sigma1' or 'sigma2'")
    if abs(Z) < 1e-14 * max(abs(X), abs(Y), 1):
        return (X, Y, Z)
    return SheetPoint(X / Z, Y / Z)


def projective_curve(X, Y, Z, psi):
    return X ** 3 + Y ** 3 + Z ** 3 - 3 * psi * X * Y * Z


# ---------------------------------------------------------------------------
# Weierstrass chain

def _cubic_roots(g2: complex, g3: complex) -> np.ndarray:
    return np.roots([4, 0, -complex(g2), -complex(g3)])


def weierstrass_chain(g2: complex, g3: complex, R: float | None = None, order: int = 60,
                      panels: int = 8, rtol: float = 1e-12) -> complex:
    """int_0^oo dX / (4X^3 - g2 X - g3)^(1/2) along the positive real axis.

    [0, R] directly, [R, oo) through X = R/t^2; the square root starts on the
    principal branch at X = 0 and is continued along the ray.
    """
    g2, g3 = complex(g2), complex(g3)
    if abs(g2 ** 3 - 27 * g3 ** 2) < 1e-14 * (1 + abs(g2) ** 3):
        raise ValueError("discriminant vanishes")
    roots = _cubic_roots(g2, g3)
    for r in roots:
        if abs(r.imag) < 1e-12 and r.real >= -1e-12:
            raise ValueError(f"root {r} of 4X^3 - g2 X - g3 lies on the integration ray")
    if R is None:
        R = max(1.0, 2 * float(np.max(np.abs(roots))))
    prev = None
    while True:
        val = _weierstrass_once(g2, g3, R, order, panels)
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        if panels > 512:
            return val
        prev = val
        panels *= 2


def _weierstrass_once(g2, g3, R, m, panels):
    s, w = _gauss_grid(panels, m)
    X = R * s
    q = 4 * X ** 3 - g2 * X - g3
    qR = 4 * R ** 3 - g2 * R - g3
    Y = _continued_sqrt(np.concatenate([[-g3], q, [qR]]))
    head = np.sum(w * R / Y[1:-1])
    # X = R/t^2: the tail becomes int_0^1 R^(-1/2) dt / u(t), u^2 = 1 - g2 t^4/(4R^2) - g3 t^6/(4R^3),
    # with u(1) = Y(R) / (2 R^(3/2)) and u continued from t = 1 down to t = 0
    t = s[::-1]
    qt = 1 - g2 * t ** 4 / (4 * R ** 2) - g3 * t ** 6 / (4 * R ** 3)
    u = _continued_sqrt(np.concatenate([[qR / (4 * R ** 3)], qt]), first=Y[-1] / (2 * R ** 1.5))[1:]
    tail = np.sum(w[::-1] / u) / math.sqrt(R)
    return complex(head + tail)


def _continued_sqrt(values: np.ndarray, first: complex | None = None) -> np.ndarray:
    """Square roots continued along a sequence, starting principal (or at ``first``)."""
    out = np.sqrt(values.astype(complex))
    if first is not None:
        if abs(out[0] - first) > abs(out[0] + first):
            out[0] = -out[0]
    for i in range(1, len(out)):
        if abs(out[i] - out[i - 1]) > abs(out[i] + out[i - 1]):
            out[i] = -out[i]
    return out


def weierstrass_scaling_oracle(g3: complex) -> complex:
    """g2 = 0: X = (g3/4)^(1/3)... reduces to ((-g3)^(-1/2)) lam int_0^oo ds/(1+s^3)^(1/2), lam^3 = -g3/4.

    int_0^oo ds/(1+s^3)^(1/2) = B(1/3, 1/6)/3.  Valid for real g3 < 0.
    """
    g3 = float(complex(g3).real)
    if g3 >= 0:
        raise ValueError("scaling oracle stated for real g3 < 0")
    lam = (-g3 / 4) ** (1 / 3)
    beta = math.gamma(1 / 3) * math.gamma(1 / 6) / math.gamma(1 / 2)
    return lam / math.sqrt(-g3) * beta / 3


def weierstrass_operator_residual(g2: complex, g3: complex, radius: float = 0.05, nodes: int = 48) -> complex:
    """Apply the third-order w-operator to g2^(1/4) times the chain integral.

    g2 is held fixed and g3 = (w g2^3/27)^(1/2) continued from the given g3.
    """
    from .opalg import weierstrass_display
    g2, g3 = complex(g2), complex(g3)
    w0 = 27 * g3 ** 2 / g2 ** 3
    r = radius * abs(w0)
    ws = w0 + r * np.exp(2j * math.pi * np.arange(nodes) / nodes)
    vals = []
    for w in ws:
        g3w = g3 * cmath.sqrt(w / w0)
        vals.append(g2 ** 0.25 * weierstrass_chain(g2, g3w))
    op = weierstrass_display()
    d = cauchy_derivatives(np.array(vals), r, op.order() + 1)
    return apply_operator_numeric(op, d, w0)
