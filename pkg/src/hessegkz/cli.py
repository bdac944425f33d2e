"""Command line: verify, eval, emit (alias series), operator, chain."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import checks, curves, cy3, frobenius, modular, opalg, oscint
from .series import LogSeries

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _num(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _out(value, error: float = 0.0, **meta) -> dict:
    v = complex(value)
    return {"value": {"re": v.real, "im": v.imag}, "error_estimate": error, "metadata": meta}


def _params(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# eval

def _eval_I(p):
    psi = _num(p["psi"])
    if abs(psi) < 1:
        r = oscint.oscillating_series(psi, int(p.get("N", 400)))
        return _out(r.value, r.error, method="series", **r.meta)
    r = oscint.quadrature_3d(oscint.OscillatingSetup(psi))
    return _out(r.value, r.error, method="quadrature_3d", **r.meta)


def _eval_J(i):
    def run(p):
        return _out(oscint.j_decomposition(_num(p["psi"]))[i], 0.0)
    return run


def _eval_K(p):
    psi = _num(p["psi"])
    sign = int(p.get("sign", 1))
    path = curves.standard_chain(psi, int(p.get("k", 3)), sign)
    r = curves.path_integral(path, psi)
    return _out(r.value, r.error, panels=r.panels)


def _eval_U(p):
    nu = Fraction(p.get("nu", "0"))
    mode = p.get("mode", "finite" if nu.denominator == 1 and nu >= 0 else "barnes")
    return _out(cy3.u_nu(_num(p["a"]), nu, mode, int(p.get("N", 100))), 0.0, nu=str(nu), mode=mode)


def _eval_B3(p):
    if "q" in p:
        return _out(modular.b3_numeric(_num(p["q"])), 0.0)
    alpha = _num(p["alpha"])
    q = modular.q_of_alpha(alpha)
    return _out(modular.b3_numeric(q), 0.0, q={"re": q.real, "im": q.imag})


EVAL_TARGETS = {
    "I": _eval_I,
    "J1": _eval_J(0),
    "J2": _eval_J(1),
    "J3": _eval_J(2),
    "pi1": lambda p: _out(frobenius.pi1(_num(p["psi"]))),
    "pi2": lambda p: _out(frobenius.pi2(_num(p["psi"]))),
    "omega0": lambda p: _out(frobenius.omega0(_num(p["alpha"]))),
    "omega1": lambda p: _out(frobenius.omega1(_num(p["alpha"]))),
    "K": _eval_K,
    "U_nu": _eval_U,
    "W": lambda p: _out(modular.wronskian_value(_num(p["psi"]))),
    "B3": _eval_B3,
    "tau": lambda p: _out(modular.tau_of_alpha(_num(p["alpha"]))),
    "I2d": lambda p: (lambda r: _out(r.value, r.error, **r.meta))(oscint.quadrature_2d(_num(p["psi"]))),
}


# ---------------------------------------------------------------------------
# emit

def _qseries_rows(s: modular.QSeries, order: int):
    return [(0, s.offset + k, Fraction(c)) for k, c in enumerate(s.coeffs[: order + 1])]


def _log_rows(s: LogSeries, order: int):
    return [(j, s.rho + k, Fraction(s.coeffs[j][k]))
            for j in range(s.depth + 1) for k in range(min(order, s.order) + 1)]


def _orbifold(i):
    def run(n):
        return "psi", _log_rows(frobenius.orbifold_basis(n + 3)[i], n - 1 - i)
    return run


def _frob(k):
    def run(n):
        return "u", _log_rows(frobenius.epsilon_deformation(n, max(k, 2))[k], n)
    return run


def _omega0_ab(n):
    s = cy3.fundamental_period(n, n)
    return "a^m b^-6k", [(k, Fraction(m), c) for (m, k), c in sorted(s.coeffs.items(), key=lambda t: (t[0][1], t[0][0]))]


EMIT_TARGETS = {
    "B": lambda n: ("q", _qseries_rows(modular.eta_quotient_B(n), n)),
    "B3": lambda n: ("q", _qseries_rows(modular.lambert_B3(n), n)),
    "li2": lambda n: ("q", _qseries_rows(modular.li2_chi_part(n), n)),
    "mirror": lambda n: ("q", _qseries_rows(modular.mirror_map_log_part(n), n)),
    "pi1": _orbifold(0),
    "pi2": _orbifold(1),
    "J3": _orbifold(2),
    "omega0": lambda n: ("alpha", _log_rows(frobenius.pfq_series(frobenius.F_OMEGA, n, 0, "alpha"), n)),
    "wronskian": lambda n: ("psi", _log_rows(modular.wronskian_series(n), n)),
    "omega0_ab": _omega0_ab,
    **{f"f{k}": _frob(k) for k in range(7)},
}


def emit_text(target: str, fmt: str, order: int) -> str:
    if target not in EMIT_TARGETS:
        raise KeyError(f"unknown series {target!r}; known: {', '.join(sorted(EMIT_TARGETS))}")
    var, rows = EMIT_TARGETS[target](order)
    if fmt == "csv":
        first = "k" if target == "omega0_ab" else "log_power"
        lines = [f"{first},exponent,numerator,denominator"]
        lines += [f"{j},{e},{c.numerator},{c.denominator}" for j, e, c in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps({"target": target, "variable": var, "order": order,
                           "terms": [{"log_power": j, "exponent": str(e), "numerator": str(c.numerator),
                                      "denominator": str(c.denominator)} for j, e, c in rows]},
                          indent=1) + "\n"
    raise ValueError("format must be csv or json")


# ---------------------------------------------------------------------------

def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_verify(args) -> int:
    try:
        overrides = {}
        if args.config:
            with open(args.config) as fh:
                overrides.update(checks.parse_config(fh.read()))
        overrides.update(_params(args.set or []))
        reports, cfg = checks.run_suite(args.filter, overrides)
    except (checks.ConfigError, OSError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    _write(checks.suite_json(reports, cfg, args.timings), args.output)
    for r in reports:
        print(f"{r.status:8s} {r.check}", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def cmd_eval(args) -> int:
    if args.target not in EVAL_TARGETS:
        print(f"unknown target {args.target!r}; known: {', '.join(sorted(EVAL_TARGETS))}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = EVAL_TARGETS[args.target](_params(args.params))
    except KeyError as e:
        print(f"missing parameter {e.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps(out, sort_keys=True, default=str))
    return EXIT_OK


def cmd_emit(args) -> int:
    try:
        text = emit_text(args.target, args.format, args.order)
    except (KeyError, ValueError) as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _write(text, args.output)
    except OSError as e:
        print(f"cannot write {args.output}: {e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_operator(args) -> int:
    if args.list:
        print("\n".join(opalg.builtin_names() + ["L_nu:<rational>"]))
        return EXIT_OK
    try:
        if args.parse:
            op = opalg.parse(args.name, tuple(args.vars.split(",")))
        else:
            op = opalg.builtin(args.name)
    except (KeyError, ValueError, SyntaxError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(opalg.format_operator(op.normalized() if args.monic else op))
    return EXIT_OK


def cmd_chain(args) -> int:
    psi = _num(args.psi)
    try:
        with open(args.path) as fh:
            path = curves.ContourPath.from_json(fh.read(), psi)
        r = curves.path_integral(path, psi, args.rtol)
    except OSError as e:
        print(f"cannot read {args.path}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, curves.TrackingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    pt = lambda s: {"x": [s.x.real, s.x.imag], "y": [s.y.real, s.y.imag], "sheet": s.sheet}
    print(json.dumps(_out(r.value, r.error, panels=r.panels, start=pt(r.start), end=pt(r.end)), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hessegkz", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--filter", help="check-id glob, e.g. 'opalg.*'")
    v.add_argument("--config", help="key = value file")
    v.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    v.add_argument("--output", "-o", help="report path (default stdout)")
    v.add_argument("--timings", action="store_true", help="include runtimes (reports are then not byte-stable)")
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a named quantity")
    e.add_argument("target")
    e.add_argument("params", nargs="*", metavar="KEY=VALUE")
    e.set_defaults(fn=cmd_eval)

    for name in ("emit", "series"):
        s = sub.add_parser(name, help="write exact series coefficients")
        s.add_argument("target")
        s.add_argument("format", choices=("csv", "json"))
        s.add_argument("order", type=int)
        s.add_argument("--output", "-o")
        s.set_defaults(fn=cmd_emit)

    o = sub.add_parser("operator", help="print an operator in canonical form")
    o.add_argument("name", nargs="?", default="L_PF")
    o.add_argument("--list", action="store_true")
    o.add_argument("--parse", action="store_true", help="treat NAME as operator text")
    o.add_argument("--vars", default="z")
    o.add_argument("--monic", action="store_true")
    o.set_defaults(fn=cmd_operator)

    c = sub.add_parser("chain", help="integrate psi dx / f_y along a path file")
    c.add_argument("path")
    c.add_argument("--psi", required=True)
    c.add_argument("--rtol", type=float, default=1e-10)
    c.set_defaults(fn=cmd_chain)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
