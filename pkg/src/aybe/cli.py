"""Command-line front end: ``aybe {eval,build,verify,table}``.

Exit status: 0 success, 1 residual failure (``verify`` or ``build --oracle``),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .builder import r_general
from .bspec import BSpec, BSpecError, complex_to_json
from .kronecker import Elliptic, Rational, SingularInput, Trigonometric, sigma_jet
from .nabla import nabla_kl, render_table
from .numeric import SingularSystem, jet_lift, plain_derivative_from_jet
from .solspace import r_from_solspace
from .theta import SeriesTruncationError, TorusParam, theta1, theta3
from .verifier import Config, SamplePlan, default_configs, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
ORACLE_TOL = 1e-9


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"0.3+1.7i"``, ``"2i"``, ``"i"``, ``"-0.5"`` and the like."""
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from None


def parse_tau(text: str) -> complex:
    tau = parse_complex(text)
    if not tau.imag > 0:
        raise argparse.ArgumentTypeError(f"tau must have positive imaginary part, got {text!r}")
    return tau


def _num(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or np.isnan(z.imag) else "-"
    return f"{z.real:.17g}{sign}{abs(z.imag):.17g}i"


_GLOBAL_DEFAULTS = {"tau": 1j, "trunc_eps": 1e-16, "seed": 0, "format": None, "out": None}


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda key: argparse.SUPPRESS) if suppress else (lambda key: _GLOBAL_DEFAULTS[key])
    p.add_argument("--tau", type=parse_tau, default=d("tau"), help="modular parameter, e.g. i, 2i, 0.3+1.7i")
    p.add_argument("--trunc-eps", type=float, default=d("trunc_eps"), help="theta series truncation threshold")
    p.add_argument("--seed", type=int, default=d("seed"))
    p.add_argument("--format", choices=("json", "csv", "text", "latex"), default=d("format"))
    p.add_argument("--out", type=Path, default=d("out"), help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aybe", description=__doc__.splitlines()[0], parents=[_global_options(False)])
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_options(True)]

    ev = sub.add_parser("eval", parents=common, help="evaluate theta1, theta3 or the Kronecker function")
    ev.add_argument("function", choices=("theta1", "theta3", "sigma"))
    ev.add_argument("--z", type=parse_complex, help="argument of theta1/theta3")
    ev.add_argument("--u", type=parse_complex, help="first argument of sigma")
    ev.add_argument("--x", type=parse_complex, help="second argument of sigma")
    ev.add_argument("--kind", choices=("elliptic", "trigonometric", "rational"), default="elliptic")
    ev.add_argument("--order", type=int, default=None, help="also print derivatives up to this order")

    bd = sub.add_parser("build", parents=common, help="build r_B(v, y) from a BSpec JSON file")
    bd.add_argument("bspec", type=Path)
    bd.add_argument("--v", type=parse_complex, required=True)
    bd.add_argument("--y", type=parse_complex, required=True)
    bd.add_argument("--oracle", action="store_true", help="also build from the Sol space and report the difference")

    vf = sub.add_parser("verify", parents=common, help="run the residual suite")
    vf.add_argument("configs", type=Path, nargs="?", help="JSON list of configurations (default suite if omitted)")
    vf.add_argument("--count", type=int, default=50)
    vf.add_argument("--exclusion-radius", type=float, default=1e-2)
    vf.add_argument("--tolerance", type=float, default=None, help="override the tolerance ladder")

    tb = sub.add_parser("table", parents=common, help="print the exact nabla_{k,l} table")
    tb.add_argument("n", type=int)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _tp(args) -> TorusParam:
    return TorusParam(args.tau, trunc_eps=args.trunc_eps)


def cmd_eval(args) -> int:
    fmt = args.format or "text"
    order = 0 if args.order is None else args.order
    if order < 0:
        raise UsageError("--order must be non-negative")
    if args.function in ("theta1", "theta3"):
        if args.z is None:
            raise UsageError(f"{args.function} needs --z")
        tp = _tp(args)
        jet = (theta1 if args.function == "theta1" else theta3)(jet_lift(args.z, order), tp)
        inputs = {"z": args.z, "tau": args.tau}
    else:
        if args.u is None or args.x is None:
            raise UsageError("sigma needs --u and --x")
        kind = {"elliptic": lambda: Elliptic(_tp(args)), "trigonometric": Trigonometric, "rational": Rational}[args.kind]()
        jet = sigma_jet(kind, args.u, args.x, order)
        inputs = {"u": args.u, "x": args.x, "kind": args.kind}
        if args.kind == "elliptic":
            inputs["tau"] = args.tau
    derivs = [plain_derivative_from_jet(jet, k) for k in range(order + 1)]
    if fmt == "json":
        obj = {
            "function": args.function,
            "inputs": {k: (complex_to_json(v) if isinstance(v, complex) else v) for k, v in inputs.items()},
            "value": complex_to_json(derivs[0]),
        }
        if args.order is not None:
            obj["derivatives"] = [complex_to_json(d) for d in derivs]
        _emit(json.dumps(obj, indent=2, sort_keys=True), args.out)
    elif fmt == "csv":
        rows = ["order,re,im"] + [f"{k},{d.real:.17g},{d.imag:.17g}" for k, d in enumerate(derivs)]
        _emit("\n".join(rows), args.out)
    else:
        lines = [_num(derivs[0])]
        if args.order is not None:
            lines = [f"d^{k}: {_num(d)}" for k, d in enumerate(derivs)]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def _records_text(records: list[dict]) -> str:
    return "\n".join(f"{r['a']} {r['b']} {r['c']} {r['d']} {r['re']:.17g} {r['im']:.17g}" for r in records)


def _records_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "c", "d", "re", "im"])
    for r in records:
        w.writerow([r["a"], r["b"], r["c"], r["d"], f"{r['re']:.17g}", f"{r['im']:.17g}"])
    return buf.getvalue()


def cmd_build(args) -> int:
    spec = BSpec.load(args.bspec)
    tp = _tp(args)
    t = r_general(spec, args.v, args.y, tp)
    records = t.to_records()
    status = EXIT_OK
    obj = {
        "n": spec.n,
        "tau": complex_to_json(args.tau),
        "v": complex_to_json(args.v),
        "y": complex_to_json(args.y),
        "records": records,
    }
    diff = None
    if args.oracle:
        o = r_from_solspace(spec, args.v, args.y, tp)
        diff = (t - o).max_abs()
        scale = max(t.max_abs(), o.max_abs())
        obj["oracle_records"] = o.to_records()
        obj["max_abs_difference"] = diff
        obj["max_rel_difference"] = diff / scale if scale else diff
        if obj["max_rel_difference"] >= ORACLE_TOL:
            status = EXIT_FAIL
    fmt = args.format or "json"
    if fmt == "json":
        text = json.dumps(obj, indent=2, sort_keys=True)
    elif fmt == "csv":
        text = _records_csv(records)
    elif fmt == "text":
        text = _records_text(records)
        if diff is not None:
            text += f"\noracle max abs difference {diff:.3e} (relative {obj['max_rel_difference']:.3e})"
    else:
        raise UsageError("build supports json, csv and text output")
    _emit(text, args.out)
    if diff is not None and args.out is not None:
        print(f"oracle max relative difference {obj['max_rel_difference']:.3e}", file=sys.stderr)
    return status


def _load_configs(path: Path, args) -> list[Config]:
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(raw, dict):
        raw = raw.get("configs", [raw])
    if not isinstance(raw, list):
        raise UsageError("config file must hold a list of configurations")
    out = []
    for obj in raw:
        if not isinstance(obj, dict):
            raise UsageError(f"bad configuration {obj!r}")
        obj = dict(obj)
        obj.setdefault("tau", complex_to_json(args.tau))
        obj.setdefault("trunc_eps", args.trunc_eps)
        if args.tolerance is not None:
            obj["tolerance"] = args.tolerance
        out.append(Config.from_json(obj))
    return out


def cmd_verify(args) -> int:
    if args.configs is None:
        configs = default_configs(args.tau)
        if args.tolerance is not None:
            for c in configs:
                c.tolerance = args.tolerance
    else:
        configs = _load_configs(args.configs, args)
    plan = SamplePlan(count=args.count, seed=args.seed, exclusion_radius=args.exclusion_radius)
    report = run_suite(plan, configs)
    fmt = args.format or "json"
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        text = report.to_csv()
    elif fmt == "text":
        text = report.to_text()
    else:
        raise UsageError("verify supports json, csv and text output")
    _emit(text, args.out)
    for s in report.failures():
        print(f"FAIL {s['config']} {s['identity']} worst={s['worst']} tol={s['tolerance']}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_table(args) -> int:
    if args.n < 1:
        raise UsageError("n must be >= 1")
    fmt = args.format or "text"
    if fmt == "json":
        n = args.n
        obj = {
            "n": n,
            "entries": [
                {"k": k, "l": l, "coeffs": [str(c) for c in nabla_kl(n, k, l).coeffs], "text": nabla_kl(n, k, l).render("text")}
                for k in range(n)
                for l in range(n)
            ],
        }
        _emit(json.dumps(obj, indent=2, ensure_ascii=False), args.out)
    elif fmt == "csv":
        rows = ["k,l,polynomial"] + [f"{k},{l},{nabla_kl(args.n, k, l).render('ascii')}" for k in range(args.n) for l in range(args.n)]
        _emit("\n".join(rows), args.out)
    else:
        _emit(render_table(args.n, fmt), args.out)
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "build": cmd_build, "verify": cmd_verify, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SingularInput as exc:
        where = f" (near {_num(exc.point)})" if exc.point is not None else ""
        print(f"aybe: singular input{where}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, BSpecError, SingularSystem, SeriesTruncationError, ValueError, OSError) as exc:
        print(f"aybe: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
