"""Command line front end: ``fds3 <command> [options]``.

All structured output is JSON with a ``schema_version`` field; per-orbit and
per-n tables can additionally be written as CSV.  Reports contain no
timestamps unless ``--timestamp`` is given, so identical runs are byte for
byte identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone

from .catmap import count_table
from .functions import INF, ExpressionError, parse_function
from .lattice import complex_to_json
from .models import MODEL_NAMES, canonical_form_check, make_model, period_group
from .parallel import ENV_VAR
from .symbols import (
    boundary_data,
    compare_mod_lattice,
    local_symbol_direct,
    local_symbol_flag,
    orbit_representatives,
    reciprocity_sum,
)
from .verify import SUITES, run_suites

SCHEMA_VERSION = "1"

EXAMPLES = [
    ("symbol at one orbit", "fds3 symbol --model product --f z --g z-2 --orbit 0 --eps 0.1"),
    ("both evaluations side by side", "fds3 symbol --model product --f z --g z-2 --orbit 0 --method both"),
    ("reciprocity on the product model", "fds3 reciprocity --model product --f 'z^2-1' --g z-3"),
    ("reciprocity on a rotation model", "fds3 reciprocity --model rotation --k 3 --f 'z^3' --g 'z^3-1' --csv orbits.csv"),
    ("cat map periodic point counts", "fds3 orbits --model catmap --n 4"),
    ("model summary", "fds3 model-info --model t3_type3 --rho 1.4142135623730951"),
    ("full verification", "fds3 verify --suite all"),
]


class ConfigError(ValueError):
    pass


def _range(kind, lo, hi, name):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a {kind.__name__}, got {text!r}")
        if not lo <= value <= hi:
            raise argparse.ArgumentTypeError(f"{name} must lie in [{lo}, {hi}], got {value}")
        return value
    return parse


def _positive_float(name, hi=float("inf")):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not 0 < value <= hi:
            raise argparse.ArgumentTypeError(f"{name} must lie in (0, {hi}], got {value}")
        return value
    return parse


def parse_point(text: str):
    """Fiber point: ``inf`` or a complex literal such as ``2``, ``-1+2i``."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        return complex(t.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read fiber point {text!r}; use a complex literal or inf")


def _add_model(p, catmap: bool = False):
    choices = list(MODEL_NAMES) + (["catmap"] if catmap else [])
    p.add_argument("--model", "--name", dest="model", required=True, choices=choices)
    p.add_argument("--k", type=_range(int, 2, 64, "--k"), default=3, help="rotation order of the rotation model")
    p.add_argument("--rho", type=_positive_float("--rho"), default=2**0.5, help="irrational parameter of t3_type3")
    p.add_argument("--rho-m", type=_positive_float("--rho-m"), default=2**0.5, help="meridian rotation of t3_linear")
    p.add_argument("--rho-l", type=_positive_float("--rho-l"), default=3**0.5, help="longitude rotation of t3_linear")


def _add_numeric(p):
    p.add_argument("--eps", type=_positive_float("--eps", 1.0), default=0.1, help="tube radius")
    p.add_argument("--r", "--mesh-refine", dest="r", type=_range(int, 1, 8, "--r"), default=1, help="mesh refinement")
    p.add_argument("--order", "--quad-order", dest="order", type=_range(int, 2, 64, "--order"), default=16, help="quadrature order")
    p.add_argument("--tolerance", type=_positive_float("--tolerance", 1.0), default=None)
    p.add_argument("--bound", type=_range(int, 1, 10**7, "--bound"), default=10_000,
                   help="coefficient bound for dense lattice reduction")


def _add_output(p):
    p.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    p.add_argument("--timestamp", action="store_true", help="include a generated_at field")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fds3",
        description="Deligne cohomology local symbols and reciprocity on three-dimensional foliated dynamical systems.",
        epilog=f"Set {ENV_VAR} to run per-orbit computations on several threads.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("examples", help="list example invocations")
    _add_output(p)

    p = sub.add_parser("model-info", help="describe a model and check its canonical form")
    _add_model(p)
    p.add_argument("--samples", type=_range(int, 1, 10**6, "--samples"), default=10_000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("orbits", help="closed orbits of a model or cat map periodic point counts")
    _add_model(p, catmap=True)
    p.add_argument("--n", type=_range(int, 1, 12, "--n"), default=4, help="largest period for catmap counts")
    p.add_argument("--matrix", default="3,1,2,1", help="cat map entries a,b,c,d")
    p.add_argument("--f", help="list the orbits meeting div f (fibred models)")
    p.add_argument("--g", help="list the orbits meeting div g (fibred models)")
    p.add_argument("--csv", help="write the table as CSV")
    _add_output(p)

    p = sub.add_parser("symbol", help="local symbol along one closed orbit")
    _add_model(p)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--orbit", required=True, type=parse_point, help="fiber point of the orbit, e.g. 0, 2-1i, inf")
    _add_numeric(p)
    p.add_argument("--method", choices=["flag", "direct", "both"], default="flag")
    p.add_argument("--index-map", choices=["default", "alternate"], default="default")
    p.add_argument("--branch", choices=["structural", "continued"], default="structural")
    p.add_argument("--basepoint", type=parse_point, default=None, help="global basepoint of the branch plan")
    p.add_argument("--paper-literal", action="store_true",
                   help="divide the direct formula's integrals by 2*pi*i (unnormalized omega)")
    _add_output(p)

    p = sub.add_parser("reciprocity", help="sum of local symbols over all orbits meeting the divisors")
    _add_model(p)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    _add_numeric(p)
    p.add_argument("--method", choices=["flag", "direct"], default="flag")
    p.add_argument("--index-map", choices=["default", "alternate"], default="default")
    p.add_argument("--basepoint", type=parse_point, default=None)
    p.add_argument("--csv", help="write the per-orbit table as CSV")
    _add_output(p)

    p = sub.add_parser("verify", help="run verification suites; exit 1 on any failure")
    p.add_argument("--suite", action="append", choices=["all", *SUITES], default=None,
                   help="suite to run (repeatable); default all")
    _add_output(p)
    return parser


def _model(args):
    return make_model(args.model, k=args.k, rho=args.rho, rho_m=args.rho_m, rho_l=args.rho_l)


def _function(text: str, name: str):
    try:
        return parse_function(text)
    except ExpressionError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc


def _write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        open(path, "w").close()
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _flat(v) for k, v in row.items()})


def _flat(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return repr(complex(v["re"], v["im"]))
    return v


def cmd_examples(args) -> tuple[dict, int]:
    return {"examples": [{"description": d, "command": c} for d, c in EXAMPLES],
            "models": list(MODEL_NAMES) + ["catmap"]}, 0


def cmd_model_info(args) -> tuple[dict, int]:
    model = _model(args)
    rep = canonical_form_check(model, args.samples, args.seed)
    periods = period_group(model)
    return {"model": model.info(), "canonical_form": rep.to_dict(), "periods": periods.to_dict()}, 0 if rep.passed else 1


def cmd_orbits(args) -> tuple[dict, int]:
    if args.model == "catmap":
        try:
            a, b, c, d = (int(x) for x in args.matrix.split(","))
        except ValueError:
            raise ConfigError(f"--matrix needs four integers a,b,c,d, got {args.matrix!r}")
        table = count_table(((a, b), (c, d)), args.n)
        if args.csv:
            _write_csv(args.csv, table)
        return {"matrix": [[a, b], [c, d]], "counts": table}, 0 if all(r["match"] for r in table) else 1
    model = _model(args)
    out = {"model": model.name, "closed_orbits": [o.to_dict() for o in model.closed_orbits]}
    if args.f or args.g:
        if not model.fibred:
            raise ConfigError(f"model {model.name} has no meromorphic function library")
        f = _function(args.f or "1", "f")
        g = _function(args.g or "1", "g")
        rows = []
        for p in orbit_representatives(model, f, g):
            tube = model.orbit_tube(p)
            rows.append({"orbit": INF if tube.at_infinity else complex_to_json(p), "period": tube.period,
                         "twist": str(tube.tau), "ord_f": f.order(p), "ord_g": g.order(p)})
        out["divisor_orbits"] = rows
        if args.csv:
            _write_csv(args.csv, rows)
    return out, 0


def cmd_symbol(args) -> tuple[dict, int]:
    model = _model(args)
    f, g = _function(args.f, "f"), _function(args.g, "g")
    data = boundary_data(model, f, g, args.orbit, args.eps, branch=args.branch,
                         log_base=None if args.basepoint is None or args.basepoint == INF else args.basepoint)
    tol = args.tolerance or 1e-8
    out = {"model": model.name, "f": str(f), "g": str(g), "tube": data.label, "seams": data.seam_table()}
    status = 0
    if args.method in ("flag", "both"):
        res = local_symbol_flag(data, args.r, args.order, args.index_map, tol)
        out["flag"] = res.to_dict()
    if args.method in ("direct", "both"):
        res2 = local_symbol_direct(data, args.order, args.r, args.paper_literal, tol)
        out["direct"] = res2.to_dict()
    if args.method == "both":
        diff = compare_mod_lattice(out["flag"]["raw"]["re"] + 1j * out["flag"]["raw"]["im"],
                                   res2.raw, data.lattice, tol)
        out["agreement"] = diff.to_dict()
        status = 0 if diff.passed else 1
    main = out.get("flag") or out["direct"]
    out.update({k: main[k] for k in ("raw", "reduced", "coefficients", "residual", "verdict")})
    return out, status


def cmd_reciprocity(args) -> tuple[dict, int]:
    model = _model(args)
    f, g = _function(args.f, "f"), _function(args.g, "g")
    tol = args.tolerance or 1e-6
    base = None if args.basepoint is None or args.basepoint == INF else args.basepoint
    res = reciprocity_sum(model, f, g, args.eps, args.r, args.order, args.method, base, tolerance=tol,
                          index_map=args.index_map)
    if args.csv:
        _write_csv(args.csv, res.table)
    out = {"model": model.name, "f": str(f), "g": str(g), **res.to_dict()}
    return out, 0 if res.verdict == "pass" else 1


def cmd_verify(args) -> tuple[dict, int]:
    names = args.suite or ["all"]
    if "all" in names:
        names = list(SUITES)
    checks = run_suites(names)
    failed = [c.name for c in checks if not c.passed]
    out = {
        "suites": names,
        "checks": [c.to_dict() for c in checks],
        "summary": {"total": len(checks), "failed": len(failed), "failures": failed},
        "verdict": "pass" if not failed else "fail",
    }
    return out, 0 if not failed else 1


COMMANDS = {
    "examples": cmd_examples,
    "model-info": cmd_model_info,
    "orbits": cmd_orbits,
    "symbol": cmd_symbol,
    "reciprocity": cmd_reciprocity,
    "verify": cmd_verify,
}


def render(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        body, status = COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"fds3 {args.command}: error: {exc}", file=sys.stderr)
        return 2
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, **body}
    if getattr(args, "timestamp", False):
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    text = render(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
