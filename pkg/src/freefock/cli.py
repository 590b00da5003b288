"""Command-line front end: JSON in, JSON out, scriptable exit codes.

Exit codes: 0 ok/feasible, 1 infeasible, 2 no convergence, 3 input
error, 4 numerical-scope error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import caratheodory as cara
from . import jsonio
from . import pluriharmonic as ph
from . import selftest
from . import series as fs
from .errors import InfeasibleError, InputError, NoConvergenceError, ScopeError
from .fock import get_trunc, poisson_transform_block
from .words import GradedBasis, word_to_string

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_INPUT = 3
EXIT_SCOPE = 4


def _emit(payload, args):
    payload["version"] = __version__
    if getattr(args, "seed", None) is not None:
        payload["seed"] = args.seed
    if getattr(args, "tol", None) is not None:
        payload.setdefault("tolerances", {})["tol"] = args.tol
    out = getattr(args, "output", None)
    if out:
        jsonio.write_json_atomic(payload, out)
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")


def cmd_basis(args):
    basis = GradedBasis(args.n, args.deg)
    _emit(
        {"n": args.n, "deg": args.deg, "size": basis.size,
         "words": [word_to_string(w) for w in basis.words]},
        args,
    )
    return EXIT_OK


def cmd_check(args):
    prob = jsonio.json_to_problem(jsonio.load_json(args.problem))
    rep = cara.check_feasibility(prob, tol=args.tol)
    _emit(
        {"feasible": rep.feasible, "min_eig": rep.min_eig,
         "matrix_dim": rep.matrix_dim, "tol": rep.tol},
        args,
    )
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_extend(args):
    prob = jsonio.json_to_problem(jsonio.load_json(args.problem))
    try:
        ext = cara.extend(prob, args.target_degree, tol=args.tol, max_iter=args.max_iter)
    except NoConvergenceError as exc:
        _emit(
            {"converged": False, "residual": exc.residual, "iterations": exc.iterations},
            args,
        )
        return EXIT_NO_CONVERGENCE
    rep = cara.verify_solution(prob, ext, samples=args.samples, seed=args.seed)
    payload = jsonio.extension_to_json(ext)
    payload["verification"] = {
        "passed": rep.passed,
        "checks": {k: {"ok": ok, "value": v} for k, (ok, v) in rep.checks.items()},
    }
    _emit(payload, args)
    return EXIT_OK if rep.passed else EXIT_SCOPE


def cmd_cayley(args):
    f = jsonio.json_to_series(jsonio.load_json(args.series))
    if args.cutoff is not None:
        f = fs.FreeSeries(f.n, args.cutoff, f.shape, f.coeffs)
    out = fs.cayley_forward(f) if args.direction == "forward" else fs.cayley_inverse(f)
    _emit({"direction": args.direction, "series": jsonio.series_to_json(out)}, args)
    return EXIT_OK


def cmd_eval(args):
    f = jsonio.json_to_series(jsonio.load_json(args.series))
    x = jsonio.json_to_tuple(jsonio.load_json(args.tuple))
    rep = fs.eval_report(f, x)
    _emit(
        {"value": jsonio.matrix_to_json(rep.value), "exact": rep.exact,
         "tail_bound": rep.tail_bound,
         "jsr": {"kmax": rep.jsr.kmax, "value": rep.jsr.value,
                 "nilpotent_order": rep.jsr.nilpotent_order}},
        args,
    )
    return EXIT_OK


def cmd_norm(args):
    f = jsonio.json_to_series(jsonio.load_json(args.series))
    value = fs.hinf_norm_lower(f, args.trunc)
    _emit({"norm_lower_bound": value, "trunc": args.trunc}, args)
    return EXIT_OK


def cmd_poisson(args):
    h = jsonio.json_to_pluriharmonic(jsonio.load_json(args.symbol))
    x = jsonio.json_to_tuple(jsonio.load_json(args.tuple))
    r = args.radius
    if x.row_norm >= r:
        raise ScopeError(f"tuple norm {x.row_norm:.4f} must lie below radius {r}")
    ft = get_trunc(h.n, args.trunc)
    value = poisson_transform_block(ft, ph.radial_boundary(h, r, args.trunc), x.scale(1.0 / r), h.p)
    _emit(
        {"value": jsonio.matrix_to_json(value), "trunc": args.trunc, "radius": r},
        args,
    )
    return EXIT_OK


def cmd_selftest(args):
    if args.list:
        for name, _ in selftest.SUITES:
            print(name)
        return EXIT_OK
    ok = selftest.run_all(seed=args.seed)
    return EXIT_OK if ok else EXIT_SCOPE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freefock",
        description="Free-semigroup operator models on truncated Fock spaces: "
        "Caratheodory interpolation, Cayley transforms, and noncommutative "
        "Poisson transforms.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="print the graded word basis")
    p.add_argument("n", type=int)
    p.add_argument("deg", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_basis)

    p = sub.add_parser("check", help="Caratheodory feasibility of a problem file")
    p.add_argument("problem")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("extend", help="solve for a PSD multi-Toeplitz extension")
    p.add_argument("problem")
    p.add_argument("--target-degree", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_extend)

    p = sub.add_parser("cayley", help="Cayley transform of a series file")
    p.add_argument("direction", choices=["forward", "inverse"])
    p.add_argument("series")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_cayley)

    p = sub.add_parser("eval", help="evaluate a series at an operator tuple")
    p.add_argument("series")
    p.add_argument("tuple")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("norm", help="certified lower bound for the sup norm")
    p.add_argument("series")
    p.add_argument("--trunc", type=int, default=4)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("poisson", help="Poisson transform of a pluriharmonic symbol")
    p.add_argument("symbol")
    p.add_argument("tuple")
    p.add_argument("--trunc", type=int, default=6)
    p.add_argument("--radius", type=float, default=0.9)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_poisson)

    p = sub.add_parser("selftest", help="run the acceptance suites")
    p.add_argument("--seed", type=int, default=20240901)
    p.add_argument("--list", action="store_true")
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; map onto the input-error contract
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ScopeError as exc:
        print(f"numerical scope error: {exc}", file=sys.stderr)
        return EXIT_SCOPE


if __name__ == "__main__":
    sys.exit(main())
