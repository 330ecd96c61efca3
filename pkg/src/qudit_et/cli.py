"""
Command-line interface.

Every subcommand prints one JSON document on stdout (and to ``--json-out`` if
given).  Floats carry 12 significant digits.  Errors print
``{"error": {"type": ..., "message": ...}}`` on stderr and exit with status 2;
a completed run whose gating checks failed exits with status 1.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .bloch_tensor import product_norm as baseline_norm
from .convex_roof import RoofBudget, et_mixed
from .errors import DomainError
from .files import load_density, load_state
from .measure import et_ghz3_expanded, et_ghz_bruteforce, et_ghz_closed_form, et_pure
from .su_algebra import build_generators, check_generators
from .suites import run_property_suites

SIG_DIGITS = 12


def _round(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"refusing to serialize non-finite value {x}")
    out = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if out == 0 else out


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return _round(obj)


def _difference(value, scale):
    """Round a difference to the absolute resolution of ``scale`` at 12 digits."""
    if scale == 0:
        return value
    decimals = SIG_DIGITS - 1 - math.floor(math.log10(abs(scale)))
    return round(value, decimals)


def cmd_et(args):
    psi = load_state(args.statefile, normalize=args.normalize)
    rep = et_pure(psi, symmetric=args.symmetric_fastpath)
    return {
        "d": psi.d,
        "n": psi.n,
        "tensor_norm": rep.tensor_norm,
        "baseline": rep.baseline,
        "et": _difference(rep.et, rep.baseline),
    }, True


def _ghz_coeffs(args):
    c = np.array([args.alpha, args.beta, args.gamma], dtype=float)
    if args.normalize:
        c = c / np.linalg.norm(c)
    return c


def cmd_ghz(args):
    if args.compare == "eq11" and args.n != 3:
        raise DomainError("the expanded three-qutrit comparison needs n = 3")
    a, b, g = _ghz_coeffs(args)
    value = et_ghz_closed_form(args.n, a, b, g)
    out = {"n": args.n, "alpha": a, "beta": b, "gamma": g,
           "closed_form": _difference(value, 3 ** (args.n / 2))}
    if args.compare is not None:
        brute = et_ghz_bruteforce(args.n, a, b, g)
        out["bruteforce"] = brute
        out["delta_closed_form"] = value - brute
        if args.compare == "eq11":
            expanded = et_ghz3_expanded(a, b, g)
            out["expanded_n3"] = expanded
            out["delta_expanded_n3"] = expanded - brute
        literal = et_ghz_closed_form(args.n, a, b, g, literal_limits=True)
        out["closed_form_literal_limits"] = literal
        out["delta_closed_form_literal_limits"] = literal - brute
    return out, True


def cmd_properties(args):
    report = run_property_suites(seed=args.seed, trials=args.trials, d=args.d, n=args.n,
                                 general_kraus=args.general_kraus)
    return report, report["passed"]


def cmd_roof(args):
    rho = load_density(args.densityfile)
    budget = RoofBudget(restarts=args.restarts, iterations=args.iterations,
                        max_length=args.max_length, seed=args.seed)
    res = et_mixed(rho, budget)
    out = {"d": rho.d, "m": rho.m, "seed": args.seed, "restarts": args.restarts}
    out.update(res.to_dict())
    scale = baseline_norm(rho.d, rho.m)
    out["value"] = _difference(res.value, scale)
    out["eigendecomposition_value"] = _difference(res.eigen_value, scale)
    return out, True


def cmd_gen_check(args):
    report = check_generators(build_generators(args.d))
    return report, report["ok"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qudit-et",
        description="Correlation-tensor entanglement measure for N-qudit states.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json-out", metavar="PATH", help="also write the report here")

    p = sub.add_parser("et", help="measure of a pure state file")
    p.add_argument("statefile")
    p.add_argument("--normalize", action="store_true", help="rescale amplitudes to unit norm")
    p.add_argument("--symmetric-fastpath", action="store_true",
                   help="use the permutation-symmetric shortcut (state must be symmetric)")
    common(p)
    p.set_defaults(func=cmd_et)

    s3 = 1 / math.sqrt(3)
    p = sub.add_parser("ghz", help="closed form for a|1..1> + b|2..2> + c|3..3> on n qutrits")
    p.add_argument("-n", "--n", type=int, default=3)
    p.add_argument("--alpha", type=float, default=s3)
    p.add_argument("--beta", type=float, default=s3)
    p.add_argument("--gamma", type=float, default=s3)
    p.add_argument("--normalize", action="store_true", help="rescale the coefficients")
    p.add_argument("--compare", choices=["eq11", "bruteforce"],
                   help="also evaluate brute force (and the n=3 expanded form for eq11)")
    common(p)
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("properties", help="randomized property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--general-kraus", action="store_true",
                   help="non-normal Kraus operators; monotonicity becomes exploratory")
    common(p)
    p.set_defaults(func=cmd_properties)

    p = sub.add_parser("roof", help="convex-roof upper bound for a density file")
    p.add_argument("densityfile")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_roof)

    p = sub.add_parser("gen-check", help="check the SU(d) generator invariants")
    p.add_argument("--d", type=int, default=3)
    common(p)
    p.set_defaults(func=cmd_gen_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr)
    try:
        report, ok = args.func(args)
        text = json.dumps(_clean(report), indent=2, allow_nan=False)
    except (DomainError, OSError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err), file=sys.stderr)
        return 2
    print(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
