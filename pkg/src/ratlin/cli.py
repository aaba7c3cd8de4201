"""Command-line front end.

Commands: linearize, eigs, infinity, nullspace, scalar, check.  Exit codes:
0 success, 1 mathematical precondition failure, 2 I/O or parse failure.
Numeric output is serialized with 17 significant digits and is byte-stable
for a fixed seed and input.
"""

import argparse
import json
import sys

import numpy as np

from . import verify
from .config import DEFAULT_SEED, Tolerances, seed_from_env
from .errors import RatlinError
from .eigsolve import classify, invariant_orders_at_infinity
from .linbuild import Realization, build
from .recover import recover_left_minimal_basis, recover_right_minimal_basis
from .scalareq import ScalarEquation, solve_scalar


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RatlinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratlin",
        description="Linearize rational matrices given as D + C A^-1 B, solve "
                    "the associated eigenvalue problem, and recover spectral "
                    "and singular structure from the pencil.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="realization JSON file")
            p.add_argument("--preset", choices=sorted(verify.PRESETS),
                           help="use a named built-in realization")
        p.add_argument("--seed", type=lambda s: int(s, 0),
                       default=seed_from_env(DEFAULT_SEED))
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--tol-rank", type=float, default=None)
        p.add_argument("--tol-match", type=float, default=None)
        p.add_argument("--tol-residual", type=float, default=None)

    p = sub.add_parser("linearize", help="emit the structured pencil")
    common(p)
    p.add_argument("--grade-a", type=int, default=None,
                   help="upward override of the state-side grade")
    p.add_argument("--grade-d", type=int, default=None,
                   help="upward override of the polynomial-side grade")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("eigs", help="pole/zero classification")
    common(p)
    p.set_defaults(func=_cmd_eigs)

    p = sub.add_parser("infinity", help="invariant orders at infinity")
    common(p)
    p.set_defaults(func=_cmd_infinity)

    p = sub.add_parser("nullspace", help="minimal basis of a singular input")
    common(p)
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.set_defaults(func=_cmd_nullspace)

    p = sub.add_parser("scalar", help="solve c/a = d/b")
    common(p, needs_input=False)
    p.add_argument("--a", required=True, help="monomial coefficients, ascending")
    p.add_argument("--c", required=True, help="monomial coefficients, ascending")
    p.add_argument("--b", required=True, help="Chebyshev coefficients, ascending")
    p.add_argument("--d", required=True, help="Chebyshev coefficients, ascending")
    p.set_defaults(func=_cmd_scalar)

    p = sub.add_parser("check", help="run the verification battery")
    common(p)
    p.set_defaults(func=_cmd_check)
    return parser


def _tolerances(args) -> Tolerances:
    base = Tolerances.from_env()
    return Tolerances(
        rank_scale=args.tol_rank if args.tol_rank is not None else base.rank_scale,
        match=args.tol_match if args.tol_match is not None else base.match,
        residual=args.tol_residual if args.tol_residual is not None else base.residual)


def _load_realization(args) -> Realization:
    if getattr(args, "preset", None):
        return verify.PRESETS[args.preset]()
    if not getattr(args, "input", None):
        raise ValueError("provide --input FILE or --preset NAME")
    with open(args.input) as fh:
        return Realization.from_dict(json.load(fh))


def format_number(x: float) -> float:
    """Round-trip through 17 significant digits."""
    return float(f"{x:.17g}")


def _clean(obj):
    if isinstance(obj, float):
        return format_number(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return format_number(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(payload: dict, as_json: bool, table: str | None = None):
    if as_json or table is None:
        json.dump(_clean(payload), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(table + "\n")


def _cmd_linearize(args) -> int:
    r = _load_realization(args)
    sl = build(r, grade_a=args.grade_a, grade_d=args.grade_d, rng=args.seed)
    payload = sl.to_dict()
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(_clean(payload), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.output} "
              f"(pencil {sl.shape[0]}x{sl.shape[1]}, rhoA={sl.rho_a}, rhoD={sl.rho_d})")
    else:
        _emit(payload, True)
    return 0


def _cmd_eigs(args) -> int:
    r = _load_realization(args)
    tol = _tolerances(args)
    sl = build(r, rng=args.seed)
    rep = classify(sl, rng=args.seed, tol=tol)
    if args.json:
        _emit(rep.to_dict(), True)
        return 0
    lines = ["poles (value, count):"]
    for v, c in rep.poles:
        lines.append(f"  {v.real:+.17g}{v.imag:+.17g}j  x{c}")
    lines.append("zeros (value, classified, near pole):")
    for z in rep.zeros:
        lines.append(f"  {z.value.real:+.17g}{z.value.imag:+.17g}j  "
                     f"{'yes' if z.classified else 'NO'}  "
                     f"{'yes' if z.near_pole else 'no'}")
    _emit({}, False, "\n".join(lines))
    return 0


def _cmd_infinity(args) -> int:
    r = _load_realization(args)
    tol = _tolerances(args)
    sl = build(r, rng=args.seed)
    orders = invariant_orders_at_infinity(sl, rng=args.seed, tol=tol)
    payload = {"infinityOrders": orders, "grade": sl.rho_d + 1}
    _emit(payload, args.json, f"invariant orders at infinity: {orders} "
                              f"(grade {sl.rho_d + 1})")
    return 0


def _cmd_nullspace(args) -> int:
    r = _load_realization(args)
    tol = _tolerances(args)
    sl = build(r, rng=args.seed)
    fn = (recover_right_minimal_basis if args.side == "right"
          else recover_left_minimal_basis)
    rec = fn(sl, rng=args.seed, tol=tol)
    if args.json:
        _emit(rec.to_dict(), True)
        return 0
    _emit({}, False,
          f"{args.side} minimal indices: {rec.basis_r.indices} "
          f"(pencil: {rec.basis_l.indices}, shift {rec.shift}); "
          f"verified: {rec.diagnostics['ok']}")
    return 0


def _cmd_scalar(args) -> int:
    eq = ScalarEquation.from_lists(
        _parse_coeffs(args.a), _parse_coeffs(args.c),
        _parse_coeffs(args.b), _parse_coeffs(args.d))
    tol = _tolerances(args)
    rep = solve_scalar(eq, rng=args.seed, tol=tol)
    if args.json:
        _emit(rep.to_dict(), True)
        return 0
    lines = [f"{len(rep.roots)} roots:"]
    for v, res in sorted(rep.roots, key=lambda t: (t[0].real, t[0].imag)):
        lines.append(f"  {v.real:+.17g}{v.imag:+.17g}j  residual {res:.3e}")
    if rep.excluded:
        lines.append(f"excluded as poles: {len(rep.excluded)}")
    _emit({}, False, "\n".join(lines))
    return 0


def _cmd_check(args) -> int:
    r = _load_realization(args)
    tol = _tolerances(args)
    rep = verify.run_all(r, seed=args.seed, tol=tol)
    if args.json:
        _emit(rep.to_dict(), True)
    else:
        _emit({}, False, rep.table())
    return 0 if rep.passed else 1


def _parse_coeffs(text: str) -> list:
    """Comma-separated complex coefficients; entries like 1.5, 2+3i, -0.5i."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j")
        if not tok:
            continue
        out.append(complex(tok))
    if not out:
        raise ValueError("empty coefficient list")
    return out


if __name__ == "__main__":
    sys.exit(main())
