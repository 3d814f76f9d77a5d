"""Command-line interface: ``combspecies check|count|eval|version``.

Exit codes: 0 on success, 1 on domain errors (ill-founded system,
non-convergence, ...), 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from . import __version__
from .analysis import is_well_founded
from .errors import CombSpeciesError, DomainError, UsageError
from .evaluate import EGF, OGF, is_virtual
from .integral import check_integral_wf, solve_integral
from .numeric import egf_value, ogf_value
from .parser import SystemSpec, parse_system
from .series import BACKENDS, fmt_coeff, multiplication_backend
from .solver import joyal_solve, labeled_counts, newton_solve


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="specification file")
    p.add_argument("--spec", help="inline specification text instead of a file")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="combspecies", description="Enumerate and evaluate combinatorial species systems.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check", help="decide well-foundedness")
    _add_input(p)

    p = sub.add_parser("count", help="coefficients of the generating series")
    _add_input(p)
    p.add_argument("--kind", choices=(EGF, OGF), default=None, help="series kind (default: ogf, egf for linear mode)")
    p.add_argument("--terms", type=int, default=10, help="number of coefficients, z^0 included")
    p.add_argument("--labeled-counts", action="store_true", help="print n! [z^n] of the EGF")
    p.add_argument("--method", choices=("newton", "plain", "joyal"), default="newton")
    p.add_argument("--backend", choices=BACKENDS, default="auto", help="polynomial multiplication backend")

    p = sub.add_parser("eval", help="numeric values of the generating series")
    _add_input(p)
    p.add_argument("--kind", choices=(EGF, OGF), default=EGF)
    p.add_argument("--point", type=float, action="append", required=True, help="evaluation point (repeatable)")
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--powers", type=int, default=3, help="number K of powers kept as Newton unknowns (ogf)")
    p.add_argument("--radius", type=float, default=None, help="radius hint for the dominant system (ogf)")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--jobs", type=int, default=1, help="evaluate points in parallel")

    sub.add_parser("version", help="print the version")
    return parser


def _load(args) -> SystemSpec:
    if (args.file is None) == (args.spec is None):
        raise UsageError("give exactly one of a specification file or --spec")
    if args.spec is not None:
        return parse_system(args.spec)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    return parse_system(text)


def _emit(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# -- subcommands -------------------------------------------------------------


def _check(args) -> tuple[int, str]:
    sys_ = _load(args)
    rep = check_integral_wf(sys_) if sys_.mode == "linear" else is_well_founded(sys_)
    code = 0 if rep.verdict else 1
    if args.json:
        return code, _emit(rep.to_json())
    if rep.verdict:
        const = ", ".join(str(c) for c in rep.constant_term)
        return code, f"well-founded: yes; S(0) = ({const})"
    return code, f"well-founded: no; reason: {rep.reason} ({rep.detail})"


def _count(args) -> tuple[int, str]:
    sys_ = _load(args)
    linear = sys_.mode == "linear"
    kind = args.kind or (EGF if linear else OGF)
    if args.terms < 0:
        raise UsageError("--terms must be nonnegative")
    if linear and kind != EGF:
        raise UsageError("integral systems only have exponential generating series")
    if args.labeled_counts and kind != EGF:
        raise UsageError("--labeled-counts needs --kind egf")
    with multiplication_backend(args.backend):
        if linear:
            series = solve_integral(sys_, args.terms)
        elif args.method == "joyal":
            series = joyal_solve(sys_, kind, args.terms)
        else:
            series = newton_solve(sys_, kind, args.terms, plain=args.method == "plain")
    counts = [labeled_counts(s) for s in series] if kind == EGF else None
    if args.json:
        obj = {
            "kind": kind,
            "terms": args.terms,
            "series": {n: [fmt_coeff(c) for c in s.coeffs] for n, s in zip(sys_.names, series)},
            "labeled_counts": (
                {n: [fmt_coeff(c) for c in c_] for n, c_ in zip(sys_.names, counts)} if counts is not None else None
            ),
            "virtual": is_virtual(series),
        }
        return 0, _emit(obj)
    rows = counts if args.labeled_counts else [s.coeffs for s in series]
    lines = [f"{n}: " + ", ".join(fmt_coeff(c) for c in row) for n, row in zip(sys_.names, rows)]
    if is_virtual(series):
        lines.append("note: negative coefficients (virtual species)")
    return 0, "\n".join(lines)


def _eval_one(sys_: SystemSpec, args, alpha: float) -> dict:
    if alpha < 0:
        raise UsageError("evaluation points must be nonnegative")
    if args.kind == EGF:
        r = egf_value(sys_, alpha, args.eps, args.max_iter)
        return {
            "point": alpha,
            "values": {n: float(v) for n, v in zip(sys_.names, r.values)},
            "values_at_powers": None,
            "iterations": r.iterations,
            "tail_length": None,
            "truncation_order": None,
        }
    vals, st = ogf_value(sys_, alpha, args.eps, args.powers, args.max_iter, rho=args.radius)
    return {
        "point": alpha,
        "values": {n: float(v) for n, v in zip(sys_.names, vals)},
        "values_at_powers": [[float(x) for x in row] for row in st.values_at_powers],
        "iterations": st.iterations,
        "tail_length": st.L,
        "truncation_order": st.truncation_order,
    }


def _eval(args) -> tuple[int, str]:
    sys_ = _load(args)
    if sys_.mode == "linear":
        raise UsageError("numeric evaluation of integral systems is not supported")
    if args.eps <= 0 or args.powers < 1 or args.jobs < 1:
        raise UsageError("need --eps > 0, --powers >= 1 and --jobs >= 1")
    points = args.point
    if args.jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda a: _eval_one(sys_, args, a), points))
    else:
        results = [_eval_one(sys_, args, a) for a in points]
    if args.json:
        return 0, _emit(results[0] if len(results) == 1 else results)
    lines = []
    for r in results:
        text = ", ".join(format(v, ".15g") for v in r["values"].values())
        lines.append(text if len(results) == 1 else f"{r['point']!r}: {text}")
    return 0, "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, str]:
    """Run the CLI; returns (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand (check, count, eval or version)")
        if args.command == "version":
            return 0, f"combspecies {__version__}", ""
        handler = {"check": _check, "count": _count, "eval": _eval}[args.command]
        code, out = handler(args)
        return code, out, ""
    except UsageError as exc:
        return 2, "", f"error: {type(exc).__name__}: {exc}"
    except DomainError as exc:
        return 1, "", f"error: {type(exc).__name__}: {exc}"
    except CombSpeciesError as exc:  # pragma: no cover - every error is one of the two
        return 1, "", f"error: {exc}"


def main(argv: Optional[List[str]] = None) -> int:
    code, out, err = run(argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
