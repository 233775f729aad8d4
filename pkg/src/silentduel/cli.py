"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 usage error, 3 numeric failure.
JSON numbers carry 17 significant digits; CSV numbers use the shortest
round-trip form.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .equilibrium import GameParams, firing_pdf, score_cdf, score_pdf, solve_equilibrium
from .errors import DomainError, NumericError
from .sampling import FiringStrategy, firing_cdf
from .tournament import CHUNK_SIZE, simulate, simulate_deviation
from .verifier import DEFAULT_TOLERANCES, best_response_report, run_checks

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FIGURE_POINTS = 400


class UsageError(Exception):
    pass


def _json_number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """json.dumps with floats written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_number(float(obj))
    return json.dumps(obj)


def to_csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_c(text: str) -> float | str:
    """A consolation prize: a decimal, a fraction such as ``1/3``, or ``1/n``."""
    if text.strip().lower() == "1/n":
        return "1/n"
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid consolation prize: {text!r}") from None


def parse_n_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid n list: {text!r}") from None


def _params(n: int, c) -> GameParams:
    return GameParams(n, 1.0 / n if c == "1/n" else c)


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def cmd_solve(args) -> tuple[int, str]:
    eq = solve_equilibrium(_params(args.n, args.c), args.tol)
    doc = {"n": eq.n, "c": eq.c, "p": eq.p, "v": eq.v, "b": eq.b, "residual": eq.residual}
    if args.format == "csv":
        return EXIT_OK, to_csv(list(doc), [list(doc.values())])
    return EXIT_OK, to_json(doc) + "\n"


def density_rows(n: int, c: float, points: int):
    if points < 2:
        raise DomainError("points must be at least 2")
    eq = solve_equilibrium(GameParams(n, c))
    y = np.linspace(0.0, eq.b, points)
    cols = [y, score_cdf(eq, y), score_pdf(eq, y), firing_pdf(eq, y), firing_cdf(FiringStrategy(eq), y)]
    return eq, list(zip(*(col.tolist() for col in cols)))


def cmd_density(args) -> tuple[int, str]:
    _, rows = density_rows(args.n, _params(args.n, args.c).c, args.points)
    header = ["y", "F", "f", "g", "G"]
    if args.format == "json":
        return EXIT_OK, to_json({h: [r[i] for r in rows] for i, h in enumerate(header)}) + "\n"
    return EXIT_OK, to_csv(header, rows)


def figure_rows(case: str, n_list: list[int], points: int = FIGURE_POINTS):
    if not n_list:
        raise DomainError("n list is empty")
    rows = []
    for n in n_list:
        if n < 2:
            raise DomainError("n must be at least 2")
        c = 1.0 / n if case == "constant-sum" else 0.0
        eq = solve_equilibrium(GameParams(n, c))
        x = np.linspace(0.0, eq.b, points)
        rows.extend((case, n, xi, gi) for xi, gi in zip(x.tolist(), firing_pdf(eq, x).tolist()))
    return rows


def cmd_figure(args) -> tuple[int, str]:
    rows = figure_rows(args.case, args.n_list, args.points)
    header = ["case", "n", "x", "g"]
    if args.format == "json":
        return EXIT_OK, to_json({"rows": [dict(zip(header, r)) for r in rows]}) + "\n"
    return EXIT_OK, to_csv(header, rows)


def _check_workers(args):
    if args.workers < 1:
        raise DomainError("workers must be at least 1")
    if args.rounds < 1:
        raise DomainError("rounds must be at least 1")


def cmd_simulate(args) -> tuple[int, str]:
    _check_workers(args)
    strategy = FiringStrategy(solve_equilibrium(_params(args.n, args.c)))
    stats = simulate(strategy, args.rounds, args.seed, workers=args.workers)
    doc = stats.to_dict()
    doc.update(p=strategy.eq.p, v=strategy.eq.v, chunk_size=CHUNK_SIZE)
    return EXIT_OK, to_json(doc) + "\n"


def cmd_deviate(args) -> tuple[int, str]:
    _check_workers(args)
    strategy = FiringStrategy(solve_equilibrium(_params(args.n, args.c)))
    stats = simulate_deviation(strategy, args.y, args.rounds, args.seed, workers=args.workers)
    doc = stats.to_dict()
    doc.update(p=strategy.eq.p, v=strategy.eq.v, chunk_size=CHUNK_SIZE)
    return EXIT_OK, to_json(doc) + "\n"


def cmd_verify(args) -> tuple[int, str]:
    if args.grid < 2:
        raise DomainError("grid must be at least 2")
    if args.tol is not None and not args.tol >= 0:
        raise DomainError("tol must be non-negative")
    eq = solve_equilibrium(_params(args.n, args.c))
    overrides = None if args.tol is None else {k: args.tol for k in DEFAULT_TOLERANCES}
    checks = run_checks(eq, overrides)
    deviation = best_response_report(eq, args.grid)
    dev_tol = 1e-10 if args.tol is None else args.tol
    dev_ok = deviation.max_excess <= dev_tol and deviation.max_gap_on_support <= dev_tol
    ok = checks.passed and dev_ok
    doc = {
        "n": eq.n,
        "c": eq.c,
        "passed": ok,
        "checks": checks.to_dict(),
        "deviation": {**deviation.to_dict(args.include_grid), "tolerance": dev_tol, "passed": dev_ok},
    }
    return (EXIT_OK if ok else EXIT_FAILED), to_json(doc) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="silentduel", description="n-player silent duel equilibrium tools")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def game(p, need_c=True):
        p.add_argument("--n", type=int, required=True, help="number of players (>= 2)")
        if need_c:
            p.add_argument("--c", type=parse_c, required=True,
                           help="consolation prize in [0, 1); accepts fractions and '1/n'")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("solve", help="solve for p, v and b")
    game(p)
    p.add_argument("--tol", type=float, default=1e-12, help="relative root residual")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("density", help="tabulate F, f, g and G on [0, b]")
    game(p)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("figure", help="firing densities for the constant-sum or prize case")
    p.add_argument("--case", choices=["constant-sum", "prize"], required=True)
    p.add_argument("--n-list", type=parse_n_list, default=[2, 4, 6])
    p.add_argument("--points", type=int, default=FIGURE_POINTS)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_figure)

    for name, func, text in (("simulate", cmd_simulate, "Monte Carlo of equilibrium play"),
                             ("deviate", cmd_deviate, "Monte Carlo with player 0 at a fixed distance")):
        p = sub.add_parser(name, help=text)
        game(p)
        if name == "deviate":
            p.add_argument("--y", type=float, required=True, help="deviating firing distance in [0, 1)")
        p.add_argument("--rounds", type=int, default=100_000)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--workers", type=int, default=1, help="threads; does not change the output")
        p.add_argument("--format", choices=["json"], default="json")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run the equilibrium certificates")
    game(p)
    p.add_argument("--grid", type=int, default=10_000, help="deviation grid size")
    p.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    p.add_argument("--include-grid", action="store_true", help="emit the full deviation curve")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        code, text = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"silentduel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"silentduel: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
