"""``obsgames`` command-line entry point.

Every run prints one JSON report on stdout, including failures.
Human-readable diagnostics go to stderr.  Exit codes: 0 for success
(coherent, a value, a listing), 1 for a rejected instance (incoherent or
no equilibrium), 2 for usage, parse and validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import stats
from .bench import parse_config, rows_to_csv, run_sweep
from .coherence import PURE_PATHS, CoherenceWitness, decide_pure_coherence, parse_observable
from .errors import ObsGamesError
from .exact import fmt, parse_rational
from .extension import ExtensionQuery, extension_binary_search, extension_exact
from .formula import parse_formula
from .game import parse_game
from .mixed import MixedProfile, decide_mixed_coherence, enumerate_mixed_equilibria_2p
from .pure import DEFAULT_PROFILE_CAP, enumerate_pure_equilibria
from .sat import encode_game, export_dimacs

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep the JSON-on-stdout contract for bad flags
        raise UsageError(message)


def _profile_cap(args) -> int:
    if args.profile_cap is not None:
        return args.profile_cap
    env = os.environ.get("PCE_PROFILE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"PCE_PROFILE_CAP must be an integer, got {env!r}") from None
    return DEFAULT_PROFILE_CAP


def parse_epsilon(text: str) -> Fraction:
    """``2^-k`` or any rational literal."""
    text = text.strip()
    if text.startswith("2^"):
        try:
            exponent = int(text[2:])
        except ValueError:
            raise UsageError(f"bad epsilon {text!r}") from None
        return Fraction(2) ** exponent
    return parse_rational(text)


def render_equilibrium(e) -> object:
    if isinstance(e, MixedProfile):
        return e.render()
    return list(e)


def render_witness(witness: CoherenceWitness | None):
    if witness is None:
        return None
    return [{"equilibrium": render_equilibrium(e), "probability": fmt(p)} for e, p in witness.items()]


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_enumerate(args) -> tuple[dict, int]:
    game = parse_game(_read(args.game))
    if args.mode == "pure":
        eqs = enumerate_pure_equilibria(game, _profile_cap(args))
        report = {"equilibria": [list(e) for e in eqs]}
        if not len(eqs):
            report["note"] = "the game has no pure equilibrium"
    else:
        eqs = enumerate_mixed_equilibria_2p(game)
        report = {"equilibria": [e.render() for e in eqs], "degenerate": eqs.degenerate}
    report["verdict"] = "listing"
    return report, EXIT_OK


def _observable(args):
    game = parse_game(_read(args.game))
    return parse_observable(game, _read(args.constraints), args.mode)


def cmd_coherence(args) -> tuple[dict, int]:
    obs = _observable(args)
    if args.mode == "pure":
        result = decide_pure_coherence(obs, args.path, cap=_profile_cap(args))
    else:
        if args.path == "psat":
            raise UsageError("--path psat is only available in pure mode")
        result = decide_mixed_coherence(obs, "direct" if args.path == "direct" else "column-generation")
    report = {"verdict": result.verdict, "path": args.path, "witness": render_witness(result.witness)}
    if result.verdict == "incoherent":
        report["reason"] = "no distribution over equilibria satisfies the constraints"
    elif result.verdict == "no-equilibrium":
        report["reason"] = "the game has no equilibrium of the requested kind"
    if args.mode == "mixed":
        report["degenerate"] = result.degenerate
    return report, EXIT_OK if result.coherent else EXIT_REJECTED


def cmd_extension(args) -> tuple[dict, int]:
    obs = _observable(args)
    query = ExtensionQuery(obs, parse_formula(args.target), args.direction, parse_epsilon(args.eps))
    if args.method == "exact":
        result = extension_exact(query)
        return {"verdict": "value", "value": fmt(result.value), "witness": render_witness(result.witness)}, EXIT_OK
    result = extension_binary_search(query)
    last_yes = next((p for p in reversed(result.probes) if p.coherent), None)
    probes = [
        {"constraint": str(p.constraint), "coherent": p.coherent, "witness": render_witness(p.witness)}
        for p in result.probes
    ]
    for i, p in enumerate(result.probes, start=1):
        print(f"probe {i}: {p.constraint} -> {'Yes' if p.coherent else 'No'}", file=sys.stderr)
    report = {
        "verdict": "value",
        "value": fmt(result.value),
        "bracket": [fmt(x) for x in result.bracket],
        "probes": probes,
        # a rejected first probe leaves only the trivial bound, certified by the base instance
        "witness": render_witness(last_yes.witness if last_yes else extension_exact(query).witness),
    }
    report["oracle_calls"] = result.oracle_calls
    return report, EXIT_OK


def cmd_encode(args) -> tuple[dict, int]:
    encoding = encode_game(parse_game(_read(args.game)))
    text = export_dimacs(encoding)
    report = {"verdict": "encoded", "variables": encoding.num_vars, "clauses": len(encoding.clauses)}
    if args.output:
        Path(args.output).write_text(text)
        report["output"] = args.output
    else:
        report["dimacs"] = text
    return report, EXIT_OK


def cmd_bench(args) -> tuple[dict, int]:
    config = parse_config(_read(args.config))
    rows = run_sweep(config)
    text = rows_to_csv(rows)
    report = {
        "verdict": "sweep",
        "rows": [dict(zip(text.splitlines()[0].split(","), line.split(","))) for line in text.splitlines()[1:]],
    }
    if args.output:
        Path(args.output).write_text(text)
        report["output"] = args.output
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="obsgames", description="Coherence of probabilistic constraints on Nash equilibria.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", help="list equilibria of a game")
    p.add_argument("game")
    p.add_argument("--mode", choices=("pure", "mixed"), default="pure")
    p.add_argument("--profile-cap", type=int)
    p.set_defaults(func=cmd_enumerate)

    for name, func, helptext in (
        ("coherence", cmd_coherence, "decide whether constraints are coherent"),
        ("extension", cmd_extension, "bound the probability of a target formula"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("game")
        p.add_argument("constraints")
        p.add_argument("--mode", choices=("pure", "mixed"), default="pure")
        p.add_argument("--profile-cap", type=int)
        p.set_defaults(func=func)
        if name == "coherence":
            p.add_argument("--path", choices=PURE_PATHS, default="direct")
        else:
            p.add_argument("--target", required=True)
            p.add_argument("--direction", choices=("max", "min"), default="max")
            p.add_argument("--eps", default="2^-6")
            p.add_argument("--method", choices=("exact", "binsearch"), default="exact")

    p = sub.add_parser("encode", help="write the equilibrium CNF in DIMACS format")
    p.add_argument("game")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("bench", help="run a random-instance sweep")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    start = time.perf_counter()
    with stats.counting() as counters:
        try:
            args = build_parser().parse_args(argv)
            report, code = args.func(args)
        except (UsageError, ObsGamesError, ValueError) as exc:
            kind = "usage" if isinstance(exc, UsageError) else type(exc).__name__
            print(f"obsgames: error: {exc}", file=sys.stderr)
            report, code = {"verdict": "error", "error": kind, "message": str(exc)}, EXIT_USAGE
    report["statistics"] = {
        "equilibria": counters.get("equilibria", 0),
        "lp_pivots": counters.get("lp_pivots", 0),
        "sat_decisions": counters.get("sat_decisions", 0),
        "oracle_calls": counters.get("oracle_calls", 0),
        "pricing_calls": counters.get("pricing_calls", 0),
        "wall_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
