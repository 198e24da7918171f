"""Random observable games and constraint-count sweeps.

Instance ``i`` of a sweep is drawn from its own ``random.Random`` seeded by
``"<seed>:<i>"``, so instances do not depend on evaluation order.  Each
instance draws ``max(K_values)`` atomic constraints once; the cell for ``K``
uses the first ``K`` of them when ``accumulate`` is set, which makes every
cell's constraint set a superset of the previous cell's.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction

from .coherence import ObservableGame, decide_pure_coherence
from .errors import ParseError
from .formula import Atom, ProbConstraint
from .game import Game
from .mixed import decide_mixed_coherence

CSV_HEADER = ("mode", "n", "s", "k", "K", "instances", "coherent_frac", "mean_ms", "median_ms", "timeouts", "seed")
BOUND_GRID = 20  # constraint bounds are multiples of 1/BOUND_GRID


@dataclass(frozen=True)
class SweepConfig:
    n: int = 3
    s: int = 2
    k: int = 2
    K_values: tuple[int, ...] = (0, 1, 2, 3, 4)
    instances: int = 20
    seed: int = 1
    time_limit: float = 5.0  # seconds
    mode: str = "pure"
    utility_range: tuple[int, int] = (0, 1)
    accumulate: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "K_values", tuple(self.K_values))
        if min(self.n, self.s, self.instances) < 1 or self.k < 0:
            raise ValueError("n, s and instances must be positive and k non-negative")
        if any(K < 0 for K in self.K_values) or not self.K_values:
            raise ValueError("K values must be a non-empty list of non-negative counts")
        if self.mode not in ("pure", "mixed"):
            raise ValueError(f"mode must be pure or mixed, not {self.mode!r}")
        if self.mode == "mixed" and self.n != 2:
            raise ValueError("mixed sweeps need n = 2")
        lo, hi = self.utility_range
        if lo > hi:
            raise ValueError("utility range is empty")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")

    @property
    def max_K(self) -> int:
        return max(self.K_values)


def random_game(rng: random.Random, n: int, s: int, k: int, utility_range: tuple[int, int]) -> Game:
    players = tuple(f"p{i}" for i in range(n))
    actions = {p: [f"{p}a{j}" for j in range(s)] for p in players}
    lo, hi = utility_range
    neighbors, tables = {}, {}
    for p in players:
        others = [q for q in players if q != p]
        neighbors[p] = sorted(rng.sample(others, min(k, len(others))))
        scope = [q for q in players if q == p or q in neighbors[p]]
        tables[p] = {
            key: Fraction(rng.randint(lo, hi)) for key in itertools.product(*(actions[q] for q in scope))
        }
    form = "standard" if all(len(neighbors[p]) == n - 1 for p in players) else "graphical"
    return Game(players, actions, neighbors, tables, form=form)


def random_constraints(rng: random.Random, game: Game, count: int) -> list[ProbConstraint]:
    out = []
    for _ in range(count):
        action = rng.choice(game.all_actions)
        relation = rng.choice(("<=", ">=", "="))
        bound = Fraction(rng.randint(0, BOUND_GRID), BOUND_GRID)
        out.append(ProbConstraint(Atom(action), relation, bound))
    return out


def _instance_rng(config: SweepConfig, index: int, K: int | None = None) -> random.Random:
    tag = f"{config.seed}:{index}" if K is None else f"{config.seed}:{K}:{index}"
    return random.Random(tag)


def generate_instance(config: SweepConfig, index: int, K: int | None = None) -> ObservableGame:
    """Instance ``index`` with the first ``K`` constraints (default: all ``max_K``)."""
    K = config.max_K if K is None else K
    rng = _instance_rng(config, index, None if config.accumulate else K)
    game = random_game(rng, config.n, config.s, config.k, config.utility_range)
    pool = random_constraints(rng, game, config.max_K if config.accumulate else K)
    return ObservableGame(game, tuple(pool[:K]), config.mode)


def decide(observable: ObservableGame) -> bool:
    if observable.mode == "pure":
        return decide_pure_coherence(observable, "direct").coherent
    return decide_mixed_coherence(observable, "direct").coherent


@dataclass(frozen=True)
class SweepRow:
    config: SweepConfig
    K: int
    verdicts: tuple[bool, ...]
    times_ms: tuple[float, ...]
    timeouts: int

    @property
    def coherent_frac(self) -> Fraction:
        return Fraction(sum(self.verdicts), len(self.verdicts))

    def as_csv(self) -> tuple:
        c = self.config
        return (
            c.mode, c.n, c.s, c.k, self.K, len(self.verdicts),
            f"{float(self.coherent_frac):.4f}",
            f"{statistics.fmean(self.times_ms):.3f}",
            f"{statistics.median(self.times_ms):.3f}",
            self.timeouts, c.seed,
        )


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """One row per K value.  Instances over the time limit still count, and are tallied as timeouts."""
    decide(generate_instance(config, 0))  # warmup, discarded
    rows = []
    for K in config.K_values:
        verdicts, times, timeouts = [], [], 0
        for index in range(config.instances):
            observable = generate_instance(config, index, K)
            start = time.perf_counter()
            verdicts.append(decide(observable))
            elapsed = time.perf_counter() - start
            times.append(elapsed * 1000)
            timeouts += elapsed > config.time_limit
        rows.append(SweepRow(config, K, tuple(verdicts), tuple(times), timeouts))
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


_KEYS = {
    "n": int, "s": int, "k": int, "instances": int, "seed": int,
    "time_limit": float, "mode": str,
}


def parse_config(text: str) -> SweepConfig:
    """``key value...`` lines; ``#`` starts a comment."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key, args = line[0], line[1:]
        if key in values or (key == "K" and "K_values" in values) or (key == "utility" and "utility_range" in values):
            raise ParseError(f"duplicate key {key!r}", lineno)
        try:
            if key in _KEYS:
                if len(args) != 1:
                    raise ParseError(f"{key!r} takes one value", lineno)
                values[key] = _KEYS[key](args[0])
            elif key == "K":
                values["K_values"] = tuple(int(a) for a in args)
            elif key == "utility":
                if len(args) != 2:
                    raise ParseError("'utility' takes a low and a high value", lineno)
                values["utility_range"] = (int(args[0]), int(args[1]))
            elif key == "accumulate":
                if args not in (["yes"], ["no"]):
                    raise ParseError("'accumulate' takes yes or no", lineno)
                values["accumulate"] = args[0] == "yes"
            else:
                raise ParseError(f"unknown key {key!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    try:
        return SweepConfig(**values)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
