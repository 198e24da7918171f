"""Mixed equilibria of two-player games and coherence over them.

Equilibria come from support enumeration: for each pair of equal-size
supports, solve the two indifference systems exactly and keep solutions that
are nonnegative and survive the best-response check.  When an indifference
system has a continuum of solutions the game is degenerate, and the
enumerated set may miss equilibria; results then carry ``degenerate=True``.

Column generation over mixed equilibria starts from the upper-triangular
basis and prices an explicit pool of equilibrium columns.
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

from . import stats
from .coherence import (
    COHERENT,
    INCOHERENT,
    NO_EQUILIBRIUM,
    CoherenceResult,
    CoherenceWitness,
    ObservableGame,
    solve_over,
)
from .errors import ResourceLimitError, UnsupportedFeature
from .exact import dot, fmt, solve_linear
from .formula import Atom, Formula
from .game import Game, Profile
from .psat import initial_basis, slack_columns
from .simplex import Basis, Column, ConstraintSystem, minimize_with_pricing

DEFAULT_SUPPORT_CAP = 200_000
MIXED_METHODS = ("direct", "column-generation")


@dataclass(frozen=True)
class MixedStrategy:
    player: str
    weights: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        w = {a: Fraction(x) for a, x in self.weights.items()}
        if any(x < 0 for x in w.values()):
            raise ValueError(f"negative probability in strategy of {self.player!r}")
        if sum(w.values()) != 1:
            raise ValueError(f"strategy of {self.player!r} does not sum to 1")
        object.__setattr__(self, "weights", MappingProxyType(w))

    def __getitem__(self, action: str) -> Fraction:
        return self.weights.get(action, Fraction(0))

    def support(self) -> tuple[str, ...]:
        return tuple(a for a, x in self.weights.items() if x != 0)

    def _key(self):
        return (self.player, tuple((a, x) for a, x in self.weights.items() if x != 0))

    def __eq__(self, other) -> bool:
        return isinstance(other, MixedStrategy) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@dataclass(frozen=True)
class MixedProfile:
    strategies: tuple[MixedStrategy, ...]

    @classmethod
    def from_pure(cls, game: Game, profile: Sequence[str]) -> "MixedProfile":
        return cls(tuple(MixedStrategy(p, {a: Fraction(1)}) for p, a in zip(game.players, profile)))

    @property
    def players(self) -> tuple[str, ...]:
        return tuple(s.player for s in self.strategies)

    def strategy(self, player: str) -> MixedStrategy:
        for s in self.strategies:
            if s.player == player:
                return s
        raise KeyError(player)

    def probability(self, action: str) -> Fraction:
        for s in self.strategies:
            if action in s.weights:
                return s[action]
        return Fraction(0)

    def probability_of(self, formula: Formula) -> Fraction:
        if not isinstance(formula, Atom):
            raise UnsupportedFeature(f"mixed profiles only assign probabilities to single actions, not {formula}")
        return self.probability(formula.name)

    def support_fingerprint(self) -> tuple[tuple[str, ...], ...]:
        return tuple(s.support() for s in self.strategies)

    def as_pure(self) -> Profile | None:
        sup = self.support_fingerprint()
        return tuple(s[0] for s in sup) if all(len(s) == 1 for s in sup) else None

    def render(self) -> list[dict[str, str]]:
        return [{a: fmt(x) for a, x in s.weights.items() if x != 0} for s in self.strategies]

    def __str__(self) -> str:
        return "(" + "; ".join(" ".join(f"{a}:{fmt(x)}" for a, x in s.weights.items() if x) for s in self.strategies) + ")"


def _require_two(game: Game) -> None:
    if game.n != 2:
        raise UnsupportedFeature(f"mixed equilibria need exactly 2 players, game has {game.n}")


def payoff_matrices(game: Game) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Row player = first player; entry [i][j] is the payoff at (row i, column j)."""
    _require_two(game)
    p, q = game.players
    rows = [[game.utility(p, (a, b)) for b in game.actions[q]] for a in game.actions[p]]
    cols = [[game.utility(q, (a, b)) for b in game.actions[q]] for a in game.actions[p]]
    return rows, cols


def action_payoffs(game: Game, player: str, profile: MixedProfile) -> dict[str, Fraction]:
    """Expected payoff of each pure action of ``player`` against the other strategy."""
    _require_two(game)
    other = next(s for s in profile.strategies if s.player != player)
    i = game.player_index[player]
    out = {}
    for a in game.actions[player]:
        total = Fraction(0)
        for b, w in other.weights.items():
            if w:
                total += w * game.utility(player, (a, b) if i == 0 else (b, a))
        out[a] = total
    return out


def expected_utility(game: Game, player: str, profile: MixedProfile) -> Fraction:
    _require_two(game)
    own = profile.strategy(player)
    payoffs = action_payoffs(game, player, profile)
    return sum((w * payoffs[a] for a, w in own.weights.items() if w), Fraction(0))


def is_mixed_equilibrium(game: Game, profile: MixedProfile) -> bool:
    _require_two(game)
    for player in game.players:
        payoffs = action_payoffs(game, player, profile)
        top = max(payoffs.values())
        if any(payoffs[a] != top for a in profile.strategy(player).support()):
            return False
    return True


@dataclass(frozen=True)
class MixedEquilibriumSet:
    profiles: tuple[MixedProfile, ...]
    degenerate: bool

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)

    def __contains__(self, profile) -> bool:
        return profile in self.profiles


def _indifference(payoff: Sequence[Sequence[Fraction]], own: Sequence[int], other: Sequence[int]):
    """Mix over ``other`` making every action in ``own`` earn the same payoff."""
    k = len(other)
    a = [[payoff[i][j] for j in other] + [Fraction(-1)] for i in own]
    a.append([Fraction(1)] * k + [Fraction(0)])
    b = [Fraction(0)] * len(own) + [Fraction(1)]
    return solve_linear(a, b)


def enumerate_mixed_equilibria_2p(game: Game, cap: int = DEFAULT_SUPPORT_CAP) -> MixedEquilibriumSet:
    _require_two(game)
    p, q = game.players
    rows, cols = payoff_matrices(game)
    m, n = len(game.actions[p]), len(game.actions[q])
    pairs = sum(comb(m, k) * comb(n, k) for k in range(1, min(m, n) + 1))
    if pairs > cap:
        raise ResourceLimitError(f"{pairs} support pairs exceed the cap of {cap}")
    cols_t = [list(col) for col in zip(*cols)]  # column player's payoffs, indexed [own][other]
    found: list[MixedProfile] = []
    seen: set[MixedProfile] = set()
    degenerate = False
    for k in range(1, min(m, n) + 1):
        for s1 in itertools.combinations(range(m), k):
            for s2 in itertools.combinations(range(n), k):
                ky, y = _indifference(rows, s1, s2)
                kx, x = _indifference(cols_t, s2, s1)
                if "continuum" in (kx, ky):
                    degenerate = True
                if kx != "unique" or ky != "unique":
                    continue
                xs, ys = x[:-1], y[:-1]
                if any(v < 0 for v in xs) or any(v < 0 for v in ys):
                    continue
                profile = MixedProfile((
                    MixedStrategy(p, {game.actions[p][i]: xs[t] for t, i in enumerate(s1)}),
                    MixedStrategy(q, {game.actions[q][j]: ys[t] for t, j in enumerate(s2)}),
                ))
                if profile in seen or not is_mixed_equilibrium(game, profile):
                    continue
                seen.add(profile)
                found.append(profile)
                if _extra_best_responses(game, profile):
                    degenerate = True
    stats.bump("equilibria", len(found))
    return MixedEquilibriumSet(tuple(found), degenerate)


def _extra_best_responses(game: Game, profile: MixedProfile) -> bool:
    for player in game.players:
        payoffs = action_payoffs(game, player, profile)
        top = max(payoffs.values())
        if sum(v == top for v in payoffs.values()) > len(profile.strategy(player).support()):
            return True
    return False


def _require_atomic(observable: ObservableGame) -> None:
    for c in observable.constraints:
        if not isinstance(c.formula, Atom):
            raise UnsupportedFeature(f"mixed mode accepts only single-action constraints; got {c}")


def build_mixed_system(observable: ObservableGame, equilibria: Sequence[MixedProfile]) -> ConstraintSystem:
    _require_atomic(observable)
    matrix = [[Fraction(1)] * len(equilibria)]
    for c in observable.constraints:
        matrix.append([e.probability(c.formula.name) for e in equilibria])
    return ConstraintSystem(
        matrix,
        [Fraction(1)] + [c.bound for c in observable.constraints],
        ["="] + [c.relation for c in observable.constraints],
        ["sum"] + [c.formula.name for c in observable.constraints],
        list(range(len(equilibria))),
    )


def cost_reducing_pricing(basis: Basis, pool: Sequence[Column], *, strict: bool = False) -> Column | None:
    """First pool column (by key) outside the basis with ``y . column >= 0``, ``y = c_B B^-1``.

    With ``strict`` the inequality is ``> 0``, which is what guarantees
    progress; the non-strict form accepts any column when ``y`` is zero.
    """
    y = basis.duals()
    for col in sorted(pool, key=lambda c: c.key):
        score = dot(y, col.vector) - col.cost
        if (score > 0 if strict else score >= 0) and not basis.contains(col):
            return col
    return None


def decide_mixed_coherence(
    observable: ObservableGame,
    method: str = "direct",
    *,
    equilibria: MixedEquilibriumSet | None = None,
) -> CoherenceResult:
    if method not in MIXED_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {MIXED_METHODS}")
    _require_atomic(observable)
    eqs = equilibria if equilibria is not None else enumerate_mixed_equilibria_2p(observable.game)
    profiles = list(eqs.profiles)
    path = "direct" if method == "direct" else "cg"
    if not profiles:
        return CoherenceResult(NO_EQUILIBRIUM, path=path, degenerate=eqs.degenerate, equilibria=0)
    if method == "direct":
        witness = solve_over(observable, profiles, build_mixed_system(observable, profiles))
        verdict = COHERENT if witness is not None else INCOHERENT
        return CoherenceResult(verdict, witness, path, degenerate=eqs.degenerate, equilibria=len(profiles))

    # rows sorted by descending bound so the upper-triangular start is feasible
    rows = sorted(observable.constraints, key=lambda c: -c.bound)
    rhs = [Fraction(1)] + [c.bound for c in rows]
    pool = [
        Column((Fraction(1),) + tuple(e.probability(c.formula.name) for c in rows), Fraction(0), j, "point", (1, j))
        for j, e in enumerate(profiles)
    ]
    pool += slack_columns([c.relation for c in rows])
    by_vector = {}
    for col in pool:
        if col.kind == "point":
            by_vector.setdefault(col.vector, col)
    start = initial_basis(rhs, lambda vec: by_vector.get(tuple(vec)))
    result = minimize_with_pricing(start, lambda b: cost_reducing_pricing(b, pool, strict=True))
    history = tuple(result.history)
    if result.objective != 0:
        return CoherenceResult(INCOHERENT, path=path, history=history, degenerate=eqs.degenerate, equilibria=len(profiles))
    mass: dict[int, Fraction] = {}
    for col, value in result.basis.support():
        if col.kind == "point":
            mass[col.label] = mass.get(col.label, Fraction(0)) + value
    witness = CoherenceWitness(tuple(profiles[j] for j in mass), tuple(mass.values()))
    return CoherenceResult(COHERENT, witness, path, history, eqs.degenerate, len(profiles))
