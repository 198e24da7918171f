"""Coherence of probabilistic constraints over pure equilibria.

An observable game pairs a game with constraints ``P(f) rel p`` on formulas
over action atoms.  It is coherent when some probability distribution over
the game's equilibria induces formula probabilities meeting every constraint.

Three decision paths are offered:

* ``direct`` enumerates pure equilibria and solves the feasibility LP.
* ``psat`` adds ``P(phi) = 1`` for the game's CNF encoding ``phi`` and hands
  the result to the enumerating PSAT solver.
* ``cg`` runs the same PSAT instance through SAT-priced column generation,
  so equilibria are never listed up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import GameValidationError
from .formula import Formula, ProbConstraint, parse_constraints
from .game import Game, Profile
from .psat import PSATInstance, psat_satisfiable
from .pure import DEFAULT_PROFILE_CAP, PureEquilibriumSet, enumerate_pure_equilibria
from .sat import encode_game, sat_solve
from .simplex import ConstraintSystem, solve_feasibility

PCEConstraint = ProbConstraint

COHERENT = "coherent"
INCOHERENT = "incoherent"
NO_EQUILIBRIUM = "no-equilibrium"
PURE_PATHS = ("direct", "psat", "cg")


@dataclass(frozen=True)
class ObservableGame:
    game: Game
    constraints: tuple[ProbConstraint, ...]
    mode: str = "pure"

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.mode not in ("pure", "mixed"):
            raise ValueError(f"mode must be 'pure' or 'mixed', not {self.mode!r}")
        known = set(self.game.all_actions)
        for c in self.constraints:
            unknown = c.formula.atoms() - known
            if unknown:
                raise GameValidationError(f"constraint {c} mentions unknown action {sorted(unknown)[0]!r}")

    @property
    def K(self) -> int:
        return len(self.constraints)

    def with_constraint(self, constraint: ProbConstraint) -> "ObservableGame":
        return ObservableGame(self.game, self.constraints + (constraint,), self.mode)


def parse_observable(game: Game, constraint_text: str, mode: str = "pure") -> ObservableGame:
    return ObservableGame(game, tuple(parse_constraints(constraint_text)), mode)


@dataclass(frozen=True)
class CoherenceWitness:
    """A distribution over equilibria; ``support[i]`` has probability ``probabilities[i]``."""

    support: tuple[Any, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probabilities):
            raise ValueError("support and probabilities differ in length")
        if any(p <= 0 for p in self.probabilities):
            raise ValueError("witness probabilities must be positive")
        if sum(self.probabilities) != 1:
            raise ValueError("witness probabilities must sum to 1")

    def __len__(self) -> int:
        return len(self.support)

    def items(self):
        return zip(self.support, self.probabilities)


@dataclass(frozen=True)
class CoherenceResult:
    verdict: str
    witness: CoherenceWitness | None = None
    path: str = "direct"
    history: tuple[Fraction, ...] = ()
    degenerate: bool = False
    equilibria: int | None = None  # size of the enumerated set, when one was built

    @property
    def coherent(self) -> bool:
        return self.verdict == COHERENT


def _holds_at(equilibrium, formula: Formula) -> Fraction:
    # mixed profiles know their own per-action probabilities
    prob = getattr(equilibrium, "probability_of", None)
    if prob is not None:
        return prob(formula)
    return Fraction(int(formula.holds(set(equilibrium))))


def action_probability(witness: CoherenceWitness, formula: Formula) -> Fraction:
    """Probability that ``formula`` holds at the equilibrium drawn from ``witness``."""
    return sum((p * _holds_at(e, formula) for e, p in witness.items()), Fraction(0))


def witness_satisfies(witness: CoherenceWitness, constraints: Iterable[ProbConstraint]) -> bool:
    return all(c.satisfied_by(action_probability(witness, c.formula)) for c in constraints)


def build_pure_system(observable: ObservableGame, equilibria: Sequence[Profile] | PureEquilibriumSet) -> ConstraintSystem:
    """Normalization row plus one 0/1 row per constraint, one column per equilibrium."""
    eqs = [set(e) for e in equilibria]
    matrix = [[Fraction(1)] * len(eqs)]
    for c in observable.constraints:
        matrix.append([Fraction(int(c.formula.holds(e))) for e in eqs])
    return ConstraintSystem(
        matrix,
        [Fraction(1)] + [c.bound for c in observable.constraints],
        ["="] + [c.relation for c in observable.constraints],
        ["sum"] + [str(c.formula) for c in observable.constraints],
        list(tuple(e) for e in equilibria),
    )


def solve_over(observable: ObservableGame, equilibria: Sequence[Any], system: ConstraintSystem) -> CoherenceWitness | None:
    if not equilibria:
        return None
    pi = solve_feasibility(system)
    if pi is None:
        return None
    pairs = [(e, p) for e, p in zip(equilibria, pi) if p != 0]
    return CoherenceWitness(tuple(e for e, _ in pairs), tuple(p for _, p in pairs))


def reduce_to_psat(observable: ObservableGame) -> PSATInstance:
    """The constraints plus ``P(phi) = 1``, with ``phi`` the game's equilibrium CNF."""
    phi = encode_game(observable.game).as_formula()
    forced = ProbConstraint(phi, "=", Fraction(1))
    return PSATInstance.from_constraints(observable.constraints + (forced,), observable.game.all_actions)


def _decode(game: Game, true_atoms: frozenset[str]) -> Profile:
    return tuple(next(a for a in game.actions[p] if a in true_atoms) for p in game.players)


def decide_pure_coherence(
    observable: ObservableGame,
    path: str = "direct",
    *,
    cap: int = DEFAULT_PROFILE_CAP,
    equilibria: PureEquilibriumSet | None = None,
) -> CoherenceResult:
    if observable.mode != "pure":
        raise ValueError("decide_pure_coherence needs a pure-mode observable game")
    if path not in PURE_PATHS:
        raise ValueError(f"unknown path {path!r}; expected one of {PURE_PATHS}")
    game = observable.game
    if path == "direct":
        eqs = equilibria if equilibria is not None else enumerate_pure_equilibria(game, cap)
        if not len(eqs):
            return CoherenceResult(NO_EQUILIBRIUM, path=path, equilibria=0)
        witness = solve_over(observable, list(eqs), build_pure_system(observable, eqs))
        verdict = COHERENT if witness is not None else INCOHERENT
        return CoherenceResult(verdict, witness, path, equilibria=len(eqs))

    if sat_solve(encode_game(game)) is None:
        return CoherenceResult(NO_EQUILIBRIUM, path=path)
    strategy = "enumerate" if path == "psat" else "column-generation"
    result = psat_satisfiable(reduce_to_psat(observable), strategy)
    if not result.satisfiable:
        return CoherenceResult(INCOHERENT, path=path, history=result.history)
    merged: dict[Profile, Fraction] = {}
    for valuation, p in result.witness:
        profile = _decode(game, valuation)
        merged[profile] = merged.get(profile, Fraction(0)) + p
    witness = CoherenceWitness(tuple(merged), tuple(merged.values()))
    return CoherenceResult(COHERENT, witness, path, history=result.history)
