"""Tightest coherent bounds on the probability of a target formula.

``extension_exact`` solves the LP directly.  ``extension_binary_search``
only asks yes/no coherence questions: it first tries the extreme value
(``P(t) = 1`` when maximizing, ``P(t) = 0`` when minimizing) and then
refines a dyadic bound one bit per probe, so ``epsilon = 2**-k`` costs at
most ``k + 1`` calls.  The returned bound is always one that a probe
accepted, so it lies on the coherent side of the true optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import stats
from .coherence import (
    CoherenceResult,
    CoherenceWitness,
    ObservableGame,
    build_pure_system,
    decide_pure_coherence,
)
from .errors import IncoherentBase, UnsupportedFeature
from .formula import Atom, Formula, ProbConstraint
from .mixed import build_mixed_system, decide_mixed_coherence, enumerate_mixed_equilibria_2p
from .pure import enumerate_pure_equilibria
from .simplex import optimize

CoherenceOracle = Callable[[ObservableGame], CoherenceResult]


def dyadic_exponent(epsilon: Fraction) -> int:
    """``k`` with ``epsilon == 2**-k``; anything else is rejected."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1 or epsilon.numerator != 1 or epsilon.denominator & (epsilon.denominator - 1):
        raise ValueError(f"epsilon must be 2^-k for some k >= 0, got {epsilon}")
    return epsilon.denominator.bit_length() - 1


@dataclass(frozen=True)
class ExtensionQuery:
    observable: ObservableGame
    target: Formula
    direction: str = "max"
    epsilon: Fraction = Fraction(1, 64)

    def __post_init__(self) -> None:
        if self.direction not in ("max", "min"):
            raise ValueError(f"direction must be 'max' or 'min', not {self.direction!r}")
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        dyadic_exponent(self.epsilon)
        unknown = self.target.atoms() - set(self.observable.game.all_actions)
        if unknown:
            raise ValueError(f"target mentions unknown action {sorted(unknown)[0]!r}")
        if self.observable.mode == "mixed" and not isinstance(self.target, Atom):
            raise UnsupportedFeature("mixed mode targets must be single actions")

    @property
    def steps(self) -> int:
        return dyadic_exponent(self.epsilon)


@dataclass(frozen=True)
class ExtensionResult:
    value: Fraction
    direction: str
    witness: CoherenceWitness | None = None


@dataclass(frozen=True)
class Probe:
    constraint: ProbConstraint
    coherent: bool
    witness: CoherenceWitness | None


@dataclass(frozen=True)
class BinarySearchResult:
    value: Fraction
    direction: str
    bracket: tuple[Fraction, Fraction]  # the optimum lies in [lo, hi] (hi exclusive for max, lo for min)
    probes: tuple[Probe, ...] = field(default=())

    @property
    def oracle_calls(self) -> int:
        return len(self.probes)

    @property
    def pattern(self) -> tuple[str, ...]:
        return tuple("Yes" if p.coherent else "No" for p in self.probes)


def default_oracle(observable: ObservableGame) -> CoherenceOracle:
    """Coherence decisions for variants of ``observable`` that share its game.

    Equilibria are enumerated once and reused by every call.
    """
    if observable.mode == "pure":
        eqs = enumerate_pure_equilibria(observable.game)
        return lambda obs: decide_pure_coherence(obs, "direct", equilibria=eqs)
    eqs = enumerate_mixed_equilibria_2p(observable.game)
    return lambda obs: decide_mixed_coherence(obs, "direct", equilibria=eqs)


def extension_exact(query: ExtensionQuery) -> ExtensionResult:
    obs = query.observable
    if obs.mode == "pure":
        eqs = list(enumerate_pure_equilibria(obs.game))
        system = build_pure_system(obs, eqs)
        objective = [Fraction(int(query.target.holds(set(e)))) for e in eqs]
    else:
        eqs = list(enumerate_mixed_equilibria_2p(obs.game))
        system = build_mixed_system(obs, eqs)
        objective = [e.probability(query.target.name) for e in eqs]
    solution = optimize(system, objective, query.direction) if eqs else None
    if solution is None:
        raise IncoherentBase("the base observable game is not coherent")
    pairs = [(e, p) for e, p in zip(eqs, solution.x) if p != 0]
    witness = CoherenceWitness(tuple(e for e, _ in pairs), tuple(p for _, p in pairs))
    return ExtensionResult(solution.value, query.direction, witness)


def extension_binary_search(query: ExtensionQuery, coherence_oracle: CoherenceOracle | None = None) -> BinarySearchResult:
    obs = query.observable
    oracle = coherence_oracle or default_oracle(obs)
    # the base check is not recorded as a probe
    if not oracle(obs).coherent:
        raise IncoherentBase("the base observable game is not coherent")

    probes: list[Probe] = []

    def ask(relation: str, bound: Fraction) -> bool:
        constraint = ProbConstraint(query.target, relation, bound)
        result = oracle(obs.with_constraint(constraint))
        stats.bump("oracle_calls")
        probes.append(Probe(constraint, result.coherent, result.witness))
        return result.coherent

    k = query.steps
    if query.direction == "max":
        if ask("=", Fraction(1)):
            return BinarySearchResult(Fraction(1), "max", (Fraction(1), Fraction(1)), tuple(probes))
        lo, hi = Fraction(0), Fraction(1)
        for j in range(1, k + 1):
            v = lo + Fraction(1, 2**j)
            if ask(">=", v):
                lo = v
            else:
                hi = v
        return BinarySearchResult(lo, "max", (lo, hi), tuple(probes))

    if ask("=", Fraction(0)):
        return BinarySearchResult(Fraction(0), "min", (Fraction(0), Fraction(0)), tuple(probes))
    lo, hi = Fraction(0), Fraction(1)
    for j in range(1, k + 1):
        v = hi - Fraction(1, 2**j)
        if ask("<=", v):
            hi = v
        else:
            lo = v
    return BinarySearchResult(hi, "min", (lo, hi), tuple(probes))
