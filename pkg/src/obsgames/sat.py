"""CNF encoding of pure equilibria and a small complete SAT procedure.

The encoding has one variable per (player, action).  Its clauses say that
each player picks at least one action (tag ``a``), at most one action
(tag ``b``), and a best response to every neighborhood choice (tag ``c``).
Models are therefore in bijection with pure equilibria.

:class:`Solver` is a chronological-backtracking DPLL search with unit
propagation over two watched literals.  Variables are decided in ascending
index order, true first, so model enumeration is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import stats
from .formula import Atom, Formula, Not, conj, disj
from .game import Game, Profile
from .pure import best_response_table

Clause = tuple[int, ...]


class Solver:
    """Single-use DPLL solver over DIMACS-style integer literals."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]]):
        self.num_vars = num_vars
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.trivially_unsat = False
        self.watches: dict[int, list[int]] = {}
        for clause in clauses:
            lits = list(dict.fromkeys(clause))
            if any(-lit in lits for lit in lits):
                continue
            if any(abs(lit) > num_vars or lit == 0 for lit in lits):
                raise ValueError(f"literal out of range in clause {clause}")
            if not lits:
                self.trivially_unsat = True
            elif len(lits) == 1:
                self.units.append(lits[0])
            else:
                ci = len(self.clauses)
                self.clauses.append(lits)
                self.watches.setdefault(lits[0], []).append(ci)
                self.watches.setdefault(lits[1], []).append(ci)
        self.decisions = 0

    def _value(self, lit: int) -> bool | None:
        v = self.assign[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def _enqueue(self, lit: int) -> bool:
        val = self._value(lit)
        if val is not None:
            return val
        self.assign[abs(lit)] = lit > 0
        self.trail.append(lit)
        return True

    def _propagate(self) -> bool:
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            watching = self.watches.get(false_lit, [])
            keep = []
            conflict = False
            for n, ci in enumerate(watching):
                if conflict:
                    keep.append(ci)
                    continue
                lits = self.clauses[ci]
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                if self._value(lits[0]) is True:
                    keep.append(ci)
                    continue
                for j in range(2, len(lits)):
                    if self._value(lits[j]) is not False:
                        lits[1], lits[j] = lits[j], lits[1]
                        self.watches.setdefault(lits[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if not self._enqueue(lits[0]):
                        conflict = True
            self.watches[false_lit] = keep
            if conflict:
                return False
        return True

    def _undo(self, size: int) -> None:
        while len(self.trail) > size:
            self.assign[abs(self.trail.pop())] = None
        self.qhead = min(self.qhead, size)

    def solve(self, assumptions: Iterable[int] = ()) -> list[bool] | None:
        """A total satisfying assignment (index 0 unused) or None if UNSAT."""
        self.assign: list[bool | None] = [None] * (self.num_vars + 1)
        self.trail: list[int] = []
        self.qhead = 0
        if self.trivially_unsat:
            return None
        for lit in itertools.chain(self.units, assumptions):
            if abs(lit) > self.num_vars or lit == 0:
                raise ValueError(f"assumption literal {lit} out of range")
            if not self._enqueue(lit):
                return None
        if not self._propagate():
            return None
        levels: list[tuple[int, int, bool]] = []  # (trail size, decision literal, flipped)
        next_var = 1
        while True:
            while next_var <= self.num_vars and self.assign[next_var] is not None:
                next_var += 1
            if next_var > self.num_vars:
                stats.bump("sat_decisions", self.decisions)
                return list(self.assign)  # type: ignore[arg-type]
            self.decisions += 1
            levels.append((len(self.trail), next_var, False))
            self._enqueue(next_var)
            while not self._propagate():
                while levels:
                    size, lit, flipped = levels.pop()
                    self._undo(size)
                    if not flipped:
                        levels.append((size, -lit, True))
                        self._enqueue(-lit)
                        break
                else:
                    stats.bump("sat_decisions", self.decisions)
                    return None
            next_var = 1


@dataclass(frozen=True)
class CNFEncoding:
    variables: tuple[tuple[str, str], ...]  # index - 1 -> (player, action)
    clauses: tuple[Clause, ...]
    tags: tuple[str, ...]
    players: tuple[str, ...]

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def var(self, action: str) -> int:
        return self._index[action]

    @property
    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {a: i + 1 for i, (_, a) in enumerate(self.variables)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def tagged(self, tag: str) -> list[Clause]:
        return [c for c, t in zip(self.clauses, self.tags) if t == tag]

    def as_formula(self) -> Formula:
        """The encoding as a formula over action atoms."""
        def lit(x: int) -> Formula:
            atom = Atom(self.variables[abs(x) - 1][1])
            return atom if x > 0 else Not(atom)

        return conj(disj(lit(x) for x in clause) for clause in self.clauses)


Valuation = Sequence[bool]


def encode_game(game: Game) -> CNFEncoding:
    variables = tuple((p, a) for p in game.players for a in game.actions[p])
    index = {a: i + 1 for i, (_, a) in enumerate(variables)}
    clauses: list[Clause] = []
    tags: list[str] = []
    for p in game.players:
        clauses.append(tuple(index[a] for a in game.actions[p]))
        tags.append("a")
    for p in game.players:
        for x, y in itertools.combinations(game.actions[p], 2):
            clauses.append((-index[x], -index[y]))
            tags.append("b")
    for p in game.players:
        for nb_key, best in best_response_table(game, p).items():
            clauses.append(tuple(-index[a] for a in nb_key) + tuple(index[a] for a in best))
            tags.append("c")
    return CNFEncoding(variables, tuple(clauses), tuple(tags), game.players)


def decode_model(encoding: CNFEncoding, valuation: Valuation) -> Profile:
    """Profile picked by a valuation; ``valuation[i]`` is the value of variable ``i`` (1-based)."""
    if len(valuation) == encoding.num_vars:
        valuation = [None, *valuation]
    chosen: dict[str, list[str]] = {p: [] for p in encoding.players}
    for i, (p, a) in enumerate(encoding.variables, start=1):
        if valuation[i]:
            chosen[p].append(a)
    for p, acts in chosen.items():
        if len(acts) != 1:
            raise ValueError(f"player {p!r} has {len(acts)} true action variables; expected exactly one")
    return tuple(chosen[p][0] for p in encoding.players)


def _assumption_literals(encoding: CNFEncoding, assumptions) -> list[int]:
    if isinstance(assumptions, Mapping):
        return [encoding.var(a) if v else -encoding.var(a) for a, v in assumptions.items()]
    return list(assumptions)


def sat_solve(encoding: CNFEncoding, assumptions: Mapping[str, bool] | Iterable[int] = ()) -> list[bool] | None:
    """A satisfying valuation extending the assumptions, or None when UNSAT.

    Assumptions are either action id -> truth value or signed variable indices.
    """
    solver = Solver(encoding.num_vars, encoding.clauses)
    model = solver.solve(_assumption_literals(encoding, assumptions))
    return None if model is None else model[1:]


def enumerate_models(encoding: CNFEncoding) -> list[Profile]:
    """All decoded models, found by re-solving with a blocking clause per model."""
    blocking: list[Clause] = []
    found: list[Profile] = []
    while True:
        solver = Solver(encoding.num_vars, itertools.chain(encoding.clauses, blocking))
        model = solver.solve()
        if model is None:
            return found
        profile = decode_model(encoding, model[1:])
        found.append(profile)
        blocking.append(tuple(-encoding.var(a) for a in profile))


def export_dimacs(encoding: CNFEncoding) -> str:
    lines = [f"c var {i} = {p}:{a}" for i, (p, a) in enumerate(encoding.variables, start=1)]
    lines.append(f"p cnf {encoding.num_vars} {len(encoding.clauses)}")
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in encoding.clauses)
    return "\n".join(lines) + "\n"
