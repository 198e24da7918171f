"""Probabilistic satisfiability over propositional constraint sets.

Two strategies decide an instance:

``enumerate``
    Build the full matrix over every valuation that satisfies the forced
    formulas (``P(f) = 1`` or ``P(f) = 0``) and solve it as one LP.

``column-generation``
    Start from the upper-triangular basis with cost 1 on columns that are not
    valuations, and let a SAT-based oracle produce valuation columns with
    negative reduced cost until the cost reaches zero or no column exists.
    Forced formulas become hard clauses of the oracle's SAT query instead
    of matrix rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import stats
from .errors import ResourceLimitError
from .exact import dot
from .formula import And, Atom, Formula, Implies, Not, Or, ProbConstraint, parse_constraints
from .sat import Solver
from .simplex import (
    Basis,
    Column,
    ConstraintSystem,
    minimize_with_pricing,
    solve_feasibility,
)

Valuation = frozenset  # the set of true atoms

DEFAULT_ATOM_CAP = 20
STRATEGIES = ("enumerate", "column-generation")


@dataclass(frozen=True)
class PSATInstance:
    constraints: tuple[ProbConstraint, ...]
    atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "atoms", tuple(dict.fromkeys(self.atoms)))
        universe = set(self.atoms)
        for c in self.constraints:
            stray = c.formula.atoms() - universe
            if stray:
                raise ValueError(f"formula {c.formula} uses undeclared atom {sorted(stray)[0]!r}")

    @classmethod
    def from_constraints(cls, constraints: Iterable[ProbConstraint], atoms: Iterable[str] = ()) -> "PSATInstance":
        constraints = tuple(constraints)
        universe = list(atoms)
        for c in constraints:
            universe.extend(sorted(c.formula.atoms()))
        return cls(constraints, tuple(universe))


def parse_psat(text: str) -> PSATInstance:
    return PSATInstance.from_constraints(parse_constraints(text))


@dataclass(frozen=True)
class PSATResult:
    satisfiable: bool
    witness: tuple[tuple[Valuation, Fraction], ...] = ()
    iterations: int = 0
    history: tuple[Fraction, ...] = ()


def formula_probability(witness: Sequence[tuple[Valuation, Fraction]], formula: Formula) -> Fraction:
    return sum((p for v, p in witness if formula.holds(v)), Fraction(0))


def check_witness(instance: PSATInstance, witness: Sequence[tuple[Valuation, Fraction]]) -> bool:
    if any(p <= 0 for _, p in witness) or sum(p for _, p in witness) != 1:
        return False
    return all(c.satisfied_by(formula_probability(witness, c.formula)) for c in instance.constraints)


def psat_satisfiable(
    instance: PSATInstance,
    strategy: str = "enumerate",
    *,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> PSATResult:
    if strategy == "enumerate":
        return _solve_enumerate(instance, atom_cap)
    if strategy == "column-generation":
        return _solve_column_generation(instance)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def _solve_enumerate(instance: PSATInstance, atom_cap: int) -> PSATResult:
    n = len(instance.atoms)
    if n > atom_cap:
        raise ResourceLimitError(f"{n} atoms exceed the enumeration cap of {atom_cap}")
    forced = [(c.formula, c.forced()) for c in instance.constraints if c.forced() is not None]
    columns: list[Valuation] = []
    for bits in itertools.product((False, True), repeat=n):
        v = frozenset(a for a, b in zip(instance.atoms, bits) if b)
        if all(f.holds(v) == want for f, want in forced):
            columns.append(v)
    # forced formulas hold on every surviving column, so their rows are redundant
    rows = [c for c in instance.constraints if c.forced() is None]
    matrix = [[Fraction(1)] * len(columns)]
    matrix += [[Fraction(int(c.formula.holds(v))) for v in columns] for c in rows]
    if not columns:
        return PSATResult(False)
    system = ConstraintSystem(
        matrix,
        [Fraction(1)] + [c.bound for c in rows],
        ["="] + [c.relation for c in rows],
    )
    pi = solve_feasibility(system)
    if pi is None:
        return PSATResult(False)
    witness = tuple((v, p) for v, p in zip(columns, pi) if p != 0)
    return PSATResult(True, witness)


# -- column generation --------------------------------------------------------


class _CNFBuilder:
    """Tseitin translation onto a growing clause list."""

    def __init__(self, atoms: Sequence[str]):
        self.var = {a: i for i, a in enumerate(atoms, start=1)}
        self.num_vars = len(atoms)
        self.clauses: list[tuple[int, ...]] = []
        self._memo: dict[Formula, int] = {}

    def _fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def literal(self, f: Formula) -> int:
        """A literal equivalent to ``f``."""
        if isinstance(f, Atom):
            return self.var[f.name]
        if isinstance(f, Not):
            return -self.literal(f.arg)
        if f in self._memo:
            return self._memo[f]
        if isinstance(f, Implies):
            t = self.literal(Or((Not(f.left), f.right)))
        else:
            parts = [self.literal(g) for g in f.args]
            t = self._fresh()
            if isinstance(f, And):
                self.clauses.extend((-t, p) for p in parts)
                self.clauses.append((t, *(-p for p in parts)))
            else:
                self.clauses.append((-t, *parts))
                self.clauses.extend((t, -p) for p in parts)
        self._memo[f] = t
        return t

    def require(self, f: Formula) -> None:
        if isinstance(f, And):
            for g in f.args:
                self.require(g)
        elif isinstance(f, Or) and all(isinstance(g, (Atom, Not)) for g in f.args):
            self.clauses.append(tuple(self.literal(g) for g in f.args))
        else:
            self.clauses.append((self.literal(f),))


class PSATPricer:
    """Pricing oracle over valuations of the forced formulas.

    ``rows`` are the formulas of matrix rows 1..K, in basis row order
    (row 0 is the normalization).  ``slacks`` are explicit slack columns.
    """

    def __init__(self, atoms: Sequence[str], hard: Sequence[tuple[Formula, bool]], rows: Sequence[Formula], slacks=()):
        self.atoms = tuple(atoms)
        cnf = _CNFBuilder(self.atoms)
        for f, want in hard:
            cnf.require(f if want else Not(f))
        self.row_lits = [cnf.literal(f) for f in rows]
        self.num_vars = cnf.num_vars
        self.clauses = cnf.clauses
        self.slacks = tuple(slacks)
        self.sat_calls = 0

    def solve(self, assumptions: Sequence[int] = ()) -> list[bool] | None:
        self.sat_calls += 1
        stats.bump("sat_calls")
        return Solver(self.num_vars, self.clauses).solve(assumptions)

    def column(self, model: Sequence[bool]) -> Column:
        vec = (Fraction(1),) + tuple(Fraction(int(model[abs(l)] == (l > 0))) for l in self.row_lits)
        label = frozenset(a for i, a in enumerate(self.atoms, start=1) if model[i])
        return Column(vec, Fraction(0), label, "point", (1, tuple(sorted(label))))

    def match(self, vector: Sequence[Fraction]) -> Column | None:
        """A valuation column equal to ``vector``, if one exists."""
        assumptions = [l if x == 1 else -l for l, x in zip(self.row_lits, vector[1:])]
        model = self.solve(assumptions)
        return None if model is None else self.column(model)

    def __call__(self, basis: Basis) -> Column | None:
        y = basis.duals()
        for col in self.slacks:
            if col.cost - dot(y, col.vector) < 0 and not basis.contains(col):
                return col
        order = sorted((r for r in range(1, len(y)) if y[r] != 0), key=lambda r: -abs(y[r]))
        tail = [Fraction(0)] * (len(order) + 1)
        for d in range(len(order) - 1, -1, -1):
            tail[d] = tail[d + 1] + max(y[order[d]], Fraction(0))

        def search(assumptions: list[int], depth: int, partial: Fraction) -> Column | None:
            if partial + tail[depth] <= 0:
                return None
            model = self.solve(assumptions)
            if model is None:
                return None
            col = self.column(model)
            if dot(y, col.vector) > 0:
                return col
            if depth == len(order):
                return None
            r = order[depth]
            lit = self.row_lits[r - 1]
            first = y[r] > 0
            for truth in (first, not first):
                found = search(assumptions + [lit if truth else -lit], depth + 1, partial + (y[r] if truth else 0))
                if found is not None:
                    return found
            return None

        return search([], 0, y[0])


def _split(instance: PSATInstance):
    hard = []
    rows = []
    for c in instance.constraints:
        want = c.forced()
        if want is None:
            rows.append(c)
        else:
            hard.append((c.formula, want))
    # descending bounds keep the upper-triangular start feasible
    rows.sort(key=lambda c: -c.bound)
    return hard, rows


def slack_columns(relations: Sequence[str]) -> list[Column]:
    """Slack (``<=``) and surplus (``>=``) columns for rows 1..K; row 0 is the normalization."""
    m = len(relations) + 1
    cols = []
    for r, rel in enumerate(relations, start=1):
        if rel == "=":
            continue
        sign = Fraction(1) if rel == "<=" else Fraction(-1)
        vec = tuple(sign if i == r else Fraction(0) for i in range(m))
        cols.append(Column(vec, Fraction(0), ("slack", r), "slack", (0, m + r)))
    return cols


def initial_basis(rhs: Sequence[Fraction], match) -> Basis:
    """``U_m`` with cost 0 on columns that ``match`` identifies as valid points, 1 elsewhere."""
    m = len(rhs)
    cols = []
    for j in range(m):
        vec = tuple(Fraction(int(i <= j)) for i in range(m))
        found = match(vec)
        if found is not None:
            cols.append(Column(vec, Fraction(0), found.label, "point", (0, j)))
        else:
            cols.append(Column(vec, Fraction(1), ("U", j), "initial", (0, j)))
    return Basis(cols, rhs)


def column_oracle_psat(basis: Basis, instance: PSATInstance, pricer: PSATPricer | None = None) -> Column | None:
    """One pricing step for ``instance`` at ``basis`` (rows in descending-bound order)."""
    if pricer is None:
        hard, rows = _split(instance)
        pricer = PSATPricer(instance.atoms, hard, [c.formula for c in rows], slack_columns([c.relation for c in rows]))
    return pricer(basis)


def _solve_column_generation(instance: PSATInstance) -> PSATResult:
    hard, rows = _split(instance)
    pricer = PSATPricer(instance.atoms, hard, [c.formula for c in rows], slack_columns([c.relation for c in rows]))
    rhs = [Fraction(1)] + [c.bound for c in rows]
    basis = initial_basis(rhs, pricer.match)
    result = minimize_with_pricing(basis, pricer, rule="lexicographic")
    history = tuple(result.history)
    if result.objective != 0:
        return PSATResult(False, (), result.iterations, history)
    witness: dict[Valuation, Fraction] = {}
    for col, value in result.basis.support():
        if col.kind == "point":
            witness[col.label] = witness.get(col.label, Fraction(0)) + value
    return PSATResult(True, tuple(witness.items()), result.iterations, history)
