"""Exact revised simplex with pluggable column pricing.

Everything here is rational arithmetic.  A :class:`Basis` keeps an explicit
inverse that is updated per pivot and rebuilt from scratch every
``REFRESH_EVERY`` pivots.  :func:`minimize_with_pricing` drives a basis with
an arbitrary pricing oracle, which is how column generation plugs in;
:func:`solve_feasibility` and :func:`optimize` run the classic two-phase
method over an explicit column pool with Bland's rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from . import stats
from .exact import dot, identity, invert, mat_vec

RELATIONS = ("<=", ">=", "=")
ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class ConstraintSystem:
    """``A pi (rel) p`` with ``pi >= 0``; row 0 is the normalization ``sum pi = 1``.

    ``column_kinds`` marks each column as a support ``"point"`` or a
    ``"slack"``.  Only point columns carry probability mass, so the
    normalization row has ones exactly on point columns.
    """

    matrix: list[list[Fraction]]
    bounds: list[Fraction]
    relations: list[str]
    row_labels: list[str] = field(default_factory=list)
    column_labels: list[Hashable] = field(default_factory=list)
    column_kinds: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.matrix = [[Fraction(x) for x in row] for row in self.matrix]
        self.bounds = [Fraction(b) for b in self.bounds]
        self.relations = list(self.relations)
        if not (len(self.matrix) == len(self.bounds) == len(self.relations)):
            raise ValueError("matrix, bounds and relations disagree on the number of rows")
        if not self.matrix:
            raise ValueError("a constraint system needs at least the normalization row")
        ncols = len(self.matrix[0])
        if any(len(row) != ncols for row in self.matrix):
            raise ValueError("ragged matrix")
        bad = [r for r in self.relations if r not in RELATIONS]
        if bad:
            raise ValueError(f"unknown relation {bad[0]!r}")
        if not self.column_kinds:
            self.column_kinds = ["point"] * ncols
        if not self.column_labels:
            self.column_labels = list(range(ncols))
        if not self.row_labels:
            self.row_labels = ["sum"] + [f"row{i}" for i in range(1, len(self.matrix))]
        if len(self.column_kinds) != ncols or len(self.column_labels) != ncols:
            raise ValueError("column metadata length mismatch")
        if len(self.row_labels) != len(self.matrix):
            raise ValueError("row label length mismatch")
        norm = self.matrix[0]
        if self.relations[0] != "=" or self.bounds[0] != 1 or any(
            x != (1 if kind == "point" else 0) for x, kind in zip(norm, self.column_kinds)
        ):
            raise ValueError("row 0 must be the normalization row sum(pi) = 1")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.matrix[0])

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.matrix)

    def point_columns(self) -> list[int]:
        return [j for j, k in enumerate(self.column_kinds) if k == "point"]

    def check(self, pi: Sequence[Fraction]) -> bool:
        """Exact check of ``A pi (rel) p`` and ``pi >= 0`` for a vector over all columns."""
        if len(pi) != self.shape[1] or any(x < 0 for x in pi):
            return False
        for row, rel, b in zip(self.matrix, self.relations, self.bounds):
            lhs = dot(row, pi)
            if not {"<=": lhs <= b, ">=": lhs >= b, "=": lhs == b}[rel]:
                return False
        return True


def to_standard_form(system: ConstraintSystem) -> ConstraintSystem:
    """Turn inequality rows into equalities with one slack or surplus column each."""
    nrows, ncols = system.shape
    matrix = [list(row) for row in system.matrix]
    labels = list(system.column_labels)
    kinds = list(system.column_kinds)
    for r, rel in enumerate(system.relations):
        if rel == "=":
            continue
        sign = ONE if rel == "<=" else -ONE
        for i in range(nrows):
            matrix[i].append(sign if i == r else ZERO)
        labels.append(("slack", r))
        kinds.append("slack")
    return ConstraintSystem(
        matrix, list(system.bounds), ["="] * nrows, list(system.row_labels), labels, kinds
    )


# -- basis machinery -----------------------------------------------------


@dataclass(frozen=True)
class Column:
    vector: tuple[Fraction, ...]
    cost: Fraction = ZERO
    label: Hashable = None
    kind: str = "point"  # point | slack | initial | artificial
    key: tuple = ()


class InfeasibleBasis(ValueError):
    pass


class Unbounded(ArithmeticError):
    pass


class Basis:
    REFRESH_EVERY = 32

    def __init__(
        self,
        columns: Sequence[Column],
        rhs: Sequence[Fraction],
        *,
        inverse: list[list[Fraction]] | None = None,
        pivots: int = 0,
    ):
        self.columns = tuple(columns)
        self.rhs = tuple(Fraction(x) for x in rhs)
        m = len(self.rhs)
        if len(self.columns) != m:
            raise ValueError(f"basis needs {m} columns, got {len(self.columns)}")
        self.pivots = pivots
        if inverse is None or pivots % self.REFRESH_EVERY == 0:
            inverse = invert([[c.vector[r] for c in self.columns] for r in range(m)])
        self.inverse = inverse
        self.values = tuple(mat_vec(inverse, self.rhs))
        if any(v < 0 for v in self.values):
            raise InfeasibleBasis("basic solution has a negative component")

    @classmethod
    def upper_triangular(cls, rhs: Sequence[Fraction], costs: Sequence[Fraction], labels=None) -> "Basis":
        """``U_m``: ones on and above the diagonal.  Feasible iff rhs is non-increasing and >= 0."""
        m = len(rhs)
        cols = []
        for j in range(m):
            vec = tuple(ONE if i <= j else ZERO for i in range(m))
            label = labels[j] if labels else ("U", j)
            cols.append(Column(vec, Fraction(costs[j]), label, "initial", (0, j)))
        return cls(cols, rhs)

    @property
    def size(self) -> int:
        return len(self.rhs)

    @property
    def objective(self) -> Fraction:
        return sum((c.cost * v for c, v in zip(self.columns, self.values)), ZERO)

    def duals(self) -> list[Fraction]:
        """``c_B B^-1``."""
        m = self.size
        y = [ZERO] * m
        for c, row in zip(self.columns, self.inverse):
            if c.cost:
                for r in range(m):
                    if row[r]:
                        y[r] += c.cost * row[r]
        return y

    def reduced_cost(self, column: Column, duals: Sequence[Fraction] | None = None) -> Fraction:
        y = self.duals() if duals is None else duals
        return column.cost - dot(y, column.vector)

    def direction(self, column: Column) -> list[Fraction]:
        return mat_vec(self.inverse, column.vector)

    def contains(self, column: Column) -> bool:
        return any(c.key == column.key and c.label == column.label for c in self.columns)

    def replace(self, position: int, column: Column, direction: Sequence[Fraction] | None = None) -> "Basis":
        d = self.direction(column) if direction is None else direction
        piv = d[position]
        if piv == 0:
            raise ValueError("pivot element is zero")
        m = self.size
        new_row = [x / piv for x in self.inverse[position]]
        inverse = []
        for k in range(m):
            if k == position:
                inverse.append(new_row)
            elif d[k]:
                f = d[k]
                inverse.append([a - f * b for a, b in zip(self.inverse[k], new_row)])
            else:
                inverse.append(list(self.inverse[k]))
        cols = list(self.columns)
        cols[position] = column
        return Basis(cols, self.rhs, inverse=inverse, pivots=self.pivots + 1)

    def support(self) -> list[tuple[Column, Fraction]]:
        return [(c, v) for c, v in zip(self.columns, self.values) if v != 0]


def merge(basis: Basis, column: Column, rule: str = "bland") -> Basis:
    """Bring ``column`` into the basis by a ratio test, keeping the solution feasible.

    ``rule`` breaks ratio ties: ``"bland"`` evicts the smallest column key,
    ``"lexicographic"`` compares rows of the inverse (valid from a
    lexicographically positive start such as ``U_m``).
    """
    if basis.reduced_cost(column) > 0:
        raise ValueError("entering column has positive reduced cost; it cannot lower the objective")
    d = basis.direction(column)
    candidates = [k for k in range(basis.size) if d[k] > 0]
    if not candidates:
        raise Unbounded("entering column gives an unbounded ray")
    best = min(basis.values[k] / d[k] for k in candidates)
    ties = [k for k in candidates if basis.values[k] / d[k] == best]
    if rule == "bland":
        leave = min(ties, key=lambda k: basis.columns[k].key)
    elif rule == "lexicographic":
        leave = min(ties, key=lambda k: [x / d[k] for x in basis.inverse[k]])
    else:
        raise ValueError(f"unknown pivot rule {rule!r}")
    stats.bump("lp_pivots")
    return basis.replace(leave, column, d)


Oracle = Callable[[Basis], "Column | None"]


@dataclass
class PricingResult:
    status: str  # "zero": objective reached 0; "exhausted": oracle found no improving column
    basis: Basis
    history: list[Fraction]

    @property
    def objective(self) -> Fraction:
        return self.basis.objective

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self.basis.values

    @property
    def iterations(self) -> int:
        return len(self.history) - 1


def minimize_with_pricing(
    initial_basis: Basis,
    oracle: Oracle,
    *,
    rule: str = "bland",
    stop_at_zero: bool = True,
    max_iterations: int = 1_000_000,
) -> PricingResult:
    """Column-generation loop: price, merge, repeat.

    Stops when the objective reaches zero (if ``stop_at_zero``; sensible when
    all costs are non-negative) or when the oracle returns None.
    """
    basis = initial_basis
    history = [basis.objective]
    for _ in range(max_iterations):
        if stop_at_zero and basis.objective == 0:
            return PricingResult("zero", basis, history)
        stats.bump("pricing_calls")
        column = oracle(basis)
        if column is None:
            return PricingResult("exhausted", basis, history)
        basis = merge(basis, column, rule)
        history.append(basis.objective)
    raise RuntimeError("simplex iteration limit reached")


def pool_oracle(pool: Sequence[Column], *, strict: bool = True) -> Oracle:
    """Bland pricing over an explicit pool: the smallest-key column with negative reduced cost."""
    ordered = sorted(pool, key=lambda c: c.key)

    def price(basis: Basis) -> Column | None:
        y = basis.duals()
        for col in ordered:
            rc = col.cost - dot(y, col.vector)
            if (rc < 0 if strict else rc <= 0) and not basis.contains(col):
                return col
        return None

    return price


# -- two-phase solves over explicit systems ---------------------------------


@dataclass
class LPSolution:
    x: tuple[Fraction, ...]  # over the original system's columns
    value: Fraction
    basis: Basis


def _phase_one(std: ConstraintSystem) -> tuple[Basis, list[Column]] | None:
    nrows, ncols = std.shape
    matrix = [list(row) for row in std.matrix]
    rhs = list(std.bounds)
    for r in range(nrows):
        if rhs[r] < 0:
            matrix[r] = [-x for x in matrix[r]]
            rhs[r] = -rhs[r]
    real = [
        Column(tuple(matrix[r][j] for r in range(nrows)), ZERO, j, std.column_kinds[j], (j,))
        for j in range(ncols)
    ]
    eye = identity(nrows)
    artificial = [Column(tuple(eye[r]), ONE, ("art", r), "artificial", (ncols + r,)) for r in range(nrows)]
    result = minimize_with_pricing(Basis(artificial, rhs), pool_oracle(real))
    if result.objective != 0:
        return None
    basis = result.basis
    # pivot zero-level artificials out wherever a real column can take their row
    for pos in range(basis.size):
        if basis.columns[pos].kind != "artificial":
            continue
        for col in real:
            if basis.contains(col):
                continue
            d = basis.direction(col)
            if d[pos] != 0:
                basis = basis.replace(pos, col, d)
                break
    return basis, real


def solve_feasibility(system: ConstraintSystem) -> tuple[Fraction, ...] | None:
    """A basic feasible ``pi`` over the system's columns, or None if infeasible.

    Basic solutions have at most one nonzero per row.
    """
    std = to_standard_form(system)
    found = _phase_one(std)
    if found is None:
        return None
    basis, _ = found
    return _extract(basis, system.shape[1])


def optimize(system: ConstraintSystem, objective: Sequence[Fraction], sense: str = "max") -> LPSolution | None:
    """Optimize ``objective . pi`` over the system; None when infeasible."""
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    std = to_standard_form(system)
    found = _phase_one(std)
    if found is None:
        return None
    basis, real = found
    ncols = system.shape[1]
    sign = -1 if sense == "max" else 1

    def cost(col: Column) -> Fraction:
        if col.kind == "artificial" or col.label >= ncols:
            return ZERO
        return sign * Fraction(objective[col.label])

    def recost(col: Column) -> Column:
        return Column(col.vector, cost(col), col.label, col.kind, col.key)

    start = Basis([recost(c) for c in basis.columns], basis.rhs)
    result = minimize_with_pricing(start, pool_oracle([recost(c) for c in real]), stop_at_zero=False)
    x = _extract(result.basis, ncols)
    return LPSolution(x, dot(x, objective), result.basis)


def _extract(basis: Basis, ncols: int) -> tuple[Fraction, ...]:
    x = [ZERO] * ncols
    for col, v in zip(basis.columns, basis.values):
        if col.kind != "artificial" and isinstance(col.label, int) and col.label < ncols:
            x[col.label] = v
    return tuple(x)
