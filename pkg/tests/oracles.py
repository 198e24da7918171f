"""Independent reference implementations used only by the tests.

Nothing here calls the package's solvers.  Pure equilibria are checked
against every unilateral deviation, and LPs are solved by listing every
basic solution with a separate Gaussian elimination.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from obsgames.formula import And, Atom, Implies, Not, Or, ProbConstraint
from obsgames.game import Game


def random_game(rng: random.Random, n: int, s: int, k: int, values=(0, 3)) -> Game:
    players = tuple(f"q{i}" for i in range(n))
    actions = {p: [f"{p}x{j}" for j in range(rng.randint(2, s) if s > 1 else 1)] for p in players}
    neighbors, tables = {}, {}
    for p in players:
        others = [q for q in players if q != p]
        neighbors[p] = rng.sample(others, rng.randint(0, min(k, len(others))))
        scope = [q for q in players if q == p or q in neighbors[p]]
        tables[p] = {key: Fraction(rng.randint(*values)) for key in itertools.product(*(actions[q] for q in scope))}
    return Game(players, actions, neighbors, tables)


def brute_force_equilibria(game: Game) -> set[tuple[str, ...]]:
    found = set()
    for profile in itertools.product(*(game.actions[p] for p in game.players)):
        stable = True
        for i, p in enumerate(game.players):
            here = game.utility(p, profile)
            for alt in game.actions[p]:
                dev = profile[:i] + (alt,) + profile[i + 1:]
                if game.utility(p, dev) > here:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.add(profile)
    return found


def random_formula(rng: random.Random, atoms, depth: int = 2):
    if depth == 0 or rng.random() < 0.35:
        return Atom(rng.choice(atoms))
    kind = rng.choice(("not", "and", "or", "implies"))
    if kind == "not":
        return Not(random_formula(rng, atoms, depth - 1))
    left, right = random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1)
    if kind == "and":
        return And((left, right))
    if kind == "or":
        return Or((left, right))
    return Implies(left, right)


def random_bound(rng: random.Random, grid: int = 8) -> Fraction:
    return Fraction(rng.randint(0, grid), grid)


# -- linear programming by vertex enumeration ----------------------------------


def _solve_exact(columns, rhs):
    """Unique solution of sum_j x_j columns[j] = rhs, or None."""
    m, n = len(rhs), len(columns)
    rows = [[columns[j][i] for j in range(n)] + [rhs[i]] for i in range(m)]
    r, pivots = 0, []
    for c in range(n):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            return None  # dependent columns
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][n] != 0 for i in range(r, m)):
        return None
    return [rows[i][n] for i in range(n)]


def _standard(matrix, bounds, relations):
    m = len(bounds)
    cols = [tuple(matrix[i][j] for i in range(m)) for j in range(len(matrix[0]))]
    npoints = len(cols)
    for r, rel in enumerate(relations):
        if rel != "=":
            sign = 1 if rel == "<=" else -1
            cols.append(tuple(Fraction(sign if i == r else 0) for i in range(m)))
    return cols, npoints


def vertices(matrix, bounds, relations):
    """Every basic feasible solution, restricted to the original columns."""
    cols, npoints = _standard(matrix, bounds, relations)
    m = len(bounds)
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(len(cols)), size):
            x = _solve_exact([cols[j] for j in subset], bounds)
            if x is None or any(v < 0 for v in x):
                continue
            full = [Fraction(0)] * npoints
            for j, v in zip(subset, x):
                if j < npoints:
                    full[j] = v
            yield full


def lp_feasible(matrix, bounds, relations) -> bool:
    if not matrix[0]:
        return False
    return next(vertices(matrix, bounds, relations), None) is not None


def lp_optimum(matrix, bounds, relations, objective, sense="max"):
    values = [sum(c * x for c, x in zip(objective, v)) for v in vertices(matrix, bounds, relations)]
    if not values:
        return None
    return max(values) if sense == "max" else min(values)


def pure_matrix(equilibria, constraints):
    eqs = [set(e) for e in equilibria]
    matrix = [[Fraction(1)] * len(eqs)] + [[Fraction(int(c.formula.holds(e))) for e in eqs] for c in constraints]
    bounds = [Fraction(1)] + [c.bound for c in constraints]
    relations = ["="] + [c.relation for c in constraints]
    return matrix, bounds, relations


def coherent_constraints(rng: random.Random, game: Game, equilibria, count: int, formulas: bool = True):
    """Constraints that a random distribution over ``equilibria`` satisfies, so the instance is coherent."""
    eqs = list(equilibria)
    chosen = rng.sample(eqs, rng.randint(1, min(len(eqs), 3)))
    weights = [rng.randint(1, 4) for _ in chosen]
    total = sum(weights)
    dist = [(set(e), Fraction(w, total)) for e, w in zip(chosen, weights)]
    out = []
    for _ in range(count):
        atoms = list(game.all_actions)
        f = random_formula(rng, atoms) if formulas else Atom(rng.choice(atoms))
        prob = sum((p for e, p in dist if f.holds(e)), Fraction(0))
        rel = rng.choice(("=", "<=", ">="))
        if rel == "<=":
            bound = min(Fraction(1), prob + Fraction(rng.randint(0, 2), 8))
        elif rel == ">=":
            bound = max(Fraction(0), prob - Fraction(rng.randint(0, 2), 8))
        else:
            bound = prob
        out.append(ProbConstraint(f, rel, bound))
    return out
