import random
from fractions import Fraction as F

import pytest

from obsgames.errors import ResourceLimitError
from obsgames.formula import Atom, ProbConstraint, parse_formula
from obsgames.psat import (
    PSATInstance,
    _CNFBuilder,
    check_witness,
    formula_probability,
    parse_psat,
    psat_satisfiable,
)
from obsgames.sat import Solver
from oracles import random_bound, random_formula


def test_parse_and_solve():
    inst = parse_psat("P(x) = 1/2\nP(y) = 1/2\nP(x & y) = 0\n")
    for strategy in ("enumerate", "column-generation"):
        res = psat_satisfiable(inst, strategy)
        assert res.satisfiable and check_witness(inst, res.witness)
    bad = parse_psat("P(x) = 3/4\nP(y) = 3/4\nP(x & y) = 0\n")
    for strategy in ("enumerate", "column-generation"):
        assert not psat_satisfiable(bad, strategy).satisfiable


def test_forced_unsatisfiable_formula():
    inst = parse_psat("P(x & !x) = 1\n")
    for strategy in ("enumerate", "column-generation"):
        assert not psat_satisfiable(inst, strategy).satisfiable


def test_atom_cap():
    inst = PSATInstance.from_constraints([ProbConstraint(Atom(f"v{i}"), ">=", F(0)) for i in range(21)])
    with pytest.raises(ResourceLimitError):
        psat_satisfiable(inst, "enumerate")
    assert psat_satisfiable(inst, "column-generation").satisfiable


def test_unknown_strategy():
    with pytest.raises(ValueError):
        psat_satisfiable(parse_psat("P(x) = 1"), "magic")


def test_undeclared_atoms_rejected():
    with pytest.raises(ValueError):
        PSATInstance((ProbConstraint(Atom("x"), "=", F(1)),), ("y",))


@pytest.mark.parametrize("seed", range(40))
def test_tseitin_literal_is_equivalent(seed):
    rng = random.Random(seed)
    atoms = ["p", "q", "r"]
    f = random_formula(rng, atoms, 3)
    for truth in (True, False):
        cnf = _CNFBuilder(atoms)
        lit = cnf.literal(f)
        # every valuation of the atoms extends to a model exactly when f has the requested value
        for bits in range(8):
            assume = [(i + 1) if bits >> i & 1 else -(i + 1) for i in range(3)]
            true_atoms = {a for i, a in enumerate(atoms) if bits >> i & 1}
            model = Solver(cnf.num_vars, cnf.clauses).solve(assume + [lit if truth else -lit])
            assert (model is not None) == (f.holds(true_atoms) == truth)


def _random_instance(rng):
    atoms = [f"v{i}" for i in range(rng.randint(1, 8))]
    constraints = []
    for _ in range(rng.randint(1, 5)):
        f = random_formula(rng, atoms, rng.randint(0, 3))
        constraints.append(ProbConstraint(f, rng.choice(("=", "<=", ">=")), random_bound(rng, 4)))
    return PSATInstance.from_constraints(constraints, atoms)


@pytest.mark.parametrize("seed", range(200))
def test_strategies_agree(seed):
    inst = _random_instance(random.Random(seed))
    a = psat_satisfiable(inst, "enumerate")
    b = psat_satisfiable(inst, "column-generation")
    assert a.satisfiable == b.satisfiable
    for res in (a, b):
        if res.satisfiable:
            assert sum(p for _, p in res.witness) == 1
            assert check_witness(inst, res.witness)
            nonforced = sum(1 for c in inst.constraints if c.forced() is None)
            assert len(res.witness) <= nonforced + 1
    assert all(x >= y for x, y in zip(b.history, b.history[1:]))


def test_formula_probability():
    w = [(frozenset({"x"}), F(1, 3)), (frozenset({"x", "y"}), F(2, 3))]
    assert formula_probability(w, parse_formula("y")) == F(2, 3)
    assert formula_probability(w, parse_formula("x | !x")) == 1
