"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import contextlib
import itertools
import random
import time
from fractions import Fraction as F

import pytest

from obsgames.bench import SweepConfig, generate_instance, run_sweep
from obsgames.coherence import ObservableGame, action_probability, decide_pure_coherence, parse_observable
from obsgames.extension import ExtensionQuery, extension_binary_search, extension_exact
from obsgames.formula import Atom, ProbConstraint, parse_formula
from obsgames.game import add_universal_action, serialize_game
from obsgames.mixed import (
    MixedProfile,
    MixedStrategy,
    action_payoffs,
    decide_mixed_coherence,
    enumerate_mixed_equilibria_2p,
    is_mixed_equilibrium,
)
from obsgames.pure import enumerate_pure_equilibria
from obsgames.sat import encode_game, enumerate_models
from oracles import (
    brute_force_equilibria,
    coherent_constraints,
    lp_feasible,
    lp_optimum,
    pure_matrix,
    random_formula,
    random_game,
)

G2_EQUILIBRIA = {
    ("a1", "b1", "c1"),
    ("a2", "b2", "c2"),
    ("a3", "b3", "c3"),
    ("a2", "b1", "c1"),
    ("a2", "b2", "c1"),
}


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def report(number, title):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\ncriterion {number:2d} FAIL  {title}")
            raise
        with capsys.disabled():
            print(f"\ncriterion {number:2d} PASS  {title} ({time.perf_counter() - start:.2f}s)")

    return report


def check_exact_witness(obs, witness):
    for c in obs.constraints:
        assert c.satisfied_by(action_probability(witness, c.formula))


def test_01_pure_enumeration(criterion, table1, g2):
    with criterion(1, "pure enumeration goldens"):
        start = time.perf_counter()
        assert set(enumerate_pure_equilibria(table1)) == {("a1", "b1"), ("a2", "b3"), ("a3", "b3")}
        assert set(enumerate_pure_equilibria(g2)) == G2_EQUILIBRIA
        assert time.perf_counter() - start < 1


def test_02_cnf_golden(criterion, g2):
    with criterion(2, "CNF golden for G2"):
        enc = encode_game(g2)

        def c(*names):
            return frozenset(-enc.var(n[1:]) if n.startswith("-") else enc.var(n) for n in names)

        groups = {tag: {frozenset(x) for x in enc.tagged(tag)} for tag in "abc"}
        assert groups["a"] == {c("a1", "a2", "a3"), c("b1", "b2", "b3"), c("c1", "c2", "c3")}
        assert groups["b"] == {
            c(f"-{p}{i}", f"-{p}{j}") for p in "abc" for i, j in itertools.combinations((1, 2, 3), 2)
        }
        assert groups["c"] == {
            c("-c1", "a1", "a2"), c("-c2", "a2"), c("-c3", "a3"),
            c("-a1", "b1"), c("-a2", "b1", "b2"), c("-a3", "b3"),
            c("-b1", "c1"), c("-b2", "c1", "c2"), c("-b3", "c3"),
        }
        assert [len(enc.tagged(t)) for t in "abc"] == [3, 9, 9] and len(enc.clauses) == 21


def test_03_sat_matches_brute_force(criterion):
    with criterion(3, "SAT enumeration equals brute force on 100 games"):
        start = time.perf_counter()
        for seed in range(100):
            rng = random.Random(f"sat:{seed}")
            game = random_game(rng, rng.randint(1, 4), 3, 2)
            assert set(enumerate_models(encode_game(game))) == brute_force_equilibria(game), seed
        assert time.perf_counter() - start < 10


def _golden_coherence(g2, table1, data_dir):
    marginals = parse_observable(g2, (data_dir / "g2_marginals.pce").read_text())
    table1_pure = parse_observable(table1, "P(a2) = 1/3\nP(b3) = 1/4\n")
    table1_mixed = ObservableGame(table1, table1_pure.constraints, "mixed")
    return marginals, table1_pure, table1_mixed


def test_04_coherence_goldens(criterion, g2, table1, data_dir):
    with criterion(4, "coherence goldens"):
        marginals, table1_pure, table1_mixed = _golden_coherence(g2, table1, data_dir)
        for path in ("direct", "psat", "cg"):
            r4 = decide_pure_coherence(marginals, path)
            assert r4.coherent
            # equality rows must hold exactly, inequality rows as stated
            check_exact_witness(marginals, r4.witness)
            for c in marginals.constraints:
                if c.relation == "=":
                    assert action_probability(r4.witness, c.formula) == c.bound
            assert decide_pure_coherence(table1_pure, path).verdict == "incoherent"
        for method in ("direct", "column-generation"):
            r7 = decide_mixed_coherence(table1_mixed, method)
            assert r7.coherent
            assert [action_probability(r7.witness, c.formula) for c in table1_mixed.constraints] == [F(1, 3), F(1, 4)]


def test_05_caratheodory(criterion, g2, table1, data_dir):
    with criterion(5, "witness support at most K+1"):
        marginals, _, table1_mixed = _golden_coherence(g2, table1, data_dir)
        witnesses = [(marginals, decide_pure_coherence(marginals, p).witness) for p in ("direct", "psat", "cg")]
        witnesses += [(table1_mixed, decide_mixed_coherence(table1_mixed, m).witness) for m in ("direct", "column-generation")]
        produced = 0
        seed = 0
        while produced < 200:
            rng = random.Random(f"cara:{seed}")
            seed += 1
            game = random_game(rng, rng.randint(1, 3), 3, 2)
            eqs = sorted(brute_force_equilibria(game))
            if not eqs:
                continue
            obs = ObservableGame(game, tuple(coherent_constraints(rng, game, eqs, rng.randint(0, 4))))
            for path in ("direct", "psat", "cg"):
                result = decide_pure_coherence(obs, path)
                assert result.coherent
                witnesses.append((obs, result.witness))
            produced += 1
        for obs, w in witnesses:
            check_exact_witness(obs, w)
            assert len(w) <= obs.K + 1


def test_06_extension_goldens(criterion, g2, table1, data_dir):
    with criterion(6, "extension goldens"):
        g2_a2 = parse_observable(g2, (data_dir / "g2_a2.pce").read_text())
        query = ExtensionQuery(g2_a2, parse_formula("b2"), "max", F(1, 64))
        found = extension_binary_search(query)
        assert found.value == F(57, 64) == F("0.890625")
        assert found.oracle_calls == 7
        assert found.pattern == ("No", "Yes", "Yes", "Yes", "No", "No", "Yes")
        assert extension_exact(query).value == F(9, 10)
        base = parse_observable(table1, "P(a2) = 1/3\n")
        assert extension_exact(ExtensionQuery(base, parse_formula("b3"), "min")).value == F(1, 3)


def test_07_binary_search_sandwich(criterion):
    with criterion(7, "binary search sandwich on 100 instances"):
        for seed in range(100):
            rng = random.Random(f"sandwich:{seed}")
            while True:
                game = random_game(rng, rng.randint(1, 3), 3, 2)
                eqs = sorted(brute_force_equilibria(game))
                if eqs:
                    break
            obs = ObservableGame(game, tuple(coherent_constraints(rng, game, eqs, rng.randint(0, 3))))
            target = random_formula(rng, list(game.all_actions))
            k = rng.randint(1, 8)
            eps = F(1, 2**k)
            matrix, bounds, rels = pure_matrix(eqs, obs.constraints)
            objective = [F(int(target.holds(set(e)))) for e in eqs]
            direction = rng.choice(("max", "min"))
            query = ExtensionQuery(obs, target, direction, eps)
            exact = lp_optimum(matrix, bounds, rels, objective, direction)
            assert extension_exact(query).value == exact
            found = extension_binary_search(query)
            gap = exact - found.value if direction == "max" else found.value - exact
            assert 0 <= gap < eps, seed
            assert found.oracle_calls <= k + 1
            relation = ">=" if direction == "max" else "<="
            assert decide_pure_coherence(obs.with_constraint(ProbConstraint(target, relation, found.value))).coherent


def test_08_mixed_equilibria(criterion, table1):
    with criterion(8, "mixed equilibrium verification"):
        e4 = MixedProfile((
            MixedStrategy("a", {"a1": F(2, 3), "a2": F(1, 3)}),
            MixedStrategy("b", {"b1": F(4, 5), "b2": F(1, 5)}),
        ))
        assert e4 in enumerate_mixed_equilibria_2p(table1)
        assert is_mixed_equilibrium(table1, e4)
        alice, bob = action_payoffs(table1, "a", e4), action_payoffs(table1, "b", e4)
        assert alice["a1"] == alice["a2"] == F(9, 5)
        assert bob["b1"] == bob["b2"] == F(2)
        for seed in range(100):
            rng = random.Random(f"mixed:{seed}")
            game = random_game(rng, 2, 3, 1, values=(0, 6))
            found = enumerate_mixed_equilibria_2p(game)
            points = {e.as_pure() for e in found if e.as_pure() is not None}
            assert points == brute_force_equilibria(game), seed
            assert all(is_mixed_equilibrium(game, e) for e in found)


def test_09_column_generation(criterion):
    with criterion(9, "column generation agrees with the direct LP"):
        for seed in range(100):
            rng = random.Random(f"cg:{seed}")
            game = random_game(rng, 2, 3, 1, values=(0, 6))
            constraints = [
                ProbConstraint(Atom(rng.choice(game.all_actions)), rng.choice(("<=", ">=", "=")), F(rng.randint(0, 8), 8))
                for _ in range(rng.randint(0, 3))
            ]
            obs = ObservableGame(game, tuple(constraints), "mixed")
            direct = decide_mixed_coherence(obs, "direct")
            cg = decide_mixed_coherence(obs, "column-generation")
            assert direct.verdict == cg.verdict, seed
            history = list(cg.history)
            assert all(b <= a for a, b in zip(history, history[1:])), seed
            profiles = list(enumerate_mixed_equilibria_2p(game))
            if profiles:
                matrix = [[F(1)] * len(profiles)] + [[e.probability(c.formula.name) for e in profiles] for c in constraints]
                bounds = [F(1)] + [c.bound for c in constraints]
                rels = ["="] + [c.relation for c in constraints]
                assert direct.coherent == lp_feasible(matrix, bounds, rels)


def test_10_universal_action(criterion):
    with criterion(10, "universal action adds exactly the <b, .> profiles"):
        for seed in range(50):
            rng = random.Random(f"universal:{seed}")
            game = random_game(rng, rng.randint(1, 4), 3, 2)
            star = add_universal_action(game)
            first = game.players[0]
            (b,) = set(star.actions[first]) - set(game.actions[first])
            rest = [game.actions[p] for p in game.players[1:]]
            extra = {(b,) + tail for tail in itertools.product(*rest)}
            assert set(enumerate_pure_equilibria(star)) == brute_force_equilibria(game) | extra, seed


def test_11_bench(criterion):
    with criterion(11, "bench determinism and monotone sweeps"):
        config = SweepConfig(n=3, s=2, k=2, K_values=(0, 1, 2, 3, 4, 6), instances=20, seed=7)
        stream = [serialize_game(generate_instance(config, i).game) for i in range(20)]
        again = [serialize_game(generate_instance(SweepConfig(**vars(config)), i).game) for i in range(20)]
        assert stream == again
        rows, rerun = run_sweep(config), run_sweep(config)
        assert [r.verdicts for r in rows] == [r.verdicts for r in rerun]
        fracs = [r.coherent_frac for r in rows]
        assert all(b <= a for a, b in zip(fracs, fracs[1:]))
        mixed = SweepConfig(n=2, s=3, k=1, K_values=(0, 1, 2, 3), instances=10, mode="mixed", utility_range=(0, 5))
        fracs = [r.coherent_frac for r in run_sweep(mixed)]
        assert all(b <= a for a, b in zip(fracs, fracs[1:]))
