"""Exact solvers for probabilistic constraints on Nash equilibria."""

from .coherence import (
    CoherenceResult,
    CoherenceWitness,
    ObservableGame,
    PCEConstraint,
    action_probability,
    build_pure_system,
    decide_pure_coherence,
    parse_observable,
    reduce_to_psat,
)
from .errors import (
    GameValidationError,
    IncoherentBase,
    ObsGamesError,
    ParseError,
    ResourceLimitError,
    UnsupportedFeature,
)
from .extension import ExtensionQuery, extension_binary_search, extension_exact
from .formula import ProbConstraint, parse_constraints, parse_formula
from .game import Game, add_universal_action, parse_game, serialize_game
from .mixed import (
    MixedProfile,
    MixedStrategy,
    build_mixed_system,
    decide_mixed_coherence,
    enumerate_mixed_equilibria_2p,
    expected_utility,
    is_mixed_equilibrium,
)
from .psat import PSATInstance, parse_psat, psat_satisfiable
from .pure import enumerate_pure_equilibria, is_pure_equilibrium
from .sat import decode_model, encode_game, enumerate_models, export_dimacs, sat_solve

__version__ = "0.1.0"
