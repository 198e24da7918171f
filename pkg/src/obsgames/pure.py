"""Pure Nash equilibria by exhaustive best-response checking.

This is the ground truth every other solver in the package is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import stats
from .errors import ResourceLimitError
from .game import Game, Profile

DEFAULT_PROFILE_CAP = 10**7


@dataclass(frozen=True)
class PureEquilibriumSet:
    profiles: tuple[Profile, ...]
    game_fingerprint: str

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)

    def __contains__(self, profile) -> bool:
        return tuple(profile) in self.profiles


def best_responses(game: Game, player: str, profile: Sequence[str]) -> frozenset[str]:
    """All actions of ``player`` maximizing its utility with the other coordinates fixed."""
    profile = list(game.check_profile(profile))
    i = game.player_index[player]
    values = {}
    for a in game.actions[player]:
        profile[i] = a
        values[a] = game.utility(player, profile)
    top = max(values.values())
    return frozenset(a for a, v in values.items() if v == top)


def is_pure_equilibrium(game: Game, profile: Sequence[str]) -> bool:
    profile = game.check_profile(profile)
    return all(profile[i] in best_responses(game, p, profile) for i, p in enumerate(game.players))


def best_response_table(game: Game, player: str) -> dict[tuple[str, ...], tuple[str, ...]]:
    """Best responses of ``player`` for every neighborhood action tuple.

    Keys are neighbor actions in player order; values keep action order.
    """
    scope = game.scope(player)
    pos = scope.index(player)
    table = game.utilities[player]
    out = {}
    for nb_key in itertools.product(*(game.actions[q] for q in game.neighbors[player])):
        vals = [table[nb_key[:pos] + (a,) + nb_key[pos:]] for a in game.actions[player]]
        top = max(vals)
        out[nb_key] = tuple(a for a, v in zip(game.actions[player], vals) if v == top)
    return out


def enumerate_pure_equilibria(game: Game, cap: int = DEFAULT_PROFILE_CAP) -> PureEquilibriumSet:
    """Every pure equilibrium, in lexicographic action-index order."""
    if game.profile_count > cap:
        raise ResourceLimitError(f"{game.profile_count} action profiles exceed the cap of {cap}")
    idx = game.player_index
    checks = []
    for p in game.players:
        br = {k: frozenset(v) for k, v in best_response_table(game, p).items()}
        checks.append((idx[p], tuple(idx[q] for q in game.neighbors[p]), br))
    found = []
    for profile in game.profiles():
        if all(profile[i] in br[tuple(profile[j] for j in nb)] for i, nb, br in checks):
            found.append(profile)
    stats.bump("equilibria", len(found))
    return PureEquilibriumSet(tuple(found), game.fingerprint())
