"""Finite games in standard or graphical normal form.

A :class:`Game` stores one utility table per player, keyed by the local
action tuple over the player's scope (its neighbors plus itself, in global
player order).  Standard-form games are stored the same way with full
neighborhoods, so a single lookup path serves both forms.

Game file format (UTF-8, line oriented, ``#`` starts a comment)::

    game graphical            # or: game standard
    player a
    actions a1 a2 a3
    neighbors c               # graphical only; omit for an empty neighborhood
    u a1 c1 = 10              # one line per local action tuple
    ...
    player b
    ...

The tokens of a ``u`` line are action identifiers, one per scope player, in
any order; the value is an integer, ``p/q`` or decimal literal.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from .errors import GameValidationError, ParseError
from .exact import fmt, parse_rational

Profile = tuple[str, ...]

FORMS = ("standard", "graphical")


@dataclass(frozen=True, eq=False)
class Game:
    players: tuple[str, ...]
    actions: Mapping[str, tuple[str, ...]]
    neighbors: Mapping[str, tuple[str, ...]]
    utilities: Mapping[str, Mapping[tuple[str, ...], Fraction]]
    form: str = "graphical"

    def __post_init__(self) -> None:
        players = tuple(self.players)
        if len(set(players)) != len(players):
            raise GameValidationError("duplicate player identifier")
        if self.form not in FORMS:
            raise GameValidationError(f"unknown form tag {self.form!r}")
        order = {p: i for i, p in enumerate(players)}

        actions: dict[str, tuple[str, ...]] = {}
        owner: dict[str, str] = {}
        for p in players:
            acts = tuple(self.actions.get(p, ()))
            if not acts:
                raise GameValidationError(f"player {p!r} has no actions")
            for a in acts:
                if a in owner:
                    raise GameValidationError(
                        f"duplicate action id {a!r} (players {owner[a]!r} and {p!r})"
                    )
                owner[a] = p
            actions[p] = acts
        extra = set(self.actions) - set(players)
        if extra:
            raise GameValidationError(f"actions given for unknown players {sorted(extra)}")

        neighbors: dict[str, tuple[str, ...]] = {}
        for p in players:
            if self.form == "standard":
                nb = [q for q in players if q != p]
                given = self.neighbors.get(p)
                if given is not None and set(given) != set(nb):
                    raise GameValidationError(f"standard form requires full neighborhood for {p!r}")
            else:
                nb = list(self.neighbors.get(p, ()))
            if p in nb:
                raise GameValidationError(f"player {p!r} lists itself as a neighbor")
            for q in nb:
                if q not in order:
                    raise GameValidationError(f"unknown neighbor {q!r} of player {p!r}")
            if len(set(nb)) != len(nb):
                raise GameValidationError(f"duplicate neighbor for player {p!r}")
            neighbors[p] = tuple(sorted(nb, key=order.__getitem__))

        utilities: dict[str, Mapping[tuple[str, ...], Fraction]] = {}
        for p in players:
            table = self.utilities.get(p)
            if table is None:
                raise GameValidationError(f"missing utility table for player {p!r}")
            scope = tuple(sorted(neighbors[p] + (p,), key=order.__getitem__))
            expected = set(itertools.product(*(actions[q] for q in scope)))
            keys = set(table)
            if keys != expected:
                missing = expected - keys
                if missing:
                    raise GameValidationError(
                        f"utility table of {p!r} is not total; missing {sorted(missing)[0]}"
                    )
                raise GameValidationError(
                    f"utility table of {p!r} has entries outside its scope, e.g. {sorted(keys - expected)[0]}"
                )
            utilities[p] = MappingProxyType({k: Fraction(v) for k, v in table.items()})

        object.__setattr__(self, "players", players)
        object.__setattr__(self, "actions", MappingProxyType(actions))
        object.__setattr__(self, "neighbors", MappingProxyType(neighbors))
        object.__setattr__(self, "utilities", MappingProxyType(utilities))

    # -- derived structure -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def s(self) -> int:
        return max((len(a) for a in self.actions.values()), default=0)

    @property
    def k(self) -> int:
        return max((len(nb) for nb in self.neighbors.values()), default=0)

    @cached_property
    def player_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.players)}

    @cached_property
    def owner(self) -> dict[str, str]:
        return {a: p for p, acts in self.actions.items() for a in acts}

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {a: j for acts in self.actions.values() for j, a in enumerate(acts)}

    @cached_property
    def all_actions(self) -> tuple[str, ...]:
        return tuple(a for p in self.players for a in self.actions[p])

    def scope(self, player: str) -> tuple[str, ...]:
        """Players whose choices enter ``player``'s utility, in player order."""
        return self._scopes[player]

    @cached_property
    def _scopes(self) -> dict[str, tuple[str, ...]]:
        idx = self.player_index
        return {
            p: tuple(sorted(self.neighbors[p] + (p,), key=idx.__getitem__)) for p in self.players
        }

    @cached_property
    def _scope_positions(self) -> dict[str, tuple[int, ...]]:
        idx = self.player_index
        return {p: tuple(idx[q] for q in self._scopes[p]) for p in self.players}

    def check_profile(self, profile: Sequence[str]) -> Profile:
        profile = tuple(profile)
        if len(profile) != self.n:
            raise ValueError(f"profile has {len(profile)} entries, game has {self.n} players")
        for p, a in zip(self.players, profile):
            if self.owner.get(a) != p:
                raise ValueError(f"{a!r} is not an action of player {p!r}")
        return profile

    def local_key(self, player: str, profile: Sequence[str]) -> tuple[str, ...]:
        return tuple(profile[i] for i in self._scope_positions[player])

    def utility(self, player: str, profile: Sequence[str]) -> Fraction:
        if player not in self.utilities:
            raise KeyError(f"unknown player {player!r}")
        try:
            return self.utilities[player][self.local_key(player, profile)]
        except (KeyError, IndexError):
            self.check_profile(profile)
            raise

    def profiles(self) -> Iterator[Profile]:
        """All action profiles in lexicographic action-index order."""
        return itertools.product(*(self.actions[p] for p in self.players))

    @property
    def profile_count(self) -> int:
        return math.prod(len(self.actions[p]) for p in self.players)

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_game(self).encode()).hexdigest()[:16]


def utility(game: Game, player: str, profile: Sequence[str]) -> Fraction:
    """``u_player(profile)``; graphical games read only the player's scope."""
    profile = game.check_profile(profile)
    return game.utility(player, profile)


def representation_size(game: Game) -> int:
    """Number of stored utility values."""
    return sum(len(t) for t in game.utilities.values())


def to_standard(game: Game) -> Game:
    """Re-express a game with full neighborhoods (standard normal form)."""
    tables = {}
    for p in game.players:
        tables[p] = {prof: game.utility(p, prof) for prof in game.profiles()}
    return Game(game.players, dict(game.actions), {}, tables, form="standard")


def fresh_action_id(game: Game, stem: str = "__b") -> str:
    taken = set(game.owner)
    counter = 0
    while f"{stem}{counter}" in taken:
        counter += 1
    return f"{stem}{counter}"


def add_universal_action(game: Game, action_id: str | None = None) -> Game:
    """Add a fresh action ``b`` for the first player so that every ``<b, ...>`` is an equilibrium.

    Player 1 gets, at ``<b, a_2..a_n>``, its best utility over its original
    actions against the same opponents; every other player gets its global
    maximum.  Players that did not watch player 1 gain it as a neighbor,
    because their utility now depends on whether ``b`` was played.
    """
    if game.n == 0:
        raise GameValidationError("game has no players")
    b = action_id or fresh_action_id(game)
    if b in game.owner:
        raise GameValidationError(f"action id {b!r} is not fresh")
    first = game.players[0]
    actions = dict(game.actions)
    actions[first] = game.actions[first] + (b,)
    neighbors = {p: tuple(nb) for p, nb in game.neighbors.items()}
    tables: dict[str, dict[tuple[str, ...], Fraction]] = {}

    for p in game.players:
        old = game.utilities[p]
        if p == first:
            table = dict(old)
            pos = game.scope(p).index(p)
            for key in old:
                bkey = key[:pos] + (b,) + key[pos + 1 :]
                if bkey not in table:
                    table[bkey] = max(
                        old[key[:pos] + (a,) + key[pos + 1 :]] for a in game.actions[first]
                    )
            tables[p] = table
            continue
        top = max(old.values())
        if first in game.neighbors[p]:
            pos = game.scope(p).index(first)
            table = dict(old)
            for key in old:
                table[key[:pos] + (b,) + key[pos + 1 :]] = top
            tables[p] = table
        else:
            neighbors[p] = (first,) + neighbors[p]
            table = {}
            for key, val in old.items():
                # first player precedes every other player in scope order
                for a in actions[first]:
                    table[(a,) + key] = top if a == b else val
            tables[p] = table
    return Game(game.players, actions, neighbors, tables, form=game.form)


# -- text format ----------------------------------------------------------


def parse_game(text: str) -> Game:
    form: str | None = None
    players: list[str] = []
    actions: dict[str, list[str]] = {}
    neighbors: dict[str, list[str]] = {}
    raw_utils: dict[str, list[tuple[int, list[str], Fraction]]] = {}
    current: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        col = raw.index(head) + 1
        if form is None and head != "game":
            raise ParseError("file must start with 'game <standard|graphical>'", lineno, col)
        if head == "game":
            if form is not None:
                raise ParseError("duplicate 'game' header", lineno, col)
            if rest not in FORMS:
                raise ParseError(f"unknown form tag {rest!r}", lineno, col + len(head) + 1)
            form = rest
        elif head == "player":
            ids = rest.split()
            if len(ids) != 1:
                raise ParseError("'player' takes exactly one identifier", lineno, col)
            current = ids[0]
            if current in actions:
                raise ParseError(f"duplicate player {current!r}", lineno, col)
            players.append(current)
            actions[current] = []
            raw_utils[current] = []
        elif head in ("actions", "neighbors", "u"):
            if current is None:
                raise ParseError(f"'{head}' outside a player block", lineno, col)
            if head == "actions":
                if actions[current]:
                    raise ParseError("duplicate 'actions' line", lineno, col)
                actions[current] = rest.split()
                if not actions[current]:
                    raise ParseError("'actions' needs at least one identifier", lineno, col)
            elif head == "neighbors":
                if form == "standard":
                    raise ParseError("'neighbors' is only allowed in graphical games", lineno, col)
                if current in neighbors:
                    raise ParseError("duplicate 'neighbors' line", lineno, col)
                neighbors[current] = rest.split()
            else:
                lhs, eq, rhs = rest.partition("=")
                if not eq:
                    raise ParseError("utility line needs '= <rational>'", lineno, col)
                try:
                    value = parse_rational(rhs)
                except ValueError as exc:
                    raise ParseError(str(exc), lineno, raw.index("=") + 2) from None
                raw_utils[current].append((lineno, lhs.split(), value))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)

    if form is None:
        raise ParseError("missing 'game' header")
    if not players:
        raise GameValidationError("game has no players")

    owner: dict[str, str] = {}
    for p in players:
        for a in actions[p]:
            if a in owner:
                raise GameValidationError(f"duplicate action id {a!r} (players {owner[a]!r} and {p!r})")
            owner[a] = p
    order = {p: i for i, p in enumerate(players)}

    tables: dict[str, dict[tuple[str, ...], Fraction]] = {}
    for p in players:
        if form == "standard":
            scope = set(players)
        else:
            nb = neighbors.get(p, [])
            if p in nb:
                raise GameValidationError(f"player {p!r} lists itself as a neighbor")
            scope = set(nb) | {p}
        table: dict[tuple[str, ...], Fraction] = {}
        for lineno, tokens, value in raw_utils[p]:
            unknown = [t for t in tokens if t not in owner]
            if unknown:
                raise ParseError(f"unknown action {unknown[0]!r}", lineno)
            owners = [owner[t] for t in tokens]
            if sorted(owners) != sorted(scope) or len(set(owners)) != len(owners):
                raise ParseError(
                    f"utility tuple for {p!r} must name one action for each of {sorted(scope, key=order.get)}",
                    lineno,
                )
            key = tuple(sorted(tokens, key=lambda t: order[owner[t]]))
            if key in table:
                raise ParseError(f"duplicate utility entry {key}", lineno)
            table[key] = value
        tables[p] = table
    return Game(tuple(players), actions, neighbors, tables, form=form)


def serialize_game(game: Game) -> str:
    """Canonical text form; ``parse_game(serialize_game(g))`` rebuilds ``g``."""
    lines = [f"game {game.form}"]
    for p in game.players:
        lines.append(f"player {p}")
        lines.append("actions " + " ".join(game.actions[p]))
        if game.form == "graphical":
            lines.append(("neighbors " + " ".join(game.neighbors[p])).rstrip())
        table = game.utilities[p]
        for key in itertools.product(*(game.actions[q] for q in game.scope(p))):
            lines.append(f"u {' '.join(key)} = {fmt(table[key])}")
    return "\n".join(lines) + "\n"


def games_equal(g: Game, h: Game) -> bool:
    return (
        g.form == h.form
        and g.players == h.players
        and dict(g.actions) == dict(h.actions)
        and dict(g.neighbors) == dict(h.neighbors)
        and all(dict(g.utilities[p]) == dict(h.utilities[p]) for p in g.players)
    )
