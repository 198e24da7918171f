"""Propositional formulas over action atoms.

Grammar (``->`` binds weakest and associates to the right, ``!`` binds
tightest; parentheses are optional where precedence decides)::

    f ::= atom | !f | (f) | f & f | f | f | f -> f
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import ParseError
from .exact import fmt, parse_rational


@dataclass(frozen=True)
class Atom:
    name: str

    def holds(self, true_atoms) -> bool:
        return self.name in true_atoms

    def atoms(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def holds(self, true_atoms) -> bool:
        return not self.arg.holds(true_atoms)

    def atoms(self) -> frozenset[str]:
        return self.arg.atoms()

    def __str__(self) -> str:
        return f"!{self.arg}"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def holds(self, true_atoms) -> bool:
        return all(a.holds(true_atoms) for a in self.args)

    def atoms(self) -> frozenset[str]:
        return frozenset().union(*(a.atoms() for a in self.args))

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def holds(self, true_atoms) -> bool:
        return any(a.holds(true_atoms) for a in self.args)

    def atoms(self) -> frozenset[str]:
        return frozenset().union(*(a.atoms() for a in self.args))

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def holds(self, true_atoms) -> bool:
        return not self.left.holds(true_atoms) or self.right.holds(true_atoms)

    def atoms(self) -> frozenset[str]:
        return self.left.atoms() | self.right.atoms()

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


Formula = Union[Atom, Not, And, Or, Implies]


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def eval_formula(formula: Formula, valuation: Mapping[str, bool]) -> bool:
    """Truth value under a total valuation; atoms missing from it are an error."""
    missing = formula.atoms() - set(valuation)
    if missing:
        raise ValueError(f"valuation does not assign atom {sorted(missing)[0]!r}")
    return formula.holds({a for a, v in valuation.items() if v})


def is_atomic(formula: Formula) -> bool:
    return isinstance(formula, Atom)


_TOKEN = re.compile(r"\s*(?:(->)|([!&|()~])|([A-Za-z0-9_^'.]+))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r} in formula", column=pos + 1)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append(("!" if tok == "~" else tok, m.start(m.lastindex) + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of formula")
        tok, col = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", column=col)
        self.i += 1
        return tok

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return disj(parts)

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return conj(parts)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            inner = self.implication()
            self.take(")")
            return inner
        if tok is None or tok in "&|)" or tok == "->":
            col = self.tokens[self.i][1] if tok is not None else None
            raise ParseError(f"expected an atom, found {tok!r}", column=col)
        self.take()
        return Atom(tok)


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    formula = parser.implication()
    if parser.peek() is not None:
        tok, col = parser.tokens[parser.i]
        raise ParseError(f"unexpected token {tok!r} after formula", column=col)
    return formula


# -- probability assignments ------------------------------------------------


@dataclass(frozen=True)
class ProbConstraint:
    """``P(formula) relation bound`` with ``relation`` one of ``<=``, ``>=``, ``=``."""

    formula: Formula
    relation: str
    bound: Fraction

    def __post_init__(self) -> None:
        if self.relation not in ("<=", ">=", "="):
            raise ValueError(f"relation must be <=, >= or =, not {self.relation!r}")
        object.__setattr__(self, "bound", Fraction(self.bound))
        if not 0 <= self.bound <= 1:
            raise ValueError(f"probability bound {self.bound} outside [0, 1]")

    def satisfied_by(self, probability: Fraction) -> bool:
        if self.relation == "<=":
            return probability <= self.bound
        if self.relation == ">=":
            return probability >= self.bound
        return probability == self.bound

    def forced(self) -> bool | None:
        """True if the formula must hold almost surely, False if it must fail, else None."""
        if self.bound == 1 and self.relation in ("=", ">="):
            return True
        if self.bound == 0 and self.relation in ("=", "<="):
            return False
        return None

    def __str__(self) -> str:
        return f"P({self.formula}) {self.relation} {fmt(self.bound)}"


_LINE = re.compile(r"^P\s*\((?P<formula>.*)\)\s*(?P<rel><=|>=|=|<|>|≤|≥)\s*(?P<bound>\S+)$")


def parse_constraint(line: str, lineno: int | None = None) -> ProbConstraint:
    m = _LINE.match(line.strip())
    if not m:
        raise ParseError("expected 'P(<formula>) <=|>=|= <rational>'", lineno)
    rel = {"≤": "<=", "≥": ">="}.get(m["rel"], m["rel"])
    if rel in ("<", ">"):
        raise ParseError(f"strict relation {rel!r} is not supported; use <= or >=", lineno)
    try:
        formula = parse_formula(m["formula"])
    except ParseError as exc:
        raise ParseError(str(exc), lineno) from None
    try:
        bound = parse_rational(m["bound"])
        return ProbConstraint(formula, rel, bound)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_constraints(text: str) -> list[ProbConstraint]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_constraint(line, lineno))
    return out
