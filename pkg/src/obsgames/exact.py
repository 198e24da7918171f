"""Exact rational helpers: literal parsing, rendering and small dense linear algebra."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, integer or decimal literals into an exact Fraction.

    Decimal literals are read exactly, so ``"0.9"`` becomes ``9/10``.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def fmt(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [dot(row, v) for row in m]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


class SingularMatrix(ArithmeticError):
    pass


def invert(m: Sequence[Sequence[Fraction]]) -> Matrix:
    """Gauss-Jordan inverse of a square rational matrix."""
    n = len(m)
    aug = [list(map(Fraction, row)) + e for row, e in zip(m, identity(n))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"matrix is singular at column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def row_reduce(m: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    rows = [list(map(Fraction, r)) for r in m]
    pivots: list[int] = []
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv_p = 1 / rows[r][c]
        rows[r] = [x * inv_p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve_linear(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> tuple[str, list[Fraction] | None]:
    """Solve ``a x = b`` exactly.

    Returns ``("unique", x)``, ``("continuum", None)`` when the system is
    consistent with a positive-dimensional solution set, or
    ``("inconsistent", None)``.
    """
    nvars = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    rref, pivots = row_reduce(aug)
    if nvars in pivots:
        return "inconsistent", None
    if len(pivots) < nvars:
        return "continuum", None
    x = [Fraction(0)] * nvars
    for i, c in enumerate(pivots):
        x[c] = rref[i][nvars]
    return "unique", x
