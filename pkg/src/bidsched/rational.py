"""Exact rational helpers: p/q (de)serialization and dense Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction


class SingularSystem(Exception):
    """The linear system has no unique solution."""


def parse_fraction(text: str | int | float | Fraction) -> Fraction:
    """Parse a rational from a "p/q" string (also accepts ints and floats)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, float)):
        return Fraction(text)
    return Fraction(text.strip())


def format_fraction(value: Fraction | float) -> str:
    """Render a rational as a canonical "p/q" string ("p" when q == 1)."""
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def solve_linear_system(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction]:
    """Solve A x = b exactly over the rationals.

    Plain Gauss-Jordan with first-nonzero pivoting; raises SingularSystem when
    the matrix is rank deficient.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("square system expected")
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]

    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"no pivot in column {col}")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [entry * inv for entry in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]

    return [a[i][n] for i in range(n)]
