"""Exact rational arithmetic helpers: parsing, vectors, and small dense linear algebra.

Everything in the core works over Fraction (or plain int for lattice data);
no floating point anywhere.  Matrices are lists of row tuples.  The solvers
use deterministic pivoting (first nonzero entry, scanning rows top to bottom)
so that identical inputs always produce identical outputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def parse_rational(value) -> Fraction:
    """Read a rational from an int, Fraction, or a "p/q" / "n" string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot parse rational from {value!r}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec_add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_neg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def vec_scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b, strict=True))


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in matrix)


def is_zero_vec(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (0 stays 0)."""
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def scale_to_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector by a positive integer to a primitive integer vector."""
    fracs = [Fraction(x) for x in v]
    lcm = 1
    for x in fracs:
        d = x.denominator
        lcm = lcm * d // gcd(lcm, d)
    return primitive([int(x * lcm) for x in fracs])


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.  Returns (rows, pivot column indices)."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(rref(matrix)[1])


def kernel_basis(matrix: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel {x : A x = 0}, deterministic order."""
    rows = list(matrix)
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(1 if i == j else 0) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r_i, pc in enumerate(pivots):
            v[pc] = -red[r_i][fc]
        basis.append(tuple(v))
    return basis


def integer_kernel_basis(matrix: Sequence[Sequence], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Primitive integer vectors spanning the right kernel."""
    return [scale_to_integer(v) for v in kernel_basis(matrix, ncols)]


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution of A x = b with all free variables set to 0, or None.

    Deterministic: the particular solution depends only on (A, b).
    """
    rows = [list(row) + [b] for row, b in zip(matrix, rhs, strict=True)]
    if not rows:
        return ()
    ncols = len(matrix[0]) if matrix else 0
    red, pivots = rref(rows)
    x = [Fraction(0)] * ncols
    for r_i, pc in enumerate(pivots):
        if pc == ncols:  # pivot in the rhs column: inconsistent
            return None
        x[pc] = red[r_i][ncols]
    # rows below the pivot rows must have zero rhs
    for r_i in range(len(pivots), len(red)):
        if red[r_i][ncols] != 0:
            return None
    return tuple(x)


def in_row_span(matrix: Sequence[Sequence], v: Sequence) -> bool:
    rows = [list(r) for r in matrix]
    base = rank(rows) if rows else 0
    return rank(rows + [list(v)]) == base


def column_space_coords(columns: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...] | None:
    """Express v as a combination of the given columns, or None."""
    if not columns:
        return () if is_zero_vec(v) else None
    nrows = len(columns[0])
    matrix = [[Fraction(col[i]) for col in columns] for i in range(nrows)]
    return solve_linear(matrix, [Fraction(x) for x in v])


def lex_key(v: Iterable) -> tuple:
    return tuple(v)
