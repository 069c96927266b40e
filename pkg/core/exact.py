"""Exact rational helpers: "p/q" text format, vectors and Gaussian elimination.

Everything here works on ``fractions.Fraction`` and plain tuples so that the
domain apps can stay immutable and free of floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

_RATIONAL_RE = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class RationalFormatError(ValueError):
    """Raised for rationals that are not written as ``p`` or ``p/q``."""


class SingularMatrixError(ArithmeticError):
    """Raised by :func:`solve` and :func:`inverse` on a singular system."""


def parse_rational(raw: object) -> Fraction:
    """Parse ``"p/q"`` or an integer; decimals such as ``"1.5"`` are rejected."""
    if isinstance(raw, bool):
        raise RationalFormatError(f'not a rational: {raw!r}')
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Fraction):
        return raw
    if not isinstance(raw, str):
        raise RationalFormatError(f'not a rational: {raw!r}')
    match = _RATIONAL_RE.match(raw)
    if not match:
        raise RationalFormatError(f'not a rational: {raw!r}')
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise RationalFormatError(f'zero denominator: {raw!r}')
    return Fraction(numerator, denominator)


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def vector(values: Iterable[object]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def dot(left: Sequence[Fraction], right: Sequence[Fraction]) -> Fraction:
    if len(left) != len(right):
        raise ValueError(f'length mismatch: {len(left)} != {len(right)}')
    return sum((a * b for a, b in zip(left, right)), Fraction(0))


def add(left: Sequence[Fraction], right: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(left, right, strict=True))


def sub(left: Sequence[Fraction], right: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(left, right, strict=True))


def scale(factor: Fraction | int, values: Sequence[Fraction]) -> Vector:
    return tuple(factor * v for v in values)


def combine(weights: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> Vector:
    """Weighted sum of equally sized vectors."""
    if not points:
        raise ValueError('no points to combine')
    total = [Fraction(0)] * len(points[0])
    for weight, point in zip(weights, points, strict=True):
        for index, value in enumerate(point):
            total[index] += weight * value
    return tuple(total)


def sup_norm(values: Sequence[Fraction]) -> Fraction:
    return max((abs(v) for v in values), default=Fraction(0))


def sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


def round_to_bits(value: Fraction, bits: int) -> Fraction:
    """Nearest rational with denominator dividing ``2**bits``."""
    unit = 1 << bits
    return Fraction(round(value * unit), unit)


def round_vector(values: Sequence[Fraction], bits: int) -> Vector:
    return tuple(round_to_bits(v, bits) for v in values)


def clear_denominators(values: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Return ``(integers, m)`` with ``integers == m * values`` and m minimal."""
    multiplier = 1
    for value in values:
        multiplier = lcm(multiplier, Fraction(value).denominator)
    return tuple(int(v * multiplier) for v in values), multiplier


def primitive(values: Sequence[Fraction | int]) -> tuple[int, ...]:
    """Integral primitive multiple with a positive first non-zero coordinate."""
    integers, _ = clear_denominators([Fraction(v) for v in values])
    content = 0
    for value in integers:
        content = gcd(content, value)
    if content == 0:
        return tuple(integers)
    reduced = [v // content for v in integers]
    leading = next(v for v in reduced if v != 0)
    if leading < 0:
        reduced = [-v for v in reduced]
    return tuple(reduced)


def identity(size: int) -> Matrix:
    return tuple(
        tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)
    )


def transpose(matrix: Sequence[Sequence[Fraction]]) -> Matrix:
    return tuple(zip(*matrix)) if matrix else ()


def mat_vec(matrix: Sequence[Sequence[Fraction]], values: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, values) for row in matrix)


def mat_mul(left: Sequence[Sequence[Fraction]], right: Sequence[Sequence[Fraction]]) -> Matrix:
    columns = transpose(right)
    return tuple(tuple(dot(row, column) for column in columns) for row in left)


def quadratic_form(matrix: Sequence[Sequence[Fraction]], values: Sequence[Fraction]) -> Fraction:
    return dot(values, mat_vec(matrix, values))


def _row_reduce(rows: list[list[Fraction]], pivot_columns: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the first ``pivot_columns`` columns."""
    pivots: list[int] = []
    lead_row = 0
    for column in range(pivot_columns):
        pivot_row = next(
            (r for r in range(lead_row, len(rows)) if rows[r][column] != 0), None
        )
        if pivot_row is None:
            continue
        rows[lead_row], rows[pivot_row] = rows[pivot_row], rows[lead_row]
        pivot_value = rows[lead_row][column]
        rows[lead_row] = [v / pivot_value for v in rows[lead_row]]
        for r in range(len(rows)):
            if r != lead_row and rows[r][column] != 0:
                factor = rows[r][column]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[lead_row])]
        pivots.append(column)
        lead_row += 1
        if lead_row == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    if not matrix:
        return 0
    rows = [list(map(Fraction, row)) for row in matrix]
    _, pivots = _row_reduce(rows, len(rows[0]))
    return len(pivots)


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector:
    """Solve a square system exactly."""
    size = len(matrix)
    if any(len(row) != size for row in matrix) or len(rhs) != size:
        raise ValueError('solve expects a square system')
    rows = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    rows, pivots = _row_reduce(rows, size)
    if len(pivots) < size:
        raise SingularMatrixError(f'matrix of size {size} has rank {len(pivots)}')
    return tuple(row[-1] for row in rows)


def inverse(matrix: Sequence[Sequence[Fraction]]) -> Matrix:
    size = len(matrix)
    rows = [
        list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(size)]
        for i, row in enumerate(matrix)
    ]
    rows, pivots = _row_reduce(rows, size)
    if len(pivots) < size:
        raise SingularMatrixError(f'matrix of size {size} has rank {len(pivots)}')
    return tuple(tuple(row[size:]) for row in rows)


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    size = len(matrix)
    rows = [list(map(Fraction, row)) for row in matrix]
    result = Fraction(1)
    for column in range(size):
        pivot_row = next((r for r in range(column, size) if rows[r][column] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != column:
            rows[column], rows[pivot_row] = rows[pivot_row], rows[column]
            result = -result
        pivot_value = rows[column][column]
        result *= pivot_value
        for r in range(column + 1, size):
            factor = rows[r][column] / pivot_value
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[column])]
    return result


def nullspace(matrix: Sequence[Sequence[Fraction]], columns: int) -> tuple[Vector, ...]:
    """Rational basis of ``{x : matrix x = 0}`` for ``columns`` unknowns."""
    if not matrix:
        return identity(columns)
    rows = [list(map(Fraction, row)) for row in matrix]
    rows, pivots = _row_reduce(rows, columns)
    free = [c for c in range(columns) if c not in pivots]
    basis = []
    for free_column in free:
        entry = [Fraction(0)] * columns
        entry[free_column] = Fraction(1)
        for row_index, pivot_column in enumerate(pivots):
            entry[pivot_column] = -rows[row_index][free_column]
        basis.append(tuple(entry))
    return tuple(basis)


def leading_minors(matrix: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    return tuple(
        determinant([row[:k] for row in matrix[:k]]) for k in range(1, len(matrix) + 1)
    )


def is_positive_definite(matrix: Sequence[Sequence[Fraction]]) -> bool:
    """Sylvester's criterion, exact."""
    return all(minor > 0 for minor in leading_minors(matrix))


def ldl_decompose(matrix: Sequence[Sequence[Fraction]]) -> tuple[Vector, Matrix]:
    """``matrix = L diag(d) L^T`` with L unit lower triangular (positive definite input)."""
    size = len(matrix)
    lower = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    diagonal = [Fraction(0)] * size
    for j in range(size):
        diagonal[j] = Fraction(matrix[j][j]) - sum(
            (lower[j][k] ** 2 * diagonal[k] for k in range(j)), Fraction(0)
        )
        if diagonal[j] == 0:
            raise SingularMatrixError(f'zero pivot at {j}')
        for i in range(j + 1, size):
            lower[i][j] = (
                Fraction(matrix[i][j])
                - sum((lower[i][k] * lower[j][k] * diagonal[k] for k in range(j)), Fraction(0))
            ) / diagonal[j]
    return tuple(diagonal), tuple(tuple(row) for row in lower)
