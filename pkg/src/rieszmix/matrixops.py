"""Dense exact-rational matrices.

Small helpers used by operator identity checks and test oracles. A
matrix is a tuple of row tuples of Fractions; nothing here is tuned for
size beyond desk scale.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .lattice import Element, Space

Matrix = tuple[tuple[Fraction, ...], ...]


def operator_matrix(apply_fn: Callable[[Element], Element], space: Space) -> Matrix:
    """Matrix of a linear map, built column by column from basis images."""
    n = space.dim
    cols = [apply_fn(space.basis(j)).coords for j in range(n)]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def identity_matrix(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    assert all(len(row) == k for row in a), "inner dimensions differ"
    return tuple(
        tuple(sum((a[i][l] * b[l][j] for l in range(k)), Fraction(0)) for j in range(m))
        for i in range(n)
    )


def rank(m: Matrix) -> int:
    """Rank over the rationals by Gaussian elimination."""
    rows = [list(r) for r in m]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[r])]
        r += 1
        if r == n_rows:
            break
    return r
