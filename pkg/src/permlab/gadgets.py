"""Bordered-matrix gadgets with exact permanent identities.

``build_z`` wraps a sign matrix X in a two-row/two-column border so that
the permanent flips sign, Per(Z) = -Per(X), while the top-left minor
survives, Per(Z^{k+2,k+2}) = Per(X^{1,1}). ``build_w`` overlaps a bordered
matrix with another matrix on a single shared cell so that

    Per(W) = Per(Z) * Per(X^{1,1}) + Per(Z^{m,m}) * Per(X).

Feeding ``build_w`` the output of ``build_z`` for the same X therefore
cancels exactly to Per(W) = 0, which is the zero that the oracle-recovery
search looks for.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perm_core import IntMatrix


@dataclass(frozen=True)
class GadgetZ:
    """A (k+2)x(k+2) bordered sign matrix and the dimension k it encodes."""

    matrix: IntMatrix
    source_dim: int


def _require_sign_entries(x: IntMatrix) -> None:
    for row in x.entries:
        for v in row:
            if v not in (-1, 0, 1):
                raise ValueError(f"entry {v} outside {{-1, 0, 1}}")


def build_z(x: IntMatrix) -> GadgetZ:
    """Border X (entries in {-1,0,1}, k >= 1) into the sign-flip gadget.

    The inner k x k block holds X with both row and column order reversed;
    the border is zero except for the six fixed entries below. The
    bottom-right entry is always 0.
    """
    k = x.n
    if k < 1:
        raise ValueError("build_z needs a matrix of dimension >= 1")
    _require_sign_entries(x)
    size = k + 2
    z = [[0] * size for _ in range(size)]
    src = x.entries
    for i in range(k):
        for j in range(k):
            z[i][j] = src[k - 1 - i][k - 1 - j]
    z[k - 1][k] = 1
    z[k - 1][k + 1] = -1
    z[k][k - 1] = 1
    z[k][k + 1] = 1
    z[k + 1][k - 1] = -1
    z[k + 1][k] = -1
    return GadgetZ(IntMatrix.from_rows(z), k)


def build_w(z: IntMatrix, x: IntMatrix) -> IntMatrix:
    """Overlap Z (m x m, Z[m][m] = 0, m >= 2) with X (n x n, n >= 1).

    The result is (m+n-1) x (m+n-1): the top-left m x m block is Z except
    that the shared cell (m,m) holds X[1][1]; the bottom-right n x n block
    is X; everything off the two blocks is zero.
    """
    m = z.n
    n = x.n
    if m < 2:
        raise ValueError("build_w needs dim(Z) >= 2")
    if n < 1:
        raise ValueError("build_w needs dim(X) >= 1")
    if z.entries[m - 1][m - 1] != 0:
        raise ValueError("build_w requires Z[m][m] = 0")
    size = m + n - 1
    w = [[0] * size for _ in range(size)]
    for i in range(m):
        for j in range(m):
            w[i][j] = z.entries[i][j]
    for i in range(n):
        for j in range(n):
            w[m - 1 + i][m - 1 + j] = x.entries[i][j]
    return IntMatrix.from_rows(w)
