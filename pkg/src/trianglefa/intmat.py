"""Exact integer matrices for GL(n,Z) and SL(n,Z) images."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise DimensionError("matrix must be square and nonempty")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntMatrix:
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, *entries: int) -> IntMatrix:
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def one(self) -> IntMatrix:
        return IntMatrix.identity(self.n)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        """1-based entry access, matching the E_ij naming."""
        i, j = ij
        return self.rows[i - 1][j - 1]

    def __mul__(self, other: IntMatrix) -> IntMatrix:
        return mat_mul(self, other)

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix(tuple(tuple(k * x for x in r) for r in self.rows))

    def transpose(self) -> IntMatrix:
        return IntMatrix(tuple(zip(*self.rows)))

    def embed(self, n: int) -> IntMatrix:
        """Block-diagonal embedding diag(self, I) into dimension n."""
        if n < self.n:
            raise DimensionError(f"cannot embed {self.n}x{self.n} into {n}x{n}")
        pad = n - self.n
        rows = [r + (0,) * pad for r in self.rows]
        rows += [tuple(int(j == self.n + i) for j in range(n)) for i in range(pad)]
        return IntMatrix(tuple(rows))

    def is_identity(self) -> bool:
        return all(x == int(i == j) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(f"{x:2d}" for x in r) for r in self.rows) + "]"


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")
    cols = tuple(zip(*b.rows))
    return IntMatrix(tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in a.rows))


def mat_det(a: IntMatrix) -> int:
    """Determinant by Bareiss fraction-free elimination."""
    m = [list(r) for r in a.rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_inverse_unimodular(a: IntMatrix) -> IntMatrix:
    """Inverse of a determinant +-1 matrix via the adjugate."""
    d = mat_det(a)
    if d not in (1, -1):
        raise ValueError(f"determinant {d} is not a unit")
    n = a.n
    if n == 1:
        return IntMatrix(((d,),))
    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(a.rows) if k != i]
            row.append((-1) ** (i + j) * mat_det(IntMatrix(tuple(minor))))
        cof.append(row)
    # adj = cof^T, inverse = adj / d and d = +-1
    return IntMatrix.from_rows([[d * cof[j][i] for j in range(n)] for i in range(n)])


def is_monomial(a: IntMatrix) -> bool:
    """Exactly one nonzero entry, equal to +-1, in every row and column."""
    for line in (*a.rows, *zip(*a.rows)):
        nz = [x for x in line if x != 0]
        if len(nz) != 1 or nz[0] not in (1, -1):
            return False
    return True


def det_twist(a: IntMatrix) -> IntMatrix:
    """Return det(a)·a. For odd n this always lands in SL(n,Z)."""
    d = mat_det(a)
    if d not in (1, -1):
        raise ValueError(f"det_twist needs determinant +-1, got {d}")
    return a if d == 1 else -a


def elementary(n: int, i: int, j: int, k: int = 1) -> IntMatrix:
    """Identity plus k at 1-based position (i, j)."""
    if i == j:
        raise ValueError("elementary matrix needs i != j")
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"position ({i}, {j}) outside {n}x{n}")
    rows = [[int(r == c) for c in range(n)] for r in range(n)]
    rows[i - 1][j - 1] = k
    return IntMatrix.from_rows(rows)
