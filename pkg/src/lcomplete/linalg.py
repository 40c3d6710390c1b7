"""Exact integer matrix algebra.

Everything here works on Python ints, so there is no overflow no matter how
large the intermediate entries of a Smith reduction get.  Matrices are
immutable values; the elimination routines copy into lists of lists and work
in place on the copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from operator import mul
from typing import Iterable, Optional, Sequence

from .errors import MalformedInput


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise MalformedInput("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise MalformedInput(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise MalformedInput("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def _trusted(cls, rows: list[list[int]], cols: int) -> "IntMatrix":
        # rows already hold Python ints of the right length
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise MalformedInput(f"column of length {len(c)}, expected {rows}")
        ncols = len(columns)
        return cls(rows, ncols, tuple(int(columns[j][i]) for i in range(rows) for j in range(ncols)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            out[i][i] = d
        return cls.from_rows(out, cols)

    # -- access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_columns(self) -> list[list[int]]:
        return [list(self.column(j)) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r}, {self.rows}x{self.cols})"

    # -- arithmetic ---------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise MalformedInput(f"cannot multiply {self.shape} by {other.shape}")
        oc, e = other.cols, other.entries
        ocols = [e[j::oc] for j in range(oc)]
        sc, se = self.cols, self.entries
        srows = [se[i * sc:(i + 1) * sc] for i in range(self.rows)]
        return IntMatrix(self.rows, oc, tuple([sum(map(mul, r, c)) for r in srows for c in ocols]))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise MalformedInput(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(sum(map(mul, self.row(i), vec)) for i in range(self.rows))

    def _same_shape(self, other: "IntMatrix"):
        if self.shape != other.shape:
            raise MalformedInput(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_rows(self.to_columns(), self.rows)

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        mats = (self,) + others
        for m in mats:
            if m.rows != self.rows:
                raise MalformedInput("hstack needs equal row counts")
        cols = sum(m.cols for m in mats)
        rows = [sum((list(m.row(i)) for m in mats), []) for i in range(self.rows)]
        return IntMatrix.from_rows(rows, cols)

    def vstack(self, *others: "IntMatrix") -> "IntMatrix":
        mats = (self,) + others
        for m in mats:
            if m.cols != self.cols:
                raise MalformedInput("vstack needs equal column counts")
        return IntMatrix(sum(m.rows for m in mats), self.cols, sum((m.entries for m in mats), ()))

    def block_diag(self, other: "IntMatrix") -> "IntMatrix":
        top = self.hstack(IntMatrix.zeros(self.rows, other.cols))
        bottom = IntMatrix.zeros(other.rows, self.cols).hstack(other)
        return top.vstack(bottom)

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        rows = self.rows * other.rows
        cols = self.cols * other.cols
        out = [[0] * cols for _ in range(rows)]
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        out[i * other.rows + k][j * other.cols + l] = a * other[k, l]
        return IntMatrix.from_rows(out, cols)

    def select_rows(self, idx: Iterable[int]) -> "IntMatrix":
        return IntMatrix.from_rows([self.row(i) for i in idx], self.cols)

    def select_columns(self, idx: Iterable[int]) -> "IntMatrix":
        return IntMatrix.from_columns([self.column(j) for j in idx], self.rows)


@dataclass(frozen=True)
class SmithForm:
    """U @ A @ V == D with U, V unimodular and D diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diagonal: tuple[int, ...]
    U_inv: Optional[IntMatrix] = None

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(A: IntMatrix) -> SmithForm:
    m, n = A.shape
    D = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_combine(i1, i2, x, y, z, w, start):
        # (row i1, row i2) <- (x*r1 + y*r2, z*r1 + w*r2); determinant x*w - y*z = 1
        r1, r2 = D[i1], D[i2]
        for k in range(start, n):
            a, b = r1[k], r2[k]
            r1[k], r2[k] = x * a + y * b, z * a + w * b
        u1, u2 = U[i1], U[i2]
        for k in range(m):
            a, b = u1[k], u2[k]
            u1[k], u2[k] = x * a + y * b, z * a + w * b
        # U^-1 picks up the inverse transform [[w, -y], [-z, x]] on its columns
        for row in Ui:
            a, b = row[i1], row[i2]
            row[i1], row[i2] = w * a - z * b, x * b - y * a

    def col_combine(j1, j2, x, y, z, w, start):
        for row in D[start:]:
            a, b = row[j1], row[j2]
            row[j1], row[j2] = x * a + y * b, z * a + w * b
        for row in V:
            a, b = row[j1], row[j2]
            row[j1], row[j2] = x * a + y * b, z * a + w * b

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the trailing block, first in row-major order
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            D[t], D[pi] = D[pi], D[t]
            U[t], U[pi] = U[pi], U[t]
            for row in Ui:
                row[t], row[pi] = row[pi], row[t]
        if pj != t:
            for row in D:
                row[t], row[pj] = row[pj], row[t]
            for row in V:
                row[t], row[pj] = row[pj], row[t]

        while True:
            for i in range(t + 1, m):
                a, b = D[t][t], D[i][t]
                if not b:
                    continue
                if b % a == 0:
                    row_combine(t, i, 1, 0, -(b // a), 1, t)
                else:
                    x, y, g = xgcd(a, b)
                    row_combine(t, i, x, y, -(b // g), a // g, t)
            for j in range(t + 1, n):
                a, b = D[t][t], D[t][j]
                if not b:
                    continue
                if b % a == 0:
                    col_combine(t, j, 1, 0, -(b // a), 1, t)
                else:
                    x, y, g = xgcd(a, b)
                    col_combine(t, j, x, y, -(b // g), a // g, t)
            if any(D[i][t] for i in range(t + 1, m)):
                continue
            a = D[t][t]
            bad = next(
                (i for i in range(t + 1, m) if any(D[i][j] % a for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            # pull the offending row into the pivot row; next pass lowers the pivot
            row_combine(t, bad, 1, 1, 0, 1, t)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
            for row in Ui:
                row[t] = -row[t]
        t += 1

    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SmithForm(
        U=IntMatrix._trusted(U, m),
        D=IntMatrix._trusted(D, n),
        V=IntMatrix._trusted(V, n),
        diagonal=diag,
        U_inv=IntMatrix._trusted(Ui, m),
    )


def inverse_unimodular(U: IntMatrix) -> IntMatrix:
    """Integer inverse of a unimodular matrix."""
    if U.rows != U.cols:
        raise MalformedInput("inverse of a non-square matrix")
    snf = smith_normal_form(U)
    if any(d != 1 for d in snf.diagonal):
        raise MalformedInput("matrix is not unimodular")
    # P U Q = I  =>  U^-1 = Q P
    return snf.V @ snf.U


def solve_integer(A: IntMatrix, b: Sequence[int], snf: Optional[SmithForm] = None) -> Optional[tuple[int, ...]]:
    """An integer x with A x = b, or None if there is none."""
    if len(b) != A.rows:
        raise MalformedInput(f"right-hand side of length {len(b)} for {A.rows} rows")
    snf = snf or smith_normal_form(A)
    c = snf.U.apply(b)
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d == 0:
            if ci:
                return None
        else:
            if ci % d:
                return None
            y[i] = ci // d
    return snf.V.apply(y)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a basis of {x in Z^n : A x = 0}."""
    snf = smith_normal_form(A)
    r = snf.rank
    return snf.V.select_columns(range(r, A.cols))


def column_span_basis(B: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of B."""
    snf = smith_normal_form(B)
    r = snf.rank
    # B V = U^-1 D, so the first r columns of B V span the same lattice and are independent
    return (B @ snf.V).select_columns(range(r))


def determinant(A: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    if A.rows != A.cols:
        raise MalformedInput("determinant of a non-square matrix")
    n = A.rows
    M = A.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1
