"""Exact integer linear algebra.

Smith normal form with transformation matrices, integer kernels in
Hermite-reduced form, cokernel structure, and homology subquotients
ker/im presented as finitely generated abelian groups.  Everything runs
on arbitrary-precision Python ints; no floating point anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, InternalCheckError

__all__ = [
    "IntMatrix",
    "ZModule",
    "HomologyPresentation",
    "Lattice",
    "smith_normal_form",
    "kernel_basis",
    "cokernel_structure",
    "homology_subquotient",
    "homology_presentation",
    "solve",
    "SnfSolver",
    "hermite_reduce",
    "rational_rank",
    "det",
]


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers.

    Rows or columns may be zero; the shape is kept explicitly so that
    0 x n and n x 0 matrices stay distinguishable.
    """

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries, cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        if data:
            width = len(data[0])
            if any(len(row) != width for row in data):
                raise InputError("ragged rows in matrix literal")
            if cols is not None and cols != width:
                raise InputError(f"declared {cols} columns, rows have {width}")
        else:
            if cols is None:
                raise InputError("matrix with no rows needs an explicit column count")
            width = cols
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "_entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == k else 0 for k in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns, rows: int) -> "IntMatrix":
        cols = list(columns)
        return cls([[col[i] for col in cols] for i in range(rows)], cols=len(cols))

    def __getitem__(self, key):
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry ({r}, {c}) out of range for {self.rows}x{self.cols} matrix")
        return self._entries[r][c]

    def row(self, r: int) -> tuple:
        if not 0 <= r < self.rows:
            raise IndexError(f"row {r} out of range")
        return self._entries[r]

    def column(self, c: int) -> tuple:
        if not 0 <= c < self.cols:
            raise IndexError(f"column {c} out of range")
        return tuple(row[c] for row in self._entries)

    def columns(self) -> list:
        return [self.column(c) for c in range(self.cols)]

    def to_lists(self) -> list:
        """Nested-list form; round-trips exactly through the constructor."""
        return [list(row) for row in self._entries]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_columns(self._entries, rows=self.cols)

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InputError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        ot = other.transpose()._entries
        out = []
        for row in self._entries:
            out.append([sum(a * b for a, b in zip(row, col) if a) for col in ot])
        return IntMatrix(out, cols=other.cols)

    __matmul__ = mul

    def apply(self, vector) -> tuple:
        vec = tuple(vector)
        if len(vec) != self.cols:
            raise InputError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(row, vec) if a) for row in self._entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise InputError("row counts differ in hstack")
        return IntMatrix(
            [list(a) + list(b) for a, b in zip(self._entries, other._entries)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise InputError("column counts differ in vstack")
        return IntMatrix(list(self._entries) + list(other._entries), cols=self.cols)

    def scaled(self, factor: int) -> "IntMatrix":
        return IntMatrix([[factor * x for x in row] for row in self._entries], cols=self.cols)

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in row) for row in self._entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._entries == other._entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self):
        if self.rows == 0 or self.cols == 0:
            return f"IntMatrix([], shape=({self.rows}, {self.cols}))"
        body = ", ".join(repr(list(row)) for row in self._entries)
        return f"IntMatrix([{body}])"


@dataclass(frozen=True)
class ZModule:
    """Finitely generated abelian group Z^rank + Z/d1 + ... with d1 | d2 | ...

    Invariant factors are stored in ascending divisibility order and
    never include 0 or 1.
    """

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise InputError("negative rank")
        tors = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", tors)
        for d in tors:
            if d < 2:
                raise InputError(f"invariant factor {d} out of range (needs d >= 2)")
        for a, b in zip(tors, tors[1:]):
            if b % a != 0:
                raise InputError(f"invariant factors {a}, {b} break the divisibility chain")

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def _xgcd(a: int, b: int):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


def _swap_rows(m, i, k):
    m[i], m[k] = m[k], m[i]


def _swap_cols(m, i, k):
    for row in m:
        row[i], row[k] = row[k], row[i]


def _addmul_row(m, target, source, factor):
    if factor:
        trow, srow = m[target], m[source]
        for c in range(len(trow)):
            trow[c] += factor * srow[c]


def _addmul_col(m, target, source, factor):
    if factor:
        for row in m:
            row[target] += factor * row[source]


def _negate_row(m, i):
    m[i] = [-x for x in m[i]]


def _diagonalize(S, U, V, start):
    """Bring S[start:, start:] to diagonal form by unimodular row and
    column operations, mirroring rows in U and columns in V.

    Pivot choice: smallest absolute value, ties broken by (row, col).
    Returns the index one past the last nonzero diagonal entry.
    """
    rows = len(S)
    cols = len(S[0]) if S else 0
    t = start
    while True:
        pivot = None
        for i in range(t, rows):
            srow = S[i]
            for k in range(t, cols):
                x = srow[k]
                if x:
                    ax = -x if x < 0 else x
                    if pivot is None or ax < pivot[0]:
                        pivot = (ax, i, k)
        if pivot is None:
            return t
        _, pi, pk = pivot
        if pi != t:
            _swap_rows(S, t, pi)
            _swap_rows(U, t, pi)
        if pk != t:
            _swap_cols(S, t, pk)
            _swap_cols(V, t, pk)
        if S[t][t] < 0:
            _negate_row(S, t)
            _negate_row(U, t)
        # Euclid on row t and column t until both are clear off the pivot.
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if S[i][t]:
                    q = S[i][t] // S[t][t]
                    _addmul_row(S, i, t, -q)
                    _addmul_row(U, i, t, -q)
                    if S[i][t]:
                        # remainder beats the pivot, promote it
                        _swap_rows(S, t, i)
                        _swap_rows(U, t, i)
                        dirty = True
            for k in range(t + 1, cols):
                if S[t][k]:
                    q = S[t][k] // S[t][t]
                    _addmul_col(S, k, t, -q)
                    _addmul_col(V, k, t, -q)
                    if S[t][k]:
                        _swap_cols(S, t, k)
                        _swap_cols(V, t, k)
                        dirty = True
            if not dirty:
                break
        t += 1


def smith_normal_form(A: IntMatrix):
    """Return (U, S, V) with U * A * V = S in Smith normal form.

    U and V are unimodular; S is diagonal with nonnegative entries
    d1 | d2 | ...  The computation is deterministic: pivots are chosen
    by minimal absolute value with (row, col) tie-break.
    """
    S = A.to_lists()
    U = IntMatrix.identity(A.rows).to_lists()
    V = IntMatrix.identity(A.cols).to_lists()
    rank = _diagonalize(S, U, V, 0)
    # enforce the divisibility chain
    i = 0
    while i + 1 < rank:
        a, b = S[i][i], S[i + 1][i + 1]
        if b % a != 0:
            # pull d_{i+1} into column i and rediagonalize from i; the
            # new d_i becomes gcd(a, b), strictly smaller, so this stops
            _addmul_col(S, i, i + 1, 1)
            _addmul_col(V, i, i + 1, 1)
            _diagonalize(S, U, V, i)
            i = max(i - 1, 0)
        else:
            i += 1
    return (
        IntMatrix(U, cols=A.rows),
        IntMatrix(S, cols=A.cols),
        IntMatrix(V, cols=A.cols),
    )


def _snf_diagonal(A: IntMatrix) -> list:
    _, S, _ = smith_normal_form(A)
    return [S[i, i] for i in range(min(S.rows, S.cols))]


def hermite_reduce(vectors, width: int) -> list:
    """Row Hermite normal form of the span of the given vectors.

    Rows come back with strictly increasing pivot columns, positive
    pivots, and entries above each pivot reduced into [0, pivot).
    """
    basis = []  # echelon rows, pivot columns strictly increasing
    pivots = []
    for vec in vectors:
        v = list(vec)
        if len(v) != width:
            raise InputError("vector width mismatch in hermite_reduce")
        while True:
            lead = next((c for c in range(width) if v[c]), None)
            if lead is None:
                break
            pos = 0
            while pos < len(pivots) and pivots[pos] < lead:
                pos += 1
            if pos == len(pivots) or pivots[pos] > lead:
                basis.insert(pos, v)
                pivots.insert(pos, lead)
                break
            row = basis[pos]
            a, b = row[lead], v[lead]
            if b % a == 0:
                q = b // a
                v = [x - q * y for x, y in zip(v, row)]
            else:
                g, x, y = _xgcd(a, b)
                new_row = [x * p + y * q2 for p, q2 in zip(row, v)]
                v = [(-(b // g)) * p + (a // g) * q2 for p, q2 in zip(row, v)]
                basis[pos] = new_row
    # normalize: positive pivots, then clear above-pivot entries; rows are
    # used left to right so a later reduction never disturbs an earlier
    # pivot column (each row is zero before its own pivot)
    for pos, lead in enumerate(pivots):
        if basis[pos][lead] < 0:
            basis[pos] = [-x for x in basis[pos]]
    for pos in range(len(basis)):
        lead = pivots[pos]
        p = basis[pos][lead]
        for above in range(pos):
            q = basis[above][lead] // p
            if q:
                basis[above] = [x - q * y for x, y in zip(basis[above], basis[pos])]
    return [tuple(row) for row in basis]


def kernel_basis(A: IntMatrix) -> list:
    """Z-basis of {v : A v = 0}, Hermite-reduced for determinism."""
    _, S, V = smith_normal_form(A)
    rank = sum(1 for i in range(min(S.rows, S.cols)) if S[i, i])
    vectors = [V.column(c) for c in range(rank, A.cols)]
    return hermite_reduce(vectors, A.cols)


def cokernel_structure(A: IntMatrix) -> ZModule:
    """Structure of Z^rows / column span of A."""
    diag = _snf_diagonal(A)
    nonzero = [d for d in diag if d]
    return ZModule(A.rows - len(nonzero), tuple(d for d in nonzero if d >= 2))


class SnfSolver:
    """Solves A x = b for integer x, factoring A once."""

    def __init__(self, A: IntMatrix):
        self.A = A
        self.U, self.S, self.V = smith_normal_form(A)
        self.diag = [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]
        self.rank = sum(1 for d in self.diag if d)

    def solve(self, b):
        """One integer solution of A x = b, or None if none exists."""
        b = tuple(b)
        if len(b) != self.A.rows:
            raise InputError("right-hand side has wrong length")
        c = self.U.apply(b)
        y = [0] * self.A.cols
        for i in range(self.A.rows):
            d = self.diag[i] if i < len(self.diag) else 0
            if d:
                if c[i] % d != 0:
                    return None
                if i < self.A.cols:
                    y[i] = c[i] // d
            elif c[i] != 0:
                return None
        return self.V.apply(y)


def solve(A: IntMatrix, b):
    """One integer solution of A x = b, or None."""
    return SnfSolver(A).solve(b)


class Lattice:
    """Subgroup of Z^n spanned by added vectors, held in row echelon form.

    Membership testing reduces a vector against the echelon basis with
    divisibility checks, in the style of integer lattice arithmetic.
    """

    __slots__ = ("n", "basis", "pivots")

    def __init__(self, n: int, vectors=()):
        self.n = n
        self.basis = []
        self.pivots = []
        for v in vectors:
            self.add(v)

    def add(self, vec):
        v = list(vec)
        if len(v) != self.n:
            raise InputError("vector width mismatch in Lattice.add")
        while True:
            lead = next((c for c in range(self.n) if v[c]), None)
            if lead is None:
                return
            pos = 0
            while pos < len(self.pivots) and self.pivots[pos] < lead:
                pos += 1
            if pos == len(self.pivots) or self.pivots[pos] > lead:
                self.basis.insert(pos, v)
                self.pivots.insert(pos, lead)
                return
            row = self.basis[pos]
            a, b = row[lead], v[lead]
            if b % a == 0:
                q = b // a
                v = [x - q * y for x, y in zip(v, row)]
            else:
                g, x, y = _xgcd(a, b)
                self.basis[pos] = [x * p + y * q2 for p, q2 in zip(row, v)]
                v = [(-(b // g)) * p + (a // g) * q2 for p, q2 in zip(row, v)]

    def add_all(self, vectors):
        for v in vectors:
            self.add(v)

    def __contains__(self, vec) -> bool:
        v = list(vec)
        if len(v) != self.n:
            raise InputError("vector width mismatch in Lattice membership")
        for row, lead in zip(self.basis, self.pivots):
            if any(v[c] for c in range(lead)):
                return False
            if v[lead]:
                q, r = divmod(v[lead], row[lead])
                if r:
                    return False
                v = [x - q * y for x, y in zip(v, row)]
        return not any(v)

    def contains_all(self, vectors) -> bool:
        return all(v in self for v in vectors)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def hnf_basis(self) -> list:
        return hermite_reduce(self.basis, self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice) or self.n != other.n:
            return NotImplemented
        return self.contains_all(other.basis) and other.contains_all(self.basis)

    def __repr__(self):
        return f"Lattice(n={self.n}, rank={self.rank})"


@dataclass(frozen=True)
class HomologyPresentation:
    """ker(d_out)/im(d_in) with generators and relations made explicit.

    kernel holds a Hermite-reduced basis of ker(d_out) as ambient row
    vectors; relations expresses the columns of d_in in that basis, so
    the group is Z^k modulo the column span of relations.
    """

    ambient_dim: int
    kernel: tuple
    relations: IntMatrix
    structure: ZModule

    @property
    def generator_count(self) -> int:
        return len(self.kernel)

    def relation_lattice(self) -> Lattice:
        return Lattice(self.generator_count, self.relations.columns())

    def class_is_zero(self, coords) -> bool:
        return tuple(coords) in self.relation_lattice()


def homology_presentation(d_out: IntMatrix, d_in: IntMatrix) -> HomologyPresentation:
    """Presentation of ker(d_out)/im(d_in).

    Requires d_out * d_in = 0; anything else means the complex handed in
    is broken, which is reported as an internal error.
    """
    if d_out.cols != d_in.rows:
        raise InternalCheckError(
            f"chain spaces disagree: d_out has {d_out.cols} columns, d_in has {d_in.rows} rows"
        )
    if not d_out.mul(d_in).is_zero():
        raise InternalCheckError("differentials do not compose to zero")
    kernel = kernel_basis(d_out)
    k = len(kernel)
    if d_in.cols == 0:
        relations = IntMatrix.zeros(k, 0)
    else:
        # kernel of an integer matrix is a saturated sublattice, so every
        # image column has integer coordinates in the kernel basis
        solver = SnfSolver(IntMatrix.from_columns(kernel, rows=d_out.cols))
        cols = []
        for c in range(d_in.cols):
            x = solver.solve(d_in.column(c))
            if x is None:
                raise InternalCheckError("image vector escaped the kernel lattice")
            cols.append(x)
        relations = IntMatrix.from_columns(cols, rows=k)
    return HomologyPresentation(
        ambient_dim=d_out.cols,
        kernel=tuple(kernel),
        relations=relations,
        structure=cokernel_structure(relations),
    )


def homology_subquotient(d_out: IntMatrix, d_in: IntMatrix) -> ZModule:
    """Structure of ker(d_out)/im(d_in) as an abelian group."""
    return homology_presentation(d_out, d_in).structure


def rational_rank(A: IntMatrix) -> int:
    """Rank over Q by fraction-exact Gaussian elimination.

    Deliberately a separate code path from smith_normal_form so the two
    can cross-check each other.
    """
    work = [[Fraction(x) for x in A.row(r)] for r in range(A.rows)]
    rank = 0
    row = 0
    for col in range(A.cols):
        pivot_row = next((r for r in range(row, A.rows) if work[r][col]), None)
        if pivot_row is None:
            continue
        work[row], work[pivot_row] = work[pivot_row], work[row]
        inv = 1 / work[row][col]
        work[row] = [x * inv for x in work[row]]
        for r in range(A.rows):
            if r != row and work[r][col]:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[row])]
        rank += 1
        row += 1
        if row == A.rows:
            break
    return rank


def det(A: IntMatrix) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction-free)."""
    if A.rows != A.cols:
        raise InputError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    m = A.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]
