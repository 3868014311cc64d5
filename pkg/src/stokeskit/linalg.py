"""Exact rational linear algebra and bounded cochain complexes.

Everything here works over ``fractions.Fraction``; there is no floating point
anywhere.  Two matrix containers exist: :class:`QMatrix` (dense, immutable,
used for structure maps) and :class:`SparseMatrix` (row dictionaries, used for
the large constraint systems that show up in Hom and Ext computations).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "QMatrix",
    "SparseMatrix",
    "CochainComplex",
    "parse_q",
    "format_q",
    "rref",
    "rank",
    "kernel",
    "image",
    "cokernel",
    "solve",
    "sparse_solve",
    "cohomology_dims",
    "euler_char",
    "sparse_kernel",
]


def parse_q(value) -> Fraction:
    """Parse ``"p/q"`` strings, ints and Fractions into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}: pass an exact 'p/q' string")
    return Fraction(value)


def format_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class DimensionError(ValueError):
    pass


class QMatrix:
    """Dense immutable matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, data: Iterable[Iterable] = (), rows: int | None = None, cols: int | None = None):
        body = tuple(tuple(parse_q(x) for x in row) for row in data)
        if rows is None:
            rows = len(body)
        if cols is None:
            cols = len(body[0]) if body else 0
        if len(body) != rows or any(len(r) != cols for r in body):
            raise DimensionError(f"ragged or mis-sized matrix data for shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._data = body
        self._hash = None

    @classmethod
    def _raw(cls, body: tuple, rows: int, cols: int) -> "QMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m._data, m._hash = rows, cols, body, None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        z = Fraction(0)
        return cls._raw(tuple((z,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        one, z = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "QMatrix":
        if not columns:
            return cls.zeros(rows, 0)
        return cls([[col[i] for col in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def block_diag(cls, blocks: Sequence["QMatrix"]) -> "QMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                out[r0 + i][c0:c0 + b.cols] = b._data[i]
            r0 += b.rows
            c0 += b.cols
        return cls._raw(tuple(tuple(r) for r in out), rows, cols)

    @classmethod
    def hstack(cls, blocks: Sequence["QMatrix"], rows: int | None = None) -> "QMatrix":
        if not blocks:
            return cls.zeros(rows or 0, 0)
        r = blocks[0].rows
        if any(b.rows != r for b in blocks):
            raise DimensionError("hstack: row counts differ")
        body = tuple(sum((b._data[i] for b in blocks), ()) for i in range(r))
        return cls._raw(body, r, sum(b.cols for b in blocks))

    @classmethod
    def vstack(cls, blocks: Sequence["QMatrix"], cols: int | None = None) -> "QMatrix":
        if not blocks:
            return cls.zeros(0, cols or 0)
        c = blocks[0].cols
        if any(b.cols != c for b in blocks):
            raise DimensionError("vstack: column counts differ")
        body = sum((b._data for b in blocks), ())
        return cls._raw(body, len(body), c)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join("[" + ", ".join(format_q(x) for x in r) + "]" for r in self._data)
        return f"QMatrix({self.rows}x{self.cols}: [{inner}])"

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"add: {self.shape} vs {other.shape}")
        return QMatrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows, self.cols)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"sub: {self.shape} vs {other.shape}")
        return QMatrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows, self.cols)

    def __neg__(self) -> "QMatrix":
        return QMatrix._raw(tuple(tuple(-a for a in r) for r in self._data), self.rows, self.cols)

    def scale(self, c) -> "QMatrix":
        c = parse_q(c)
        return QMatrix._raw(tuple(tuple(c * a for a in r) for r in self._data), self.rows, self.cols)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"matmul: {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0:
            return QMatrix.zeros(self.rows, other.cols)
        if self.cols == 0:
            return QMatrix.zeros(self.rows, other.cols)
        zero = Fraction(0)
        brows = other._data
        out = []
        for r in self._data:
            acc = [zero] * other.cols
            for k, a in enumerate(r):
                if a:
                    for j, b in enumerate(brows[k]):
                        if b:
                            acc[j] += a * b
            out.append(tuple(acc))
        return QMatrix._raw(tuple(out), self.rows, other.cols)

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise DimensionError("apply: vector length mismatch")
        return tuple(sum((a * v for a, v in zip(r, vec) if a and v), Fraction(0)) for r in self._data)

    @property
    def T(self) -> "QMatrix":
        if self.rows == 0:
            return QMatrix.zeros(self.cols, 0)
        return QMatrix._raw(tuple(zip(*self._data)), self.cols, self.rows)

    def is_zero(self) -> bool:
        return all(not a for r in self._data for a in r)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "QMatrix":
        return QMatrix._raw(tuple(tuple(self._data[i][j] for j in col_idx) for i in row_idx),
                            len(row_idx), len(col_idx))

    def rank(self) -> int:
        return rref(self)[1]

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionError("det of non-square matrix")
        a = [list(r) for r in self._data]
        n = self.rows
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det *= a[c][c]
            inv = 1 / a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] * inv
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return det

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.det() != 0

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise DimensionError("inverse of non-square matrix")
        n = self.rows
        aug = QMatrix.hstack([self, QMatrix.identity(n)]) if n else self
        red, r, piv = _rref_full(aug)
        if r < n or any(p >= n for p in piv[:n]):
            raise ZeroDivisionError("matrix is singular")
        return red.submatrix(range(n), range(n, 2 * n))


def _rref_full(m: QMatrix) -> tuple[QMatrix, int, list[int]]:
    a = [list(r) for r in m._data]
    rows, cols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return QMatrix._raw(tuple(tuple(x) for x in a), rows, cols), r, pivots


def rref(m: QMatrix) -> tuple[QMatrix, int]:
    """Reduced row echelon form and rank (first nonzero entry is the pivot)."""
    red, r, _ = _rref_full(m)
    return red, r


def rank(m: QMatrix) -> int:
    return _rref_full(m)[1]


def kernel(m: QMatrix) -> list[tuple]:
    """Canonical kernel basis read off the RREF: one vector per free column."""
    red, r, piv = _rref_full(m)
    free = [c for c in range(m.cols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -red[i, f]
        basis.append(tuple(v))
    return basis


def image(m: QMatrix) -> list[tuple]:
    """Canonical column-space basis: nonzero rows of RREF(M^T)."""
    red, r, _ = _rref_full(m.T)
    return [red.row(i) for i in range(r)]


@dataclass(frozen=True)
class Cokernel:
    dim: int
    projection: QMatrix   # dim x m, projection @ M == 0, surjective
    section: QMatrix      # m x dim, projection @ section == identity


def cokernel(m: QMatrix) -> Cokernel:
    """Cokernel of ``m: Q^cols -> Q^rows`` with a projection and a coordinate section.

    The complement of the image is spanned by the standard vectors at the
    non-pivot positions of the image basis, so ``section`` is an inclusion of
    coordinates and the output is canonical.
    """
    rows = m.rows
    img = image(m)
    piv = []
    for v in img:
        piv.append(next(i for i, x in enumerate(v) if x))
    comp = [j for j in range(rows) if j not in set(piv)]
    c = len(comp)
    if c == 0:
        return Cokernel(0, QMatrix.zeros(0, rows), QMatrix.zeros(rows, 0))
    if not img:
        ident = QMatrix.identity(rows)
        return Cokernel(rows, ident, ident)
    cols = [list(v) for v in img]
    for j in comp:
        e = [Fraction(0)] * rows
        e[j] = Fraction(1)
        cols.append(e)
    basis = QMatrix.from_columns(cols, rows)
    inv = basis.inverse()
    proj = inv.submatrix(range(len(img), rows), range(rows))
    sec = QMatrix.from_columns([cols[len(img) + k] for k in range(c)], rows)
    return Cokernel(c, proj, sec)


def solve(m: QMatrix, b: Sequence) -> tuple | None:
    """One solution x of ``m x = b`` (free variables set to 0), or None."""
    b = [parse_q(x) for x in b]
    if len(b) != m.rows:
        raise DimensionError("solve: right-hand side has wrong length")
    aug = QMatrix([list(m.row(i)) + [b[i]] for i in range(m.rows)], m.rows, m.cols + 1)
    red, r, piv = _rref_full(aug)
    if piv and piv[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for i, p in enumerate(piv):
        x[p] = red[i, m.cols]
    return tuple(x)


def solve_matrix(a: QMatrix, b: QMatrix) -> QMatrix | None:
    """Solve ``a X = b`` column by column; None if some column is inconsistent."""
    cols = []
    for j in range(b.cols):
        x = solve(a, b.column(j))
        if x is None:
            return None
        cols.append(x)
    return QMatrix.from_columns(cols, a.cols)


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Row-dictionary sparse matrix; only what the Hom/Ext code needs."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: dict[int, dict[int, Fraction]] | None = None):
        self.rows = rows
        self.cols = cols
        self.data = {i: dict(r) for i, r in (data or {}).items() if r}

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def add(self, i: int, j: int, value) -> None:
        if not value:
            return
        row = self.data.setdefault(i, {})
        v = row.get(j, 0) + value
        if v:
            row[j] = v
        else:
            del row[j]
            if not row:
                del self.data[i]

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"matmul: {self.shape} @ {other.shape}")
        out = SparseMatrix(self.rows, other.cols)
        for i, row in self.data.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for j, b in other.data.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out.data[i] = acc
        return out

    def is_zero(self) -> bool:
        return not self.data

    def to_dense(self) -> QMatrix:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for i, row in self.data.items():
            for j, v in row.items():
                out[i][j] = Fraction(v)
        return QMatrix(out, self.rows, self.cols)

    @classmethod
    def from_dense(cls, m: QMatrix) -> "SparseMatrix":
        s = cls(m.rows, m.cols)
        for i in range(m.rows):
            r = {j: v for j, v in enumerate(m.row(i)) if v}
            if r:
                s.data[i] = r
        return s

    def rank(self) -> int:
        return len(_sparse_rref(list(self.data.values()))[0])


def _sparse_rref(rows: Iterable[dict]) -> tuple[dict[int, dict], list[int]]:
    """Fully reduced echelon form of sparse rows; returns {pivot_col: row}."""
    pivots: dict[int, dict] = {}
    for raw in rows:
        row = {j: Fraction(v) for j, v in raw.items() if v}
        while True:
            hit = next((j for j in row if j in pivots), None)
            if hit is None:
                break
            f = row[hit]
            for j, v in pivots[hit].items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        if not row:
            continue
        p = min(row)
        inv = 1 / row[p]
        row = {j: v * inv for j, v in row.items()}
        for q, prow in pivots.items():
            f = prow.get(p)
            if f:
                for j, v in row.items():
                    nv = prow.get(j, 0) - f * v
                    if nv:
                        prow[j] = nv
                    else:
                        prow.pop(j, None)
        pivots[p] = row
    return pivots, sorted(pivots)


def sparse_kernel(rows: Iterable[dict], ncols: int) -> list[tuple]:
    """Canonical kernel basis of the linear system given by sparse rows."""
    pivots, order = _sparse_rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    # column -> list of (pivot, coefficient) to read off the kernel quickly
    by_col: dict[int, list[tuple[int, Fraction]]] = {}
    for p, row in pivots.items():
        for j, v in row.items():
            if j != p:
                by_col.setdefault(j, []).append((p, v))
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for p, coeff in by_col.get(f, ()):
            v[p] = -coeff
        basis.append(tuple(v))
    return basis


def sparse_rank(rows: Iterable[dict]) -> int:
    return len(_sparse_rref(rows)[0])


# ---------------------------------------------------------------------------
# cochain complexes


class CochainComplex:
    """Bounded cochain complex ``C^lo -> ... -> C^hi`` of rational vector spaces.

    ``differentials[k]`` maps degree ``lo + k`` to ``lo + k + 1`` and has shape
    ``dims[k+1] x dims[k]``.  ``d o d = 0`` is verified on construction.
    """

    def __init__(self, lo: int, dims: Sequence[int], differentials: Sequence, check: bool = True):
        self.lo = lo
        self.dims = tuple(int(d) for d in dims)
        self.differentials = tuple(differentials)
        if len(self.differentials) != max(len(self.dims) - 1, 0):
            raise DimensionError("need exactly one differential per consecutive pair of degrees")
        for k, d in enumerate(self.differentials):
            if tuple(d.shape) != (self.dims[k + 1], self.dims[k]):
                raise DimensionError(
                    f"differential in degree {lo + k} has shape {d.shape}, "
                    f"expected {(self.dims[k + 1], self.dims[k])}")
        if check:
            for k in range(len(self.differentials) - 1):
                if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                    raise ValueError(f"d o d != 0 starting in degree {lo + k}")

    @property
    def degrees(self) -> range:
        return range(self.lo, self.lo + len(self.dims))

    def _ranks(self) -> list[int]:
        return [d.rank() for d in self.differentials]

    def cohomology_dims(self) -> dict[int, int]:
        ranks = self._ranks()
        out = {}
        for k, n in enumerate(self.dims):
            out_rank = ranks[k] if k < len(ranks) else 0
            in_rank = ranks[k - 1] if k > 0 else 0
            out[self.lo + k] = n - out_rank - in_rank
        return out

    def euler_char(self) -> int:
        chain = sum((-1) ** (self.lo + k) * n for k, n in enumerate(self.dims))
        coh = sum((-1) ** n * h for n, h in self.cohomology_dims().items())
        assert chain == coh, "Euler characteristic mismatch between chains and cohomology"
        return chain


def cohomology_dims(c: CochainComplex) -> dict[int, int]:
    return c.cohomology_dims()


def euler_char(c: CochainComplex) -> int:
    return c.euler_char()


def sparse_solve(rows: Sequence[dict], rhs: Sequence, ncols: int) -> tuple | None:
    """One solution of the sparse system ``rows . x = rhs`` (free variables 0), or None."""
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = Fraction(b)
        aug.append(row)
    pivots, _ = _sparse_rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for p, row in pivots.items():
        x[p] = row.get(ncols, Fraction(0))
    return tuple(x)
