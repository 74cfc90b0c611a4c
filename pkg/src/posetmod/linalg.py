"""Exact linear algebra over Q and F_p.

Scalars are :class:`fractions.Fraction` over Q and :class:`ModP` residues
over a prime field.  Matrices are immutable tuples of rows.  Subspaces are
kept in a canonical form (the reduced row echelon form of a spanning set,
read as the columns of a reduced column echelon basis), so two subspaces
are equal exactly when their stored data is equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    FieldError,
    IndefiniteGram,
    NotASubspace,
)


class ModP:
    """Residue class modulo a prime ``p``, stored in ``[0, p)``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ModP(o, self.p) / self

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __lt__(self, other):
        return self.v < self._coerce(other) % self.p

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"{self.v} (mod {self.p})"

    def __str__(self):
        return str(self.v)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Field:
    """Either the rationals (``p is None``) or the prime field F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __call__(self, x):
        """Convert an int, Fraction, ModP or ``"a/b"`` string into this field."""
        if self.p is None and type(x) is Fraction:
            return x
        if isinstance(x, str):
            x = Fraction(x)
        if self.p is None:
            if isinstance(x, ModP):
                raise FieldError("cannot read an F_p residue as a rational")
            return Fraction(x)
        if isinstance(x, ModP):
            if x.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{x.p}")
            return x
        x = Fraction(x)
        return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def describe(self) -> str:
        return "Q" if self.p is None else f"F_{self.p}"

    def encode(self, x) -> int | str:
        """JSON-friendly rendering of a scalar."""
        if self.p is not None:
            return int(x)
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


def sort_key(x):
    if isinstance(x, ModP):
        return (x.v, 1)
    x = Fraction(x)
    return (x.numerator, x.denominator)


# --------------------------------------------------------------------------
# Matrices


class Matrix:
    """Immutable dense matrix over a :class:`Field`.

    ``rows`` and ``cols`` are stored explicitly so that matrices with a zero
    extent (maps into or out of a zero space) keep their shape.
    """

    __slots__ = ("rows", "cols", "data", "field", "_hash")

    def __init__(self, data: Iterable[Iterable], field: Field = QQ, shape=None):
        rows = tuple(tuple(field(x) for x in r) for r in data)
        if shape is None:
            nr = len(rows)
            nc = len(rows[0]) if rows else 0
        else:
            nr, nc = shape
        if len(rows) != nr or any(len(r) != nc for r in rows):
            raise DimensionMismatch(f"entries do not form a {nr}x{nc} grid")
        self.rows = nr
        self.cols = nc
        self.data = rows
        self.field = field
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple, nr: int, nc: int, field: Field) -> "Matrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m.data, m.field, m._hash = nr, nc, rows, field, None
        return m

    @classmethod
    def zeros(cls, nr: int, nc: int, field: Field = QQ) -> "Matrix":
        z = field.zero
        return cls._raw(tuple((z,) * nc for _ in range(nr)), nr, nc, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Matrix":
        z, o = field.zero, field.one
        return cls._raw(
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n, n, field
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int, field: Field = QQ) -> "Matrix":
        for c in columns:
            if len(c) != nrows:
                raise DimensionMismatch("column length differs from row count")
        rows = tuple(tuple(field(c[i]) for c in columns) for i in range(nrows))
        return cls._raw(rows, nrows, len(columns), field)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(
            tuple(tuple(self.data[i][j] for i in range(self.rows)) for j in range(self.cols)),
            self.cols,
            self.rows,
            self.field,
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        z = self.field.zero
        ocols = [other.column(j) for j in range(other.cols)]
        out = []
        for r in self.data:
            row = []
            for c in ocols:
                s = z
                for a, b in zip(r, c):
                    if a and b:
                        s = s + a * b
                row.append(s)
            out.append(tuple(row))
        return Matrix._raw(tuple(out), self.rows, other.cols, self.field)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        z = self.field.zero
        out = []
        for r in self.data:
            s = z
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return tuple(out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
            self.rows,
            self.cols,
            self.field,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix._raw(
            tuple(tuple(c * a for a in r) for r in self.data), self.rows, self.cols, self.field
        )

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def tolist(self) -> list[list]:
        return [list(r) for r in self.data]

    def is_zero(self) -> bool:
        return all(not a for r in self.data for a in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            (a == 1) if i == j else (not a) for i, r in enumerate(self.data) for j, a in enumerate(r)
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(
            tuple(tuple(self.data[i][j] for j in cols) for i in rows),
            len(rows),
            len(cols),
            self.field,
        )

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self.data)
        return f"Matrix({self.rows}x{self.cols}, [{body}], {self.field.describe()})"


def hstack(mats: Sequence[Matrix], nrows: int, field: Field = QQ) -> Matrix:
    cols = []
    for m in mats:
        if m.rows != nrows:
            raise DimensionMismatch("hstack row mismatch")
        cols.extend(m.columns())
    return Matrix.from_columns(cols, nrows, field)


def block_diag(mats: Sequence[Matrix], field: Field = QQ) -> Matrix:
    nr = sum(m.rows for m in mats)
    nc = sum(m.cols for m in mats)
    z = field.zero
    rows = []
    off = 0
    for m in mats:
        for r in m.data:
            rows.append((z,) * off + tuple(r) + (z,) * (nc - off - m.cols))
        off += m.cols
    return Matrix._raw(tuple(rows), nr, nc, field)


def _rref_rows(rows: list[list], ncols: int):
    """Row-reduce in place; return (nonzero reduced rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    n = len(rows)
    for c in range(ncols):
        piv = None
        for i in range(r, n):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        if rows[r][c] != 1:
            inv = 1 / rows[r][c]
            rows[r] = [a * inv if a else a for a in rows[r]]
        pr = rows[r]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows[:r], pivots


def rank(m: Matrix) -> int:
    return len(_rref_rows(list(m.data), m.cols)[1])


def det(m: Matrix):
    if m.rows != m.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = m.rows
    a = [list(r) for r in m.data]
    d = m.field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return m.field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Matrix) -> Matrix:
    n = m.rows
    if m.rows != m.cols:
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = [list(r) + list(e) for r, e in zip(m.data, Matrix.identity(n, m.field).data)]
    red, piv = _rref_rows(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return Matrix([r[n:] for r in red], m.field, shape=(n, n))


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X with ``a @ X == b`` (free variables set to zero), or None."""
    if a.rows != b.rows:
        raise DimensionMismatch("solve: row mismatch")
    aug = [list(r) + list(s) for r, s in zip(a.data, b.data)]
    red, piv = _rref_rows(aug, a.cols + b.cols)
    if piv and piv[-1] >= a.cols:
        return None
    z = a.field.zero
    x = [[z] * b.cols for _ in range(a.cols)]
    for row, c in zip(red, piv):
        x[c] = row[a.cols :]
    return Matrix(x, a.field, shape=(a.cols, b.cols))


# --------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of k^n in canonical form.

    ``vectors`` holds the nonzero rows of the reduced row echelon form of
    any spanning set; read as columns they give the reduced column echelon
    basis with strictly increasing pivot rows.  Construct through
    :func:`canonical_span` or the helpers below, never directly.
    """

    ambient_dim: int
    vectors: tuple
    pivots: tuple
    field: Field = QQ

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.field == other.field
            and self.vectors == other.vectors
        )

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient_dim, self.vectors, self.field))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def rank(self) -> int:
        return len(self.vectors)

    dim = rank

    @property
    def basis(self) -> Matrix:
        return Matrix._raw(
            tuple(tuple(v[i] for v in self.vectors) for i in range(self.ambient_dim)),
            self.ambient_dim,
            self.rank,
            self.field,
        )

    def key(self) -> tuple:
        """Deterministic ordering key: rank first, then basis entries."""
        return (self.rank, tuple(sort_key(a) for v in self.vectors for a in v))

    def is_zero(self) -> bool:
        return not self.vectors

    def is_full(self) -> bool:
        return self.rank == self.ambient_dim

    def coordinates(self, v: Sequence):
        """Coordinates of ``v`` in ``vectors``; None when v is not in the span."""
        coords = [v[c] for c in self.pivots]
        z = self.field.zero
        for i in range(self.ambient_dim):
            s = z
            for a, w in zip(coords, self.vectors):
                if a and w[i]:
                    s = s + a * w[i]
            if s != v[i]:
                return None
        return tuple(coords)

    def contains_vector(self, v: Sequence) -> bool:
        return self.coordinates(v) is not None

    def __le__(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(other.contains_vector(v) for v in self.vectors)

    def __lt__(self, other: "Subspace") -> bool:
        return self.rank < other.rank and self <= other

    def __repr__(self):
        vs = ", ".join("(" + ",".join(str(a) for a in v) + ")" for v in self.vectors)
        return f"Subspace(dim {self.rank} in {self.ambient_dim}: [{vs}])"


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dims {a.ambient_dim} != {b.ambient_dim}")
    if a.field != b.field:
        raise FieldError("subspaces over different fields")


def span_of(vectors: Iterable[Sequence], ambient_dim: int, field: Field = QQ) -> Subspace:
    rows = [[field(a) for a in v] for v in vectors]
    for r in rows:
        if len(r) != ambient_dim:
            raise DimensionMismatch(f"vector of length {len(r)} in k^{ambient_dim}")
    red, piv = _rref_rows(rows, ambient_dim)
    return Subspace(ambient_dim, tuple(tuple(r) for r in red), tuple(piv), field)


def canonical_span(generators: Matrix) -> Subspace:
    """Column space of ``generators`` in canonical form."""
    return span_of(generators.columns(), generators.rows, generators.field)


def zero_space(n: int, field: Field = QQ) -> Subspace:
    return Subspace(n, (), (), field)


def full_space(n: int, field: Field = QQ) -> Subspace:
    return canonical_span(Matrix.identity(n, field))


def kernel(m: Matrix) -> Subspace:
    red, piv = _rref_rows(list(m.data), m.cols)
    free = [c for c in range(m.cols) if c not in set(piv)]
    z, o = m.field.zero, m.field.one
    vecs = []
    for f in free:
        v = [z] * m.cols
        v[f] = o
        for row, c in zip(red, piv):
            v[c] = -row[f]
        vecs.append(v)
    return span_of(vecs, m.cols, m.field)


def image(m: Matrix, w: Subspace | None = None) -> Subspace:
    """``m(w)``; the whole column space when ``w`` is None."""
    if w is None:
        return canonical_span(m)
    if w.ambient_dim != m.cols:
        raise DimensionMismatch("image: subspace not in the domain")
    return span_of([m.apply(v) for v in w.vectors], m.rows, m.field)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus intersection."""
    _check_ambient(a, b)
    n = a.ambient_dim
    if a.is_zero() or b.is_zero():
        return zero_space(n, a.field)
    if a.is_full():
        return b
    if b.is_full():
        return a
    z = a.field.zero
    rows = [list(v) + list(v) for v in a.vectors] + [list(v) + [z] * n for v in b.vectors]
    red, piv = _rref_rows(rows, 2 * n)
    vecs = [r[n:] for r, c in zip(red, piv) if c >= n]
    return span_of(vecs, n, a.field)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return span_of(list(a.vectors) + list(b.vectors), a.ambient_dim, a.field)


def sum_all(spaces: Iterable[Subspace], ambient_dim: int, field: Field = QQ) -> Subspace:
    vecs = []
    for s in spaces:
        vecs.extend(s.vectors)
    return span_of(vecs, ambient_dim, field)


def annihilator(w: Subspace) -> Matrix:
    """Rows spanning the linear forms vanishing on ``w`` (so its kernel is w)."""
    if w.is_zero():
        return Matrix.identity(w.ambient_dim, w.field)
    ann = kernel(Matrix(w.vectors, w.field, shape=(w.rank, w.ambient_dim)))
    return Matrix(ann.vectors, w.field, shape=(ann.rank, w.ambient_dim))


def preimage(m: Matrix, w: Subspace) -> Subspace:
    """``{v : m v in w}``."""
    if m.rows != w.ambient_dim:
        raise DimensionMismatch("preimage: subspace not in the codomain")
    if w.is_full():
        return full_space(m.cols, m.field)
    return kernel(annihilator(w) @ m)


# --------------------------------------------------------------------------
# Inner products


@dataclass(frozen=True)
class Gram:
    """Symmetric bilinear form given by its matrix in standard coordinates."""

    matrix: Matrix

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols or self.matrix != self.matrix.T:
            raise IndefiniteGram("Gram matrix must be square and symmetric")

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Gram":
        return cls(Matrix.identity(n, field))

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def form(self, v: Sequence, w: Sequence):
        return _dot(v, self.matrix.apply(w), self.matrix.field)


def _dot(v, w, field):
    s = field.zero
    for a, b in zip(v, w):
        if a and b:
            s = s + a * b
    return s


def is_positive_definite(g: Gram) -> bool:
    """Sylvester's criterion with exact leading principal minors."""
    m = g.matrix
    if not m.field.is_rational:
        raise FieldError("positive definiteness needs an ordered field")
    return all(det(m.submatrix(range(k), range(k))) > 0 for k in range(1, m.rows + 1))


def complement_in(w1: Subspace, w2: Subspace) -> Subspace:
    """Pivot-greedy complement of ``w1`` inside ``w2``.

    Walks the canonical basis of ``w2`` in order, keeping each vector that is
    not already in the span of ``w1`` plus the vectors kept so far.
    """
    _check_ambient(w1, w2)
    if not w1 <= w2:
        raise NotASubspace("complement_in requires w1 <= w2")
    acc = w1
    kept = []
    for v in w2.vectors:
        if not acc.contains_vector(v):
            kept.append(v)
            acc = span_of(list(acc.vectors) + [v], acc.ambient_dim, acc.field)
    return span_of(kept, w2.ambient_dim, w2.field)


def rel_orth_complement(w1: Subspace, w2: Subspace, g: Gram, check: bool = True) -> Subspace:
    """``(w1 in w2)^perp``: the g-orthogonal complement of w1 inside w2."""
    _check_ambient(w1, w2)
    if not w1.field.is_rational:
        raise FieldError("orthogonal complements need Q; use complement_in over F_p")
    if g.dim != w1.ambient_dim:
        raise DimensionMismatch("Gram size differs from ambient dimension")
    if check and not is_positive_definite(g):
        raise IndefiniteGram("Gram matrix is not positive definite")
    if not w1 <= w2:
        raise NotASubspace("rel_orth_complement requires w1 <= w2")
    if w1.is_zero():
        return w2
    f = w1.field
    gb = [g.matrix.apply(b) for b in w2.vectors]
    cons = Matrix([[_dot(u, x, f) for x in gb] for u in w1.vectors], f, shape=(w1.rank, w2.rank))
    ker = kernel(cons)
    z = f.zero
    vecs = []
    for c in ker.vectors:
        v = [z] * w2.ambient_dim
        for a, b in zip(c, w2.vectors):
            if a:
                v = [x + a * y for x, y in zip(v, b)]
        vecs.append(v)
    return span_of(vecs, w2.ambient_dim, f)


def restrict_to(m: Matrix, dom: Subspace, cod: Subspace) -> Matrix:
    """Matrix of ``m`` from dom's canonical basis to cod's canonical basis.

    Raises NotASubspace when m(dom) is not contained in cod.
    """
    cols = []
    for v in dom.vectors:
        c = cod.coordinates(m.apply(v))
        if c is None:
            raise NotASubspace("image leaves the target subspace")
        cols.append(c)
    return Matrix.from_columns(cols, cod.rank, m.field)


def project_coordinates(v: Sequence, target: Subspace, along: Subspace) -> tuple:
    """Coordinates (in target's basis) of the target-component of v for
    the direct sum ``target + along``."""
    n = target.ambient_dim
    f = target.field
    a = Matrix.from_columns(list(target.vectors) + list(along.vectors), n, f)
    x = solve(a, Matrix([[c] for c in v], f, shape=(n, 1)))
    if x is None:
        raise NotASubspace("vector outside target + along")
    return tuple(x.data[i][0] for i in range(target.rank))
