"""Dense exact linear algebra over a FieldDescriptor.

Matrices act on column vectors.  Subspaces are stored by a canonical reduced
row-echelon basis (one basis vector per row), so two subspaces are equal iff
their bases are identical.  All routines skip zero entries eagerly; the
matrices met in practice (twists, derivative maps on word bases) are sparse.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .field import FieldDescriptor, FieldElement, FieldMismatchError


class ExactMatrix:
    """Immutable rows x cols grid of FieldElements sharing one field."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: FieldDescriptor, entries: Sequence[Sequence], cols: Optional[int] = None):
        data = tuple(tuple(field.scalar(x) for x in row) for row in entries)
        if cols is None:
            cols = len(data[0]) if data else 0
        if any(len(row) != cols for row in data):
            raise ValueError("ragged matrix rows")
        self.field = field
        self.rows = len(data)
        self.cols = cols
        self.entries = data

    @classmethod
    def _raw(cls, field, entries, cols):
        # entries already FieldElements of `field`; no copying or coercion
        m = cls.__new__(cls)
        m.field = field
        m.rows = len(entries)
        m.cols = cols
        m.entries = tuple(tuple(r) for r in entries)
        return m

    @classmethod
    def zeros(cls, field: FieldDescriptor, rows: int, cols: int) -> "ExactMatrix":
        z = field.zero()
        return cls._raw(field, [[z] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int) -> "ExactMatrix":
        z, o = field.zero(), field.one()
        return cls._raw(field, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def _check(self, other: "ExactMatrix"):
        if other.field != self.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} matrices")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        z = self.field.zero()
        sparse_other = [[(j, x) for j, x in enumerate(r) if x] for r in other.entries]
        out = []
        for r in self.entries:
            acc = [z] * other.cols
            for l, a in enumerate(r):
                if a:
                    for j, b in sparse_other[l]:
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return ExactMatrix._raw(self.field, out, other.cols)

    def apply(self, vector: Sequence[FieldElement]) -> tuple:
        """Matrix-vector product."""
        z = self.field.zero()
        nz = [(j, x) for j, x in enumerate(vector) if x]
        out = []
        for r in self.entries:
            acc = z
            for j, x in nz:
                a = r[j]
                if a:
                    acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix._raw(
            self.field,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            self.cols,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix._raw(
            self.field,
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            self.cols,
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.field, [[-a for a in r] for r in self.entries], self.cols)

    def scale(self, c) -> "ExactMatrix":
        c = self.field.scalar(c)
        return ExactMatrix._raw(self.field, [[c * a for a in r] for r in self.entries], self.cols)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.field, [list(c) for c in zip(*self.entries)] if self.rows else
                                [[] for _ in range(self.cols)], self.rows)

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return ExactMatrix._raw(
            self.field, [r + s for r, s in zip(self.entries, other.entries)], self.cols + other.cols
        )

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return ExactMatrix._raw(self.field, self.entries + other.entries, self.cols)

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]

    def __repr__(self):
        return f"ExactMatrix({self.to_strings()})"


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product; row index (i, k) -> i * b.rows + k."""
    a._check(b)
    z = a.field.zero()
    out = []
    for ra in a.entries:
        for rb in b.entries:
            row = []
            for x in ra:
                if x:
                    row.extend(x * y if y else z for y in rb)
                else:
                    row.extend([z] * b.cols)
            out.append(row)
    return ExactMatrix._raw(a.field, out, a.cols * b.cols)


# ---------- row reduction ----------

def _rref_in_place(rows: list[list], ncols: int) -> list[int]:
    """Gauss-Jordan on a list of mutable rows; returns pivot columns.

    Nonzero rows end up first; rows beyond the rank are zero.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        lead = prow[c]
        if lead != 1:
            inv = lead.inverse()
            prow = [x * inv if x else x for x in prow]
            rows[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                row = rows[i]
                f = row[c]
                if f:
                    for j in nz:
                        row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Canonical reduced row-echelon form (same shape) and its pivot columns."""
    rows = [list(r) for r in m.entries]
    pivots = _rref_in_place(rows, m.cols)
    return ExactMatrix._raw(m.field, rows, m.cols), pivots


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


def solve_right(m: ExactMatrix, t: ExactMatrix) -> Optional[ExactMatrix]:
    """Some Z with m @ Z == t (free variables set to zero), or None."""
    if m.rows != t.rows:
        raise ValueError("M and T must have the same number of rows")
    m._check(t)
    aug = [list(a) + list(b) for a, b in zip(m.entries, t.entries)]
    pivots = _rref_in_place(aug, m.cols + t.cols)
    if any(p >= m.cols for p in pivots):
        return None
    z = m.field.zero()
    sol = [[z] * t.cols for _ in range(m.cols)]
    for r, p in enumerate(pivots):
        sol[p] = aug[r][m.cols:]
    return ExactMatrix._raw(m.field, sol, t.cols)


# ---------- subspaces ----------

class Subspace:
    """Subspace of F^ambient_dim with a canonical RREF basis."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: FieldDescriptor, ambient_dim: int, basis_rows: Iterable[Sequence] = ()):
        rows = [[field.scalar(x) for x in r] for r in basis_rows]
        if any(len(r) != ambient_dim for r in rows):
            raise ValueError("vector length does not match ambient dimension")
        pivots = _rref_in_place(rows, ambient_dim)
        self._set(field, ambient_dim, rows[: len(pivots)], pivots)

    def _set(self, field, ambient_dim, rows, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = ExactMatrix._raw(field, rows, ambient_dim)
        self.pivots = tuple(pivots)

    @classmethod
    def _from_vectors(cls, field, ambient_dim, vectors):
        # vectors: FieldElement sequences already in `field`
        rows = [list(v) for v in vectors if any(v)]
        pivots = _rref_in_place(rows, ambient_dim)
        s = cls.__new__(cls)
        s._set(field, ambient_dim, rows[: len(pivots)], pivots)
        return s

    @classmethod
    def zero(cls, field: FieldDescriptor, ambient_dim: int) -> "Subspace":
        return cls._from_vectors(field, ambient_dim, [])

    @classmethod
    def full(cls, field: FieldDescriptor, ambient_dim: int) -> "Subspace":
        return cls._from_vectors(field, ambient_dim, ExactMatrix.identity(field, ambient_dim).entries)

    @classmethod
    def span(cls, field: FieldDescriptor, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        return cls(field, ambient_dim, vectors)

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def vectors(self) -> list[tuple]:
        return list(self.basis.entries)

    def reduce(self, vector: Sequence[FieldElement]) -> tuple:
        """Canonical representative of vector modulo the subspace (zero on pivots)."""
        v = list(vector)
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        for row, p in zip(self.basis.entries, self.pivots):
            f = v[p]
            if f:
                for j in range(p, self.ambient_dim):
                    if row[j]:
                        v[j] = v[j] - f * row[j]
        return tuple(v)

    def contains(self, vector: Sequence[FieldElement]) -> bool:
        return not any(self.reduce(vector))

    def __contains__(self, vector) -> bool:
        return self.contains(vector)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis.entries)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace._from_vectors(self.field, self.ambient_dim, self.vectors() + other.vectors())

    def annihilator(self) -> "Subspace":
        """All y with y . w = 0 for every w in the subspace."""
        return kernel(self.basis) if self.dim else Subspace.full(self.field, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        constraints = self.annihilator().vectors() + other.annihilator().vectors()
        if not constraints:
            return self
        return kernel(ExactMatrix._raw(self.field, constraints, self.ambient_dim))

    def image(self, m: ExactMatrix) -> "Subspace":
        return Subspace._from_vectors(self.field, m.rows, [m.apply(v) for v in self.basis.entries])

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def kernel(m: ExactMatrix) -> Subspace:
    """Null space {v : m v = 0} in ambient dimension m.cols."""
    rows = [list(r) for r in m.entries]
    pivots = _rref_in_place(rows, m.cols)
    pivot_set = set(pivots)
    z, o = m.field.zero(), m.field.one()
    vectors = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = [z] * m.cols
        v[f] = o
        for r, p in enumerate(pivots):
            x = rows[r][f]
            if x:
                v[p] = -x
        vectors.append(v)
    return Subspace._from_vectors(m.field, m.cols, vectors)


def preimage(l: ExactMatrix, w: Subspace) -> Subspace:
    """{v : l v in w}."""
    if l.rows != w.ambient_dim:
        raise ValueError("map codomain does not match subspace ambient dimension")
    q = w.annihilator()
    if q.dim == 0:
        return Subspace.full(l.field, l.cols)
    return kernel(q.basis @ l)


def largest_invariant_subspace(maps: Sequence[ExactMatrix], u: Subspace) -> Subspace:
    """Largest W inside u with T(W) contained in W for every T in maps.

    Fixed point of W <- W cap (cap_T T^-1(W)), solved in coordinates of the
    current basis of W so each step is a kernel of (codim * #maps) x dim(W).
    """
    n = u.ambient_dim
    for t in maps:
        if t.shape != (n, n):
            raise ValueError("maps must be square of the subspace's ambient size")
    w = u
    while w.dim and w.codim:
        q = w.annihilator().basis
        basis = w.basis.entries
        # q @ t is reused for every basis vector of w
        constraints = []
        for t in maps:
            qt = q @ t
            for qrow in qt.entries:
                nz = [(j, x) for j, x in enumerate(qrow) if x]
                row = []
                for b in basis:
                    acc = w.field.zero()
                    for j, x in nz:
                        y = b[j]
                        if y:
                            acc = acc + x * y
                    row.append(acc)
                constraints.append(row)
        k = kernel(ExactMatrix._raw(w.field, constraints, len(basis)))
        if k.dim == w.dim:
            return w
        z = w.field.zero()
        new_vectors = []
        for c in k.basis.entries:
            v = [z] * n
            for coeff, b in zip(c, basis):
                if coeff:
                    for j, y in enumerate(b):
                        if y:
                            v[j] = v[j] + coeff * y
            new_vectors.append(v)
        w = Subspace._from_vectors(w.field, n, new_vectors)
    return w


def invariant_closure(maps: Sequence[ExactMatrix], seeds: Sequence[Sequence], field: FieldDescriptor,
                      ambient_dim: int) -> Subspace:
    """Smallest subspace containing seeds and stable under every map."""
    span = Subspace._from_vectors(field, ambient_dim, [])
    queue = [tuple(field.scalar(x) for x in s) for s in seeds]
    while queue:
        v = queue.pop()
        if span.contains(v):
            continue
        span = Subspace._from_vectors(field, ambient_dim, span.vectors() + [v])
        queue.extend(t.apply(v) for t in maps)
    return span
