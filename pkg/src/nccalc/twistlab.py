"""Twists (endomorphisms of V (x) V) and the Yang-Baxter family of checks.

A twist on n generators is an n^2 x n^2 matrix acting on column vectors.
Composite index (a, b) -> (a - 1) * n + (b - 1); entry [(k, l), (i, j)] is the
coefficient of x^k (x) x^l in the image of x^i (x) x^j, i.e. alpha^{ij}_{kl}.
Triples use (a, b, c) -> (a - 1) n^2 + (b - 1) n + (c - 1), the same
lexicographic order as degree-3 words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .exactmath import (
    ExactMatrix,
    FieldDescriptor,
    QQ,
    FieldElement,
    Subspace,
    kernel,
    kron,
    solve_right,
)
from .freealg import NcPoly, from_coords


def pair_index(a: int, b: int, n: int) -> int:
    return (a - 1) * n + (b - 1)


class _Operator:
    """Shared arithmetic for twists and triple operators."""

    __slots__ = ("n", "matrix")
    _power = 2

    def __init__(self, n: int, matrix: ExactMatrix):
        size = n ** self._power
        if matrix.shape != (size, size):
            raise ValueError(f"expected a {size} x {size} matrix, got {matrix.shape}")
        self.n = n
        self.matrix = matrix

    @property
    def field(self) -> FieldDescriptor:
        return self.matrix.field

    def _same(self, other):
        if type(other) is not type(self) or other.n != self.n:
            raise ValueError("operators must have the same type and generator count")

    def __matmul__(self, other):
        self._same(other)
        return type(self)(self.n, self.matrix @ other.matrix)

    def __add__(self, other):
        self._same(other)
        return type(self)(self.n, self.matrix + other.matrix)

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.n, self.matrix - other.matrix)

    def __neg__(self):
        return type(self)(self.n, -self.matrix)

    def scale(self, c):
        return type(self)(self.n, self.matrix.scale(c))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = type(self)(self.n, ExactMatrix.identity(self.field, self.n ** self._power))
        for _ in range(k):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.n == other.n and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.n, self.matrix))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, {self.matrix.to_strings()})"


class Twist(_Operator):
    """Endomorphism of V (x) V."""

    __slots__ = ()
    _power = 2

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int) -> "Twist":
        return cls(n, ExactMatrix.identity(field, n * n))

    @classmethod
    def zero(cls, field: FieldDescriptor, n: int) -> "Twist":
        return cls(n, ExactMatrix.zeros(field, n * n, n * n))

    @classmethod
    def flip(cls, field: FieldDescriptor, n: int) -> "Twist":
        z, o = field.zero(), field.one()
        rows = [[z] * (n * n) for _ in range(n * n)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                rows[pair_index(j, i, n)][pair_index(i, j, n)] = o
        return cls(n, ExactMatrix._raw(field, rows, n * n))

    @classmethod
    def from_tensor(cls, field: FieldDescriptor, n: int,
                    entries: Mapping[tuple[int, int, int, int], object]) -> "Twist":
        """Build from sparse alpha^{ij}_{kl} given as {(i, j, k, l): value}."""
        z = field.zero()
        rows = [[z] * (n * n) for _ in range(n * n)]
        for (i, j, k, l), v in entries.items():
            for idx in (i, j, k, l):
                if not 1 <= idx <= n:
                    raise ValueError(f"tensor index {idx} out of range 1..{n}")
            rows[pair_index(k, l, n)][pair_index(i, j, n)] = field.scalar(v)
        return cls(n, ExactMatrix._raw(field, rows, n * n))

    def coefficient(self, i: int, j: int, k: int, l: int) -> FieldElement:
        """alpha^{ij}_{kl}."""
        return self.matrix[pair_index(k, l, self.n), pair_index(i, j, self.n)]

    def tensor_entries(self) -> dict[tuple[int, int, int, int], FieldElement]:
        out = {}
        n = self.n
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    for l in range(1, n + 1):
                        c = self.coefficient(i, j, k, l)
                        if c:
                            out[(i, j, k, l)] = c
        return out

    def polynomial(self, coeffs: Sequence) -> "Twist":
        """sum_k coeffs[k] * self^k."""
        result = Twist.zero(self.field, self.n)
        power = Twist.identity(self.field, self.n)
        for c in coeffs:
            result = result + power.scale(c)
            power = power @ self
        return result


class TripleOperator(_Operator):
    """Endomorphism of V (x) V (x) V."""

    __slots__ = ()
    _power = 3


def _eye(field, n):
    return ExactMatrix.identity(field, n)


def lift12(t: Twist) -> TripleOperator:
    return TripleOperator(t.n, kron(t.matrix, _eye(t.field, t.n)))


def lift23(t: Twist) -> TripleOperator:
    return TripleOperator(t.n, kron(_eye(t.field, t.n), t.matrix))


def _check_pair(a: Twist, b: Twist):
    if a.n != b.n:
        raise ValueError("twists must act on the same space")


def ybe_check(b: Twist) -> bool:
    """B12 B23 B12 == B23 B12 B23."""
    b12, b23 = lift12(b), lift23(b)
    return b12 @ b23 @ b12 == b23 @ b12 @ b23


def wz_ybe_check(a: Twist, b: Twist) -> bool:
    """A12 A23 B12 == B23 A12 A23."""
    _check_pair(a, b)
    a12, a23 = lift12(a), lift23(a)
    return a12 @ a23 @ lift12(b) == lift23(b) @ a12 @ a23


def generalized_ybe_solve(a: Twist, b: Twist) -> Optional[TripleOperator]:
    """A witness Z of A12 A23 (E - B)12 = (E - B)23 Z, or None if none exists."""
    _check_pair(a, b)
    e_minus_b = Twist.identity(a.field, a.n) - b
    lhs = lift12(a) @ lift23(a) @ lift12(e_minus_b)
    z = solve_right(lift23(e_minus_b).matrix, lhs.matrix)
    return None if z is None else TripleOperator(a.n, z)


def is_gybe_witness(a: Twist, b: Twist, z: TripleOperator) -> bool:
    """A12 A23 (E - B)12 == (E - B)23 Z.  Witnesses are not unique in general."""
    _check_pair(a, b)
    e_minus_b = Twist.identity(a.field, a.n) - b
    return lift12(a) @ lift23(a) @ lift12(e_minus_b) == lift23(e_minus_b) @ z


def linear_condition_check(a: Twist, b: Twist) -> bool:
    """Derivatives of every quadratic relation of B vanish under the rule A.

    With column-vector composition the derivative map on V (x) V is E + A, so
    the condition reads (E + A)(E - B) = 0.  When A and B commute this is the
    same as (E - B)(E + A) = 0.
    """
    _check_pair(a, b)
    e = Twist.identity(a.field, a.n)
    return ((e + a) @ (e - b)).is_zero()


def hecke_check(a: Twist, mu) -> bool:
    """(E / mu - A)(E + A) == 0."""
    mu = a.field.scalar(mu)
    if not mu:
        raise ZeroDivisionError("mu must be nonzero")
    e = Twist.identity(a.field, a.n)
    return ((e.scale(mu.inverse()) - a) @ (e + a)).is_zero()


def minus_one_in_spectrum(a: Twist) -> bool:
    """ker(A + E) != 0 over the ground field."""
    return kernel((a + Twist.identity(a.field, a.n)).matrix).dim > 0


@dataclass(frozen=True)
class HlavatyReport:
    b: Twist
    ybe_ok: bool
    minus_one_in_spectrum: bool
    annihilates: bool
    c1_ok: bool
    c2_ok: bool
    witness: TripleOperator

    @property
    def preconditions_ok(self) -> bool:
        return self.ybe_ok and self.minus_one_in_spectrum and self.annihilates

    @property
    def ok(self) -> bool:
        return self.preconditions_ok and self.c1_ok and self.c2_ok


def hlavaty_build(a: Twist, g_coeffs: Sequence) -> HlavatyReport:
    """B = E - G(A) with the candidate witness Z = A12 A23.

    Preconditions are evaluated and reported individually; B is returned
    regardless.
    """
    e = Twist.identity(a.field, a.n)
    g = a.polynomial(g_coeffs)
    b = e - g
    annihilates = (g @ (e + a)).is_zero()
    z = lift12(a) @ lift23(a)
    c1 = is_gybe_witness(a, b, z)
    return HlavatyReport(
        b=b,
        ybe_ok=ybe_check(a),
        minus_one_in_spectrum=minus_one_in_spectrum(a),
        annihilates=annihilates,
        c1_ok=c1,
        c2_ok=linear_condition_check(a, b),
        witness=z,
    )


def manin_twist(beta: Sequence[Sequence], field: Optional[FieldDescriptor] = None) -> Twist:
    """B(x^i (x) x^j) = beta^{ji} x^j (x) x^i; ``beta[i-1][j-1]`` is beta^{ij}.

    The field defaults to that of the first FieldElement entry, else Q.
    """
    if field is None:
        field = next((x.field for row in beta for x in row if isinstance(x, FieldElement)), QQ)
    n = len(beta)
    if any(len(row) != n for row in beta):
        raise ValueError("beta must be square")
    z = field.zero()
    rows = [[z] * (n * n) for _ in range(n * n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            rows[pair_index(j, i, n)][pair_index(i, j, n)] = field.scalar(beta[j - 1][i - 1])
    return Twist(n, ExactMatrix._raw(field, rows, n * n))


def is_manin_form(t: Twist) -> bool:
    """True when every x^i (x) x^j maps into the line of x^j (x) x^i."""
    n = t.n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            col = pair_index(i, j, n)
            keep = pair_index(j, i, n)
            if any(t.matrix[r, col] for r in range(n * n) if r != keep):
                return False
    return True


def remark34_check(a: Twist, b: Twist, c: Twist) -> bool:
    """A12 C23 B12 == B23 C12 A23."""
    _check_pair(a, b)
    _check_pair(a, c)
    return lift12(a) @ lift23(c) @ lift12(b) == lift23(b) @ lift12(c) @ lift23(a)


def quadratic_relations(b: Twist) -> list[NcPoly]:
    """The n^2 generators x^i x^j - beta^{ij}_{kl} x^k x^l, in (i, j) order."""
    n, field = b.n, b.field
    e_minus_b = (Twist.identity(field, n) - b).matrix
    return [from_coords(n, field, 2, e_minus_b.column(col)) for col in range(n * n)]


def relation_space(b: Twist) -> Subspace:
    """W_B as a subspace of the degree-2 coordinates."""
    e_minus_b = (Twist.identity(b.field, b.n) - b).matrix
    return Subspace._from_vectors(b.field, b.n * b.n, [e_minus_b.column(c) for c in range(b.n ** 2)])
