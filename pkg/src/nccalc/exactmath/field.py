"""Exact scalars: the rationals and cyclotomic fields Q(zeta_m), 2 <= m <= 16.

A cyclotomic element is stored as its coordinate tuple in the power basis
1, z, ..., z^(phi(m)-1), where z is a primitive m-th root of unity.  The
representative is always the remainder modulo the m-th cyclotomic polynomial,
so equality is plain tuple comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

MIN_ORDER = 2
MAX_ORDER = 16


class FieldMismatchError(ValueError):
    """Operands live in different ground fields."""


# ---------- integer polynomial helpers (coefficients low -> high) ----------

def _strip(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of num by the monic integer polynomial den; remainder must vanish."""
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for shift in range(len(q) - 1, -1, -1):
        c = num[shift + len(den) - 1]
        q[shift] = c
        if c:
            for t, d in enumerate(den):
                num[shift + t] -= c * d
    if any(num):
        raise ArithmeticError("inexact cyclotomic division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Phi_m, obtained from t^m - 1 by dividing out Phi_d for every proper divisor d."""
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    p = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            p = _divide_exact(p, list(cyclotomic_polynomial(d)))
    return tuple(p)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    """Division with remainder over Q; b must be nonzero."""
    a = [Fraction(x) for x in a]
    _strip(a)
    lead = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for t, d in enumerate(b):
            a[shift + t] -= c * d
        _strip(a)
    return q, a


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return _strip([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _poly_inverse_mod(a: list, modulus: list) -> list:
    """Inverse of a modulo an irreducible modulus, by the extended Euclidean algorithm."""
    r0, r1 = [Fraction(x) for x in modulus], _strip([Fraction(x) for x in a])
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1:
            raise ZeroDivisionError("element is not invertible")
    if not r1:
        raise ZeroDivisionError("division by zero field element")
    c = r1[0]
    return [x / c for x in s1]


# ---------- field descriptor ----------

@dataclass(frozen=True)
class FieldDescriptor:
    """The ground field: ``rational`` or ``cyclotomic`` of a given order."""

    kind: str
    order: int = 1
    minimal_polynomial: tuple[int, ...] = (0, 1)
    degree: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "rational":
            deg = 1
        elif self.kind == "cyclotomic":
            if not MIN_ORDER <= self.order <= MAX_ORDER:
                raise ValueError(
                    f"cyclotomic order must lie in [{MIN_ORDER}, {MAX_ORDER}], got {self.order}"
                )
            deg = len(self.minimal_polynomial) - 1
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")
        object.__setattr__(self, "degree", deg)

    @staticmethod
    def rational() -> "FieldDescriptor":
        return _rational()

    @staticmethod
    def cyclotomic(m: int) -> "FieldDescriptor":
        return _cyclotomic(int(m))

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def __str__(self):
        return "Q" if self.is_rational else f"Q(zeta_{self.order})"

    # constructors of elements
    def zero(self) -> "FieldElement":
        return FieldElement(self, (Fraction(0),) * self.degree)

    def one(self) -> "FieldElement":
        return self.scalar(1)

    def scalar(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatchError(f"{value.field} element used over {self}")
            return value
        if not isinstance(value, (int, Fraction, Rational)) or isinstance(value, bool):
            raise TypeError(f"cannot coerce {type(value).__name__} into {self}")
        return FieldElement(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    def zeta(self) -> "FieldElement":
        """Primitive root of unity; only available for cyclotomic fields."""
        if self.is_rational:
            raise ValueError("the symbol z is undefined over Q")
        return self.from_power_coeffs([0, 1])

    def from_power_coeffs(self, coeffs) -> "FieldElement":
        """Element sum_t coeffs[t] z^t for an arbitrary-length coefficient list."""
        c = [Fraction(x) for x in coeffs]
        return FieldElement(self, self._reduce(c))

    def _reduce(self, c: list) -> tuple:
        deg = self.degree
        if len(c) <= deg:
            return tuple(c) + (Fraction(0),) * (deg - len(c))
        if self.is_rational:
            raise ValueError("rational elements have a single coordinate")
        c = list(c)
        phi = self.minimal_polynomial
        for t in range(len(c) - 1, deg - 1, -1):
            x = c[t]
            if x:
                base = t - deg
                for j in range(deg):
                    if phi[j]:
                        c[base + j] -= x * phi[j]
        return tuple(c[:deg])

    def parse(self, text: str) -> "FieldElement":
        from .textio import parse_expression

        return parse_expression(
            text,
            scalar=self.scalar,
            zeta=None if self.is_rational else self.zeta,
            variable=None,
        )


@lru_cache(maxsize=None)
def _rational() -> FieldDescriptor:
    return FieldDescriptor("rational")


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> FieldDescriptor:
    return FieldDescriptor("cyclotomic", m, cyclotomic_polynomial(m))


QQ = FieldDescriptor.rational()

Scalar = Union["FieldElement", int, Fraction]


# ---------- field elements ----------

class FieldElement:
    """Immutable exact element of a FieldDescriptor's field."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # coercion
    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatchError(f"cannot combine {self.field} and {other.field} elements")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.field.degree == 1:
            return FieldElement(self.field, (self.coeffs[0] + o.coeffs[0],))
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.field.degree == 1:
            return FieldElement(self.field, (self.coeffs[0] - o.coeffs[0],))
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        f = self.field
        if f.degree == 1:
            return FieldElement(f, (self.coeffs[0] * o.coeffs[0],))
        prod = [Fraction(0)] * (2 * f.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(f, f._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if not self:
            raise ZeroDivisionError("division by zero field element")
        f = self.field
        if f.degree == 1:
            return FieldElement(f, (1 / self.coeffs[0],))
        inv = _poly_inverse_mod(list(self.coeffs), list(f.minimal_polynomial))
        return f.from_power_coeffs(inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.field.degree == 1:
            if not o.coeffs[0]:
                raise ZeroDivisionError("division by zero field element")
            return FieldElement(self.field, (self.coeffs[0] / o.coeffs[0],))
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base, k = self.inverse(), -k
        result = self.field.one()
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.field.order, self.coeffs))

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def is_simple(self) -> bool:
        """True when the text form needs no parentheses as a factor."""
        nonzero = sum(1 for c in self.coeffs if c)
        return nonzero <= 1

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"FieldElement({self.field}, {format_element(self)!r})"


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(a: FieldElement) -> str:
    """Canonical text such as ``5/6`` or ``1+2*z-z^2``."""
    parts = []
    for t, c in enumerate(a.coeffs):
        if not c:
            continue
        if t == 0:
            body = _format_fraction(abs(c))
        else:
            mono = "z" if t == 1 else f"z^{t}"
            body = mono if abs(c) == 1 else f"{_format_fraction(abs(c))}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out


def lambda_bracket(q: FieldElement, m: int) -> FieldElement:
    """q^(m-1) + ... + q + 1."""
    if m < 1:
        raise ValueError("m must be positive")
    total = q.field.zero()
    power = q.field.one()
    for _ in range(m):
        total = total + power
        power = power * q
    return total


def lambda_bracket_is_root(q: FieldElement, m: int) -> bool:
    if m < 2:
        raise ValueError("m must be at least 2")
    return not lambda_bracket(q, m)


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.field != b.field:
        raise FieldMismatchError(f"cannot combine {a.field} and {b.field} elements")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")
