"""
Exact scalars: the rationals, the local ring QQ[z]_(z) and its fraction field QQ(z).

The uniformizer of the local ring is the variable ``z``. Elements of QQ(z)
are ``LocalScalar`` values kept in a canonical coprime form with a monic
denominator, so equality is a syntactic comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, ring

from app.errors import DivisionByZero, NonIntegral

ZRING, Z = ring("z", QQ)
Z_SYMBOL = sympy.Symbol("z")

Rational = QQ.dtype


class RingTag(str, Enum):
    """Coefficient ring of a Weyl algebra."""

    RATIONAL_FIELD = "QQ"
    LOCAL_FIELD = "QQ(z)"
    POLYNOMIAL_Z = "QQ[z]"

    @property
    def is_field(self) -> bool:
        return self is not RingTag.POLYNOMIAL_Z


def rational(p: int, q: int = 1) -> Any:
    if q == 0:
        raise DivisionByZero("rational with zero denominator")
    return QQ(p, q)


def format_rational(q: Any) -> str:
    """Render an exact rational as ``"p/q"`` (or ``"p"`` for integers)."""
    q = QQ.convert(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _z_order(p: PolyElement) -> int:
    return min(m[0] for m in p.itermonoms())


def _format_zpoly(p: PolyElement) -> str:
    if not p:
        return "0"
    parts = []
    for (e,), c in sorted(p.items(), reverse=True):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        coeff = format_rational(c)
        if e == 0:
            body = coeff
        else:
            mono = "z" if e == 1 else f"z^{e}"
            body = mono if c == 1 else f"{coeff}*{mono}"
        parts.append((sign, body))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


@dataclass(frozen=True)
class LocalScalar:
    """
    An element of QQ(z) in canonical form.

    Attributes
    ----------
    numerator : PolyElement
        Numerator in QQ[z], coprime to the denominator.
    denominator : PolyElement
        Monic denominator in QQ[z]; zero is stored as 0/1.
    """

    numerator: PolyElement
    denominator: PolyElement

    @classmethod
    def of(cls, numerator: Any, denominator: Any = 1) -> "LocalScalar":
        num = _as_zpoly(numerator)
        den = _as_zpoly(denominator)
        if not den:
            raise DivisionByZero("zero denominator in QQ(z)")
        if not num:
            return cls(ZRING.zero, ZRING.one)
        g = num.gcd(den)
        num, den = num.exquo(g), den.exquo(g)
        lc = den.LC
        return cls(num.quo_ground(lc), den.quo_ground(lc))

    @classmethod
    def zero(cls) -> "LocalScalar":
        return cls(ZRING.zero, ZRING.one)

    @classmethod
    def one(cls) -> "LocalScalar":
        return cls(ZRING.one, ZRING.one)

    @classmethod
    def uniformizer(cls) -> "LocalScalar":
        return cls(Z, ZRING.one)

    def __bool__(self) -> bool:
        return bool(self.numerator)

    def valuation(self) -> Union[int, float]:
        return valuation(self)

    def is_integral(self) -> bool:
        return is_integral(self)

    def __add__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return LocalScalar.of(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "LocalScalar":
        return LocalScalar(-self.numerator, self.denominator)

    def __sub__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return LocalScalar.of(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        if not other:
            raise DivisionByZero("division by zero in QQ(z)")
        return LocalScalar.of(self.numerator * other.denominator, self.denominator * other.numerator)

    def __rtruediv__(self, other: Any) -> "LocalScalar":
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int) -> "LocalScalar":
        if k < 0:
            return LocalScalar.one() / (self ** (-k))
        return LocalScalar.of(self.numerator ** k, self.denominator ** k)

    def __eq__(self, other: object) -> bool:
        other = _as_local(other)
        if other is None:
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def to_sympy(self) -> sympy.Expr:
        return self.numerator.as_expr(Z_SYMBOL) / self.denominator.as_expr(Z_SYMBOL)

    def __str__(self) -> str:
        num = _format_zpoly(self.numerator)
        if self.denominator == ZRING.one:
            return num
        if len(self.numerator) > 1:
            num = f"({num})"
        den = _format_zpoly(self.denominator)
        if len(self.denominator) > 1 or self.denominator.LC != 1:
            den = f"({den})"
        return f"{num}/{den}"

    __repr__ = __str__


def _as_zpoly(value: Any) -> PolyElement:
    if isinstance(value, PolyElement):
        return value
    return ZRING.ground_new(QQ.convert(value))


def _as_local(value: Any) -> Union[LocalScalar, None]:
    if isinstance(value, LocalScalar):
        return value
    if isinstance(value, PolyElement):
        return LocalScalar(value, ZRING.one) if value else LocalScalar.zero()
    try:
        q = QQ.convert(value)
    except Exception:
        return None
    return LocalScalar.of(q)


def valuation(a: LocalScalar) -> Union[int, float]:
    """
    z-adic valuation of a scalar of QQ(z).

    Returns
    -------
    int or float
        ord_z(numerator) - ord_z(denominator), or ``math.inf`` for zero.
    """
    if not a.numerator:
        return math.inf
    return _z_order(a.numerator) - _z_order(a.denominator)


def is_integral(a: LocalScalar) -> bool:
    return valuation(a) >= 0


def reduce_residue(a: LocalScalar) -> Any:
    """Evaluate an integral scalar at z = 0."""
    if valuation(a) < 0:
        raise NonIntegral(f"{a} has negative valuation")
    num0 = a.numerator.get((0,), QQ.zero)
    den0 = a.denominator.get((0,), QQ.zero)
    return num0 / den0


def field_arithmetic(a: LocalScalar, b: LocalScalar, op: str) -> LocalScalar:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op]()


# -- per-ring helpers ---------------------------------------------------------


def ring_zero(tag: RingTag) -> Any:
    if tag is RingTag.LOCAL_FIELD:
        return LocalScalar.zero()
    if tag is RingTag.POLYNOMIAL_Z:
        return ZRING.zero
    return QQ.zero


def ring_one(tag: RingTag) -> Any:
    if tag is RingTag.LOCAL_FIELD:
        return LocalScalar.one()
    if tag is RingTag.POLYNOMIAL_Z:
        return ZRING.one
    return QQ.one


def coerce_scalar(tag: RingTag, value: Any) -> Any:
    """
    Bring ``value`` into the coefficient ring named by ``tag``.

    Raises
    ------
    NonIntegral
        When a QQ(z) value with a nonconstant denominator is pushed into QQ[z].
    ValueError
        When a value involving z is pushed into QQ.
    """
    if tag is RingTag.LOCAL_FIELD:
        out = _as_local(value)
        if out is None:
            raise ValueError(f"cannot coerce {value!r} into QQ(z)")
        return out
    if tag is RingTag.POLYNOMIAL_Z:
        if isinstance(value, LocalScalar):
            if value.denominator.degree() > 0:
                raise NonIntegral(f"{value} is not a polynomial in z")
            return value.numerator.quo_ground(value.denominator.LC)
        return _as_zpoly(value)
    if isinstance(value, LocalScalar):
        if value.denominator.degree() > 0 or value.numerator.degree() > 0:
            raise ValueError(f"{value} involves z")
        return value.numerator.get((0,), QQ.zero)
    if isinstance(value, PolyElement):
        if value.degree() > 0:
            raise ValueError(f"{value} involves z")
        return value.get((0,), QQ.zero)
    return QQ.convert(value)


def residue(tag: RingTag, value: Any) -> Any:
    """Image of a coefficient at z = 0 (identity on QQ)."""
    if tag is RingTag.LOCAL_FIELD:
        return reduce_residue(value)
    if tag is RingTag.POLYNOMIAL_Z:
        return value.get((0,), QQ.zero)
    return value


def scalar_to_sympy(tag: RingTag, value: Any) -> sympy.Expr:
    if tag is RingTag.LOCAL_FIELD:
        return value.to_sympy()
    if tag is RingTag.POLYNOMIAL_Z:
        return value.as_expr(Z_SYMBOL)
    return sympy.Rational(int(value.numerator), int(value.denominator))


def format_scalar(tag: RingTag, value: Any) -> str:
    if tag is RingTag.LOCAL_FIELD:
        return str(value)
    if tag is RingTag.POLYNOMIAL_Z:
        return _format_zpoly(value)
    return format_rational(value)


def is_unit_constant(value: Any) -> bool:
    """True for a nonzero element of QQ (as scalar of any ring)."""
    if isinstance(value, LocalScalar):
        return bool(value) and value.numerator.degree() <= 0 and value.denominator.degree() <= 0
    if isinstance(value, PolyElement):
        return bool(value) and value.degree() <= 0
    return bool(value)
