"""
Normal-ordered arithmetic in the Weyl algebra W_n(R).

Elements are sparse maps ``(alpha, beta) -> c`` standing for
``sum c * x^alpha * d^beta`` with every x written before every d. Products
are renormalized with the closed-form rule

    d^beta x^alpha = sum_nu  C(beta, nu) C(alpha, nu) nu!  x^(alpha-nu) d^(beta-nu)

applied per variable. Coefficient rings are named by ``RingTag``; for
``POLYNOMIAL_Z`` the coefficients are elements of QQ[z] and z is central.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import sympy

from app.algebra.scalars import (
    RingTag,
    coerce_scalar,
    format_scalar,
    ring_one,
    scalar_to_sympy,
)
from app.errors import MixedAmbient, ZeroElement

MultiIndex = Tuple[int, ...]
TermKey = Tuple[MultiIndex, MultiIndex]


def x_symbols(n: int) -> Tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"x{i}") for i in range(1, n + 1))


def xi_symbols(n: int) -> Tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"xi{i}") for i in range(1, n + 1))


def symbol_gens(n: int) -> Tuple[sympy.Symbol, ...]:
    """Generators x1..xn, xi1..xin of the associated graded ring."""
    return x_symbols(n) + xi_symbols(n)


@lru_cache(maxsize=None)
def reorder(beta: MultiIndex, alpha: MultiIndex) -> Tuple[Tuple[MultiIndex, int], ...]:
    """
    Expand ``d^beta * x^alpha`` in normal order.

    Returns
    -------
    tuple
        Pairs ``(nu, c)`` with ``d^beta x^alpha = sum c x^(alpha-nu) d^(beta-nu)``.
    """
    per_var = []
    for b, a in zip(beta, alpha):
        per_var.append([(k, math.comb(b, k) * math.comb(a, k) * math.factorial(k)) for k in range(min(a, b) + 1)])
    out = []
    for choice in itertools.product(*per_var):
        nu = tuple(k for k, _ in choice)
        out.append((nu, math.prod(c for _, c in choice)))
    return tuple(out)


def _add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(i + j for i, j in zip(a, b))


def _sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(i - j for i, j in zip(a, b))


@dataclass(frozen=True)
class WeylElement:
    """
    A normal-ordered element of W_n(R).

    Attributes
    ----------
    ambient_n : int
        Number of variable pairs.
    ring_tag : RingTag
        Coefficient ring.
    terms : tuple
        Sorted ``((alpha, beta), coefficient)`` pairs, coefficients nonzero.
    """

    ambient_n: int
    ring_tag: RingTag
    terms: Tuple[Tuple[TermKey, Any], ...]

    @classmethod
    def from_dict(cls, n: int, tag: RingTag, mapping: Mapping[TermKey, Any]) -> "WeylElement":
        items = tuple(sorted((k, c) for k, c in mapping.items() if c))
        return cls(n, tag, items)

    def as_dict(self) -> Dict[TermKey, Any]:
        return dict(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "WeylElement") -> None:
        if self.ambient_n != other.ambient_n or self.ring_tag != other.ring_tag:
            raise MixedAmbient(
                f"W({self.ambient_n}) over {self.ring_tag.value} vs W({other.ambient_n}) over {other.ring_tag.value}"
            )

    def __add__(self, other: Any) -> "WeylElement":
        if not isinstance(other, WeylElement):
            other = constant(self.ambient_n, self.ring_tag, other)
        self._check(other)
        acc = self.as_dict()
        for k, c in other.terms:
            acc[k] = acc[k] + c if k in acc else c
        return WeylElement.from_dict(self.ambient_n, self.ring_tag, acc)

    __radd__ = __add__

    def __neg__(self) -> "WeylElement":
        return WeylElement(self.ambient_n, self.ring_tag, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: Any) -> "WeylElement":
        if not isinstance(other, WeylElement):
            other = constant(self.ambient_n, self.ring_tag, other)
        return self + (-other)

    def __rsub__(self, other: Any) -> "WeylElement":
        return (-self) + other

    def scale(self, c: Any) -> "WeylElement":
        c = coerce_scalar(self.ring_tag, c)
        return WeylElement.from_dict(self.ambient_n, self.ring_tag, {k: v * c for k, v in self.terms})

    def __mul__(self, other: Any) -> "WeylElement":
        if isinstance(other, WeylElement):
            return normal_product(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "WeylElement":
        return self.scale(other)

    def __pow__(self, k: int) -> "WeylElement":
        if k < 0:
            raise ValueError("negative powers are not defined in W_n")
        out = constant(self.ambient_n, self.ring_tag, 1)
        base = self
        while k:
            if k & 1:
                out = normal_product(out, base)
            k >>= 1
            if k:
                base = normal_product(base, base)
        return out

    def __str__(self) -> str:
        return format_element(self)


def zero(n: int, tag: RingTag = RingTag.RATIONAL_FIELD) -> WeylElement:
    return WeylElement(n, tag, ())


def constant(n: int, tag: RingTag, c: Any) -> WeylElement:
    origin = (0,) * n
    return WeylElement.from_dict(n, tag, {(origin, origin): coerce_scalar(tag, c)})


def monomial(n: int, tag: RingTag, alpha: Sequence[int], beta: Sequence[int], c: Any = 1) -> WeylElement:
    return WeylElement.from_dict(n, tag, {(tuple(alpha), tuple(beta)): coerce_scalar(tag, c)})


def generator_x(n: int, i: int, tag: RingTag = RingTag.RATIONAL_FIELD) -> WeylElement:
    """The generator x_i (1-based)."""
    alpha = tuple(1 if j == i - 1 else 0 for j in range(n))
    return monomial(n, tag, alpha, (0,) * n)


def generator_d(n: int, i: int, tag: RingTag = RingTag.RATIONAL_FIELD) -> WeylElement:
    """The generator d_i (1-based)."""
    beta = tuple(1 if j == i - 1 else 0 for j in range(n))
    return monomial(n, tag, (0,) * n, beta)


def normal_product(u: WeylElement, v: WeylElement) -> WeylElement:
    u._check(v)
    acc: Dict[TermKey, Any] = {}
    for (a1, b1), c1 in u.terms:
        for (a2, b2), c2 in v.terms:
            c = c1 * c2
            for nu, k in reorder(b1, a2):
                key = (_sub(_add(a1, a2), nu), _sub(_add(b1, b2), nu))
                term = c * k
                acc[key] = acc[key] + term if key in acc else term
    return WeylElement.from_dict(u.ambient_n, u.ring_tag, acc)


def bernstein_degree(u: WeylElement) -> int:
    if not u.terms:
        raise ZeroElement("Bernstein degree of the zero element")
    return max(sum(a) + sum(b) for (a, b), _ in u.terms)


def weight_degree(u: WeylElement, weight: Sequence[int]) -> int:
    """Largest weight ``w . (alpha, beta)`` over the terms of ``u``."""
    if not u.terms:
        raise ZeroElement("weight of the zero element")
    return max(sum(w * e for w, e in zip(weight, a + b)) for (a, b), _ in u.terms)


def principal_symbol(u: WeylElement) -> sympy.Poly:
    """Top Bernstein-degree part of ``u`` with each d_i read as the commuting xi_i."""
    top = bernstein_degree(u)
    data = {a + b: scalar_to_sympy(u.ring_tag, c) for (a, b), c in u.terms if sum(a) + sum(b) == top}
    return sympy.Poly.from_dict(data, *symbol_gens(u.ambient_n))


def fourier(u: WeylElement) -> WeylElement:
    """Image under the automorphism x_i -> d_i, d_i -> -x_i."""
    acc: Dict[TermKey, Any] = {}
    for (a, b), c in u.terms:
        sign = -1 if sum(b) % 2 else 1
        for nu, k in reorder(a, b):
            key = (_sub(b, nu), _sub(a, nu))
            term = c * (sign * k)
            acc[key] = acc[key] + term if key in acc else term
    return WeylElement.from_dict(u.ambient_n, u.ring_tag, acc)


def transpose(u: WeylElement) -> WeylElement:
    """The anti-automorphism fixing x_i and sending d_i to -d_i."""
    acc: Dict[TermKey, Any] = {}
    for (a, b), c in u.terms:
        sign = -1 if sum(b) % 2 else 1
        for nu, k in reorder(b, a):
            key = (_sub(a, nu), _sub(b, nu))
            term = c * (sign * k)
            acc[key] = acc[key] + term if key in acc else term
    return WeylElement.from_dict(u.ambient_n, u.ring_tag, acc)


def map_coefficients(u: WeylElement, fn: Callable[[Any], Any], tag: RingTag) -> WeylElement:
    return WeylElement.from_dict(u.ambient_n, tag, {k: fn(c) for k, c in u.terms})


def apply_to_polynomial(u: WeylElement, f: Union[sympy.Poly, sympy.Expr, int]) -> sympy.Poly:
    """
    Act on a commutative polynomial: x_i multiplies, d_i differentiates.

    Parameters
    ----------
    u : WeylElement
        The operator.
    f : sympy.Poly or sympy.Expr
        A polynomial in x1..xn.

    Returns
    -------
    sympy.Poly
        ``u . f`` as a polynomial in x1..xn.
    """
    xs = x_symbols(u.ambient_n)
    poly = f if isinstance(f, sympy.Poly) else sympy.Poly(f, *xs)
    source = sympy.Poly(poly.as_expr(), *xs).as_dict()
    acc: Dict[MultiIndex, sympy.Expr] = {}
    for (a, b), c in u.terms:
        coeff = scalar_to_sympy(u.ring_tag, c)
        for gamma, fc in source.items():
            if any(g < bb for g, bb in zip(gamma, b)):
                continue
            falling = math.prod(math.factorial(g) // math.factorial(g - bb) for g, bb in zip(gamma, b))
            key = _add(_sub(gamma, b), a)
            acc[key] = acc.get(key, 0) + coeff * fc * falling
    acc = {k: v for k, v in acc.items() if sympy.cancel(v) != 0}
    if not acc:
        return sympy.Poly(0, *xs)
    return sympy.Poly.from_dict(acc, *xs)


def _format_monomial(alpha: MultiIndex, beta: MultiIndex) -> str:
    parts = []
    for prefix, exps in (("x", alpha), ("d", beta)):
        for i, e in enumerate(exps, start=1):
            if e == 1:
                parts.append(f"{prefix}{i}")
            elif e > 1:
                parts.append(f"{prefix}{i}^{e}")
    return "*".join(parts)


def format_element(u: WeylElement) -> str:
    """Render ``u`` in the session-language syntax (reparses to the same element)."""
    if not u.terms:
        return "0"
    ordered = sorted(u.terms, key=lambda t: (-(sum(t[0][0]) + sum(t[0][1])), t[0]), reverse=False)
    text = ""
    for idx, ((a, b), c) in enumerate(ordered):
        mono = _format_monomial(a, b)
        if u.ring_tag is RingTag.RATIONAL_FIELD:
            negative = c < 0
            mag = -c if negative else c
            coeff = format_scalar(u.ring_tag, mag)
            if not mono:
                body = coeff
            elif mag == 1:
                body = mono
            else:
                body = f"{coeff}*{mono}"
            if idx == 0:
                text = f"-{body}" if negative else body
            else:
                text += f" - {body}" if negative else f" + {body}"
            continue
        coeff = f"({format_scalar(u.ring_tag, c)})"
        body = f"{coeff}*{mono}" if mono else coeff
        text = body if idx == 0 else f"{text} + {body}"
    return text


def ring_of(elements: Iterable[WeylElement]) -> Optional[Tuple[int, RingTag]]:
    """Shared (ambient_n, ring_tag) of a collection, or None when empty."""
    seen = None
    for e in elements:
        key = (e.ambient_n, e.ring_tag)
        if seen is None:
            seen = key
        elif seen != key:
            raise MixedAmbient(f"{seen} vs {key}")
    return seen


def unit(n: int, tag: RingTag) -> WeylElement:
    return constant(n, tag, ring_one(tag))
