"""
Named fixtures and seeded random instances.

All fixtures are cyclic avatars in one variable pair, built over QQ(z) and
cleared to integral presentations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from app.algebra.derham import PerfectComplexOverDVR
from app.algebra.groebner import FreeVector, Side
from app.algebra.lattices import IntegralPresentation, integral_presentation
from app.algebra.modules import PresentedModule
from app.algebra.scalars import Z, ZRING, LocalScalar, RingTag, rational
from app.algebra.weyl import WeylElement, monomial, zero as weyl_zero

LOCAL = RingTag.LOCAL_FIELD


@dataclass(frozen=True)
class Fixture:
    name: str
    presentation: IntegralPresentation
    holonomic: bool
    chi: Optional[int]
    description: str = ""


def _x() -> WeylElement:
    return monomial(1, LOCAL, (1,), (0,))


def _d() -> WeylElement:
    return monomial(1, LOCAL, (0,), (1,))


def _c(value) -> WeylElement:
    return monomial(1, LOCAL, (0,), (0,), value)


def cyclic_avatar(element: WeylElement) -> IntegralPresentation:
    """Integral presentation of W_1/W_1 P for P over QQ(z)."""
    M = PresentedModule(element.ring_tag, Side.LEFT, element.ambient_n, 1, (FreeVector.of([element]),))
    return integral_presentation(M)


def free_avatar(n: int = 1) -> IntegralPresentation:
    return IntegralPresentation((), 1, Side.LEFT, n, True)


def shifted_derivative(c: int) -> IntegralPresentation:
    """[d - z c]"""
    return cyclic_avatar(_d() - _c(LocalScalar.of(Z * c)))


def shifted_point(c: int) -> IntegralPresentation:
    """[x - z c]"""
    return cyclic_avatar(_x() - _c(LocalScalar.of(Z * c)))


def named_fixtures() -> Dict[str, Fixture]:
    one_plus_z = LocalScalar.of(1, ZRING.one + Z)
    fixtures = [
        Fixture("tate", cyclic_avatar(_d()), True, 1, "[d]: the Tate algebra"),
        Fixture("delta", cyclic_avatar(_x()), True, -1, "[x]: delta at the origin"),
        Fixture("exponential", cyclic_avatar(_d() - _c(one_plus_z)), True, 0, "[d - 1/(1+z)]"),
        Fixture("kummer", cyclic_avatar(_x() * _d() - _c(rational(1, 2))), True, 0, "[x d - 1/2]"),
        Fixture("euler_z", cyclic_avatar(_x() * _d() - _c(LocalScalar.uniformizer())), True, 0, "[x d - z]"),
        Fixture("vanishing", cyclic_avatar(_c(LocalScalar.uniformizer()) * _d() - _c(1)), True, 0, "[z d - 1]"),
        Fixture("free", free_avatar(), False, None, "W_1 itself"),
    ]
    return {f.name: f for f in fixtures}


# -- random instances ---------------------------------------------------------------


def random_coefficient(rng: random.Random, tag: RingTag, bound: int = 3, zdegree: int = 2):
    if tag is RingTag.RATIONAL_FIELD:
        return rational(rng.randint(-bound, bound))
    poly = ZRING.from_list([rng.randint(-bound, bound) for _ in range(zdegree + 1)])
    if tag is RingTag.POLYNOMIAL_Z:
        return poly
    return LocalScalar.of(poly)


def random_weyl_element(
    rng: random.Random,
    n: int = 1,
    tag: RingTag = RingTag.RATIONAL_FIELD,
    max_degree: int = 2,
    terms: int = 3,
) -> WeylElement:
    acc = weyl_zero(n, tag)
    for _ in range(terms):
        alpha = [0] * n
        beta = [0] * n
        for _ in range(rng.randint(0, max_degree)):
            slot = rng.randrange(2 * n)
            if slot < n:
                alpha[slot] += 1
            else:
                beta[slot - n] += 1
        acc = acc + monomial(n, tag, alpha, beta, random_coefficient(rng, tag))
    return acc


def random_ideal(rng: random.Random, n: int = 1, count: int = 2, **kwargs) -> PresentedModule:
    """A cyclic module W_n / (random generators), skipping zero draws."""
    gens = []
    while len(gens) < count:
        u = random_weyl_element(rng, n, **kwargs)
        if u:
            gens.append(FreeVector.of([u]))
    return PresentedModule(gens[0].ring_tag, Side.LEFT, n, 1, tuple(gens))


def random_vector(rng: random.Random, n: int, rank: int, tag: RingTag, **kwargs) -> FreeVector:
    return FreeVector.of([random_weyl_element(rng, n, tag, **kwargs) for _ in range(rank)])


# -- perfect complexes ---------------------------------------------------------------


Matrix = List[List[LocalScalar]]


def _identity(r: int) -> Matrix:
    return [[LocalScalar.one() if i == j else LocalScalar.zero() for j in range(r)] for i in range(r)]


def _matmul(a: Matrix, b: Matrix, inner: int, width: int) -> Matrix:
    out = []
    for row in a:
        acc = []
        for c in range(width):
            s = LocalScalar.zero()
            for k in range(inner):
                s = s + row[k] * b[k][c]
            acc.append(s)
        out.append(acc)
    return out


def _elementary(rng: random.Random, r: int, zdegree: int) -> Tuple[Matrix, Matrix]:
    """A unimodular elementary matrix and its inverse."""
    e, inv = _identity(r), _identity(r)
    if r >= 2:
        a, b = rng.sample(range(r), 2)
        c = random_coefficient(rng, LOCAL, bound=2, zdegree=min(zdegree, 1))
        e[a][b] = c
        inv[a][b] = -c
    return e, inv


def _integral_entry(rng: random.Random, zdegree: int) -> LocalScalar:
    """A z-power times a unit of the valuation ring."""
    unit = LocalScalar.of(rng.choice([1, 2, -1, 3]), ZRING.one + Z * rng.randint(0, 2))
    return unit * LocalScalar.uniformizer() ** rng.randint(0, zdegree)


def random_perfect_complex(
    rng: random.Random, max_length: int = 3, max_rank: int = 4, zdegree: int = 3
) -> PerfectComplexOverDVR:
    """
    Direct sum of elementary pieces [B -> B] (multiplication by an integral
    scalar) and [B], conjugated term by term by unimodular matrices.
    """
    length = rng.randint(1, max_length)
    ranks = [0] * (length + 1)
    maps: List[List[Tuple[int, int, LocalScalar]]] = [[] for _ in range(length)]
    for i in range(length + 1):
        target = max(ranks[i], rng.randint(0, max_rank))
        while ranks[i] < target:
            if i < length and ranks[i + 1] < max_rank and rng.random() < 0.6:
                maps[i].append((ranks[i], ranks[i + 1], _integral_entry(rng, zdegree)))
                ranks[i + 1] += 1
            ranks[i] += 1
    mats: List[Matrix] = []
    for i in range(length):
        m = [[LocalScalar.zero() for _ in range(ranks[i])] for _ in range(ranks[i + 1])]
        for src, dst, c in maps[i]:
            m[dst][src] = c
        mats.append(m)
    conj = [_elementary(rng, r, zdegree) for r in ranks]
    out = []
    for i, m in enumerate(mats):
        e_next, _ = conj[i + 1]
        _, inv_here = conj[i]
        left = _matmul(e_next, m, ranks[i + 1], ranks[i])
        out.append(_matmul(left, inv_here, ranks[i], ranks[i]))
    return PerfectComplexOverDVR(tuple(ranks), tuple(tuple(tuple(row) for row in m) for m in out))


def multiplication_by_z() -> PerfectComplexOverDVR:
    """[B --z--> B]"""
    return PerfectComplexOverDVR((1, 1), (((LocalScalar.uniformizer(),),),))


def single_term() -> PerfectComplexOverDVR:
    """[B -> 0]"""
    return PerfectComplexOverDVR((1, 0), ((),))
