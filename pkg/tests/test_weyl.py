"""
Normal-ordered Weyl algebra arithmetic.
"""
import random

import pytest
import sympy

from app.algebra.battery import random_weyl_element
from app.algebra.scalars import RingTag, LocalScalar, Z, rational
from app.algebra.weyl import (
    apply_to_polynomial,
    bernstein_degree,
    constant,
    fourier,
    generator_d,
    generator_x,
    monomial,
    principal_symbol,
    transpose,
    x_symbols,
    zero,
)
from app.errors import MixedAmbient, ZeroElement


def test_commutation_relation() -> None:
    """
    d1 x1 = x1 d1 + 1 and generators of different indices commute.
    """
    x1, d1 = generator_x(2, 1), generator_d(2, 1)
    x2 = generator_x(2, 2)
    assert d1 * x1 - x1 * d1 == constant(2, RingTag.RATIONAL_FIELD, 1)
    assert d1 * x2 == x2 * d1
    assert str(d1 * x1) == "x1*d1 + 1"


def test_higher_reordering() -> None:
    """
    d^2 x^2 = x^2 d^2 + 4 x d + 2.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    expected = monomial(1, RingTag.RATIONAL_FIELD, (2,), (2,)) + 4 * (x * d) + 2
    assert (d**2) * (x**2) == expected


TAGS = [RingTag.RATIONAL_FIELD, RingTag.LOCAL_FIELD]


@pytest.mark.parametrize("tag", TAGS)
def test_product_is_associative_on_random_elements(tag) -> None:
    """
    (ab)c = a(bc) on 200 seeded random triples in W_1 and W_2.
    """
    rng = random.Random(7)
    for _ in range(200):
        n = rng.choice((1, 2))
        a, b, c = (random_weyl_element(rng, n, tag) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_power_matches_repeated_product() -> None:
    """
    u^k computed by squaring equals the k-fold product.
    """
    rng = random.Random(5)
    u = random_weyl_element(rng, 2, max_degree=2)
    acc = constant(2, RingTag.RATIONAL_FIELD, 1)
    for k in range(10):
        assert u**k == acc
        acc = acc * u
    with pytest.raises(ValueError):
        u ** -1


@pytest.mark.parametrize("tag", TAGS)
def test_action_on_polynomials_matches_composition(tag) -> None:
    """
    Acting by uv equals acting by v then by u, on 100 random pairs and polynomials.
    """
    rng = random.Random(11)
    x1, x2 = x_symbols(2)
    for _ in range(100):
        f = rng.randint(-3, 3) * x1 ** rng.randint(0, 4) * x2 ** rng.randint(0, 3) - x2**2 + rng.randint(0, 5)
        u = random_weyl_element(rng, 2, tag)
        v = random_weyl_element(rng, 2, tag)
        lhs = apply_to_polynomial(u * v, f)
        rhs = apply_to_polynomial(u, apply_to_polynomial(v, f))
        assert sympy.cancel(lhs.as_expr() - rhs.as_expr()) == 0


def test_fourier_and_transpose() -> None:
    """
    The Fourier map sends x to d and d to -x; the transpose fixes x and negates d.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    assert fourier(x) == d
    assert fourier(d) == -x
    assert fourier(x * d) == -(x * d) - 1
    assert transpose(x * d) == -(x * d) - 1
    assert transpose(transpose(x * d + x)) == x * d + x


@pytest.mark.parametrize("tag", TAGS)
def test_fourier_is_multiplicative(tag) -> None:
    """
    fourier(uv) = fourier(u) fourier(v).
    """
    rng = random.Random(13)
    for _ in range(100):
        n = rng.choice((1, 2))
        u = random_weyl_element(rng, n, tag)
        v = random_weyl_element(rng, n, tag)
        assert fourier(u * v) == fourier(u) * fourier(v)


@pytest.mark.parametrize("tag", TAGS)
def test_fourier_has_order_four(tag) -> None:
    """
    fourier applied twice negates x and d; four times it is the identity.
    """
    rng = random.Random(17)
    x, d = generator_x(1, 1, tag), generator_d(1, 1, tag)
    assert fourier(fourier(x)) == -x
    assert fourier(fourier(d)) == -d
    for _ in range(50):
        u = random_weyl_element(rng, 2, tag, max_degree=3)
        assert fourier(fourier(fourier(fourier(u)))) == u


def test_transpose_reverses_products() -> None:
    """
    transpose(uv) = transpose(v) transpose(u).
    """
    rng = random.Random(3)
    for _ in range(5):
        u = random_weyl_element(rng, 1)
        v = random_weyl_element(rng, 1)
        assert transpose(u * v) == transpose(v) * transpose(u)


def test_bernstein_degree_and_symbol() -> None:
    """
    The symbol of x d + x keeps only the degree-two part.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    u = x * d + x
    assert bernstein_degree(u) == 2
    xi1 = sympy.Symbol("xi1")
    assert principal_symbol(u).as_expr() == x_symbols(1)[0] * xi1
    with pytest.raises(ZeroElement):
        bernstein_degree(zero(1))


def test_local_coefficients_and_formatting() -> None:
    """
    Elements over QQ(z) carry z in parenthesized coefficients.
    """
    tag = RingTag.LOCAL_FIELD
    u = generator_d(1, 1, tag).scale(LocalScalar.of(Z)) - constant(1, tag, 1)
    assert str(u) == "(z)*d1 + (-1)"
    assert str(generator_x(1, 1).scale(rational(-1, 2))) == "-1/2*x1"


def test_mixing_rings_is_refused() -> None:
    """
    Elements over different rings or ambients do not combine.
    """
    with pytest.raises(MixedAmbient):
        generator_x(1, 1) + generator_x(2, 1)
    with pytest.raises(MixedAmbient):
        generator_x(1, 1) * generator_x(1, 1, RingTag.LOCAL_FIELD)
