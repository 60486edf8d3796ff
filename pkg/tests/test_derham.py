"""
De Rham complexes, b-functions, exact cohomology in one variable and
Euler characteristics of perfect complexes over the valuation ring.
"""
import logging
import random

import pytest
import sympy

from app.algebra import derham
from app.algebra.battery import (
    multiplication_by_z,
    named_fixtures,
    random_perfect_complex,
    random_weyl_element,
    single_term,
)
from app.algebra.derham import (
    PerfectComplexOverDVR,
    Provenance,
    b_function_along_x,
    chi_by_stabilization,
    chi_via_reduction,
    differential,
    dims_of_reduction,
    dr_complex,
    euler_check_perfect,
    h_dr_n1,
    wedge_sign,
)
from app.algebra.groebner import FreeVector, Side
from app.algebra.modules import PresentedModule
from app.algebra.scalars import LocalScalar, RingTag, Z, rational
from app.algebra.weyl import generator_d, generator_x, x_symbols
from app.errors import (
    IndexOutOfRange,
    NonIntegral,
    NotAComplex,
    NotHolonomic,
    NotMinimalDimension,
    RankMismatch,
    RightModule,
    UnsupportedAmbient,
)

FIXTURES = named_fixtures()

x, d = generator_x(1, 1), generator_d(1, 1)


def cyclic(P) -> PresentedModule:
    return PresentedModule.from_rows([[P]])


ONE_VARIABLE_CASES = [
    ("functions", d, (1, 0)),
    ("delta", x, (0, 1)),
    ("exponential", d - 1, (0, 0)),
    ("second derivative", d**2, (2, 0)),
    ("shifted euler", x * d + 1, (1, 1)),
    ("euler", x * d, (0, 0)),
    ("kummer", x * d - rational(1, 2), (0, 0)),
]


@pytest.mark.parametrize("label,P,dims", ONE_VARIABLE_CASES, ids=[c[0] for c in ONE_VARIABLE_CASES])
def test_exact_cohomology_in_one_variable(label, P, dims) -> None:
    """
    H^0 and H^1 of W_1/W_1 P for a battery of operators.
    """
    report = h_dr_n1(cyclic(P))
    assert report.dims == dims
    assert report.chi == dims[0] - dims[1]
    assert report.provenance is Provenance.DIRECT_N1


@pytest.mark.parametrize("P,chi", [(d, 1), (x, -1), (d - 1, 0), (x * d, 0), (x * d - rational(1, 2), 0)])
def test_stabilization_oracle_agrees(P, chi) -> None:
    """
    The truncated filtration oracle stabilizes on the exact Euler characteristic.
    """
    oracle = chi_by_stabilization(cyclic(P))
    assert oracle.stable
    assert oracle.chi == chi
    assert oracle.chi == h_dr_n1(cyclic(P)).chi


def test_b_functions() -> None:
    """
    b-functions along x of W/W d, W/W x and W/W(x d - 1/2).
    """
    assert str(b_function_along_x(cyclic(d))) == "s"
    assert str(b_function_along_x(cyclic(x))) == "s + 1"
    b = b_function_along_x(cyclic(x * d - rational(1, 2)))
    assert str(b) == "s - 1/2"
    assert b.integer_roots == ()
    assert b_function_along_x(cyclic(d**2)).integer_roots == (0, 1)


def test_b_function_refusals() -> None:
    """
    The free module is not holonomic; two variables are out of scope.
    """
    with pytest.raises(NotHolonomic):
        b_function_along_x(PresentedModule.free(1, RingTag.RATIONAL_FIELD))
    with pytest.raises(UnsupportedAmbient):
        b_function_along_x(cyclic(generator_d(2, 1)))


def test_wedge_sign() -> None:
    """
    dx_1 ^ dx_0 = -dx_0 ^ dx_1.
    """
    assert wedge_sign(0, (1,)) == 1
    assert wedge_sign(1, (0,)) == -1
    assert wedge_sign(2, (0, 1)) == 1


def test_differential_squares_to_zero_on_module() -> None:
    """
    d o d = 0 on random elements of W_2/(d1 - 1) placed in position 0.
    """
    M = PresentedModule.from_rows([[generator_d(2, 1) - 1]])
    C = dr_complex(M)
    assert [C.term_rank(s) for s in range(3)] == [1, 2, 1]
    rng = random.Random(9)
    for _ in range(4):
        v = FreeVector.of([random_weyl_element(rng, 2)])
        once = C.d(0, {(): v})
        twice = C.d(1, once)
        assert all(w.is_zero() for w in twice.values())


def test_differential_squares_to_zero_on_polynomials() -> None:
    """
    The same differential applied to polynomials is the classical de Rham complex.
    """
    M = PresentedModule.free(3, RingTag.RATIONAL_FIELD)
    C = dr_complex(M)
    xs = x_symbols(3)
    f = xs[0] ** 3 * xs[1] + 2 * xs[1] * xs[2] ** 2 - 7 * xs[0]

    def action(i, g):
        return sympy.diff(g, xs[i])

    once = differential(C, 0, {(): f}, action)
    twice = differential(C, 1, once, action)
    assert all(sympy.expand(v) == 0 for v in twice.values())
    thrice = differential(C, 2, twice, action)
    assert all(sympy.expand(v) == 0 for v in thrice.values())


def test_differential_position_range() -> None:
    """
    No differential leaves the top position.
    """
    C = dr_complex(PresentedModule.free(1, RingTag.RATIONAL_FIELD))
    with pytest.raises(IndexOutOfRange):
        differential(C, 1, {(0,): FreeVector.of([x])})


def test_right_modules_have_no_de_rham_complex() -> None:
    """
    The complex is built for left modules only.
    """
    R = PresentedModule(RingTag.RATIONAL_FIELD, Side.RIGHT, 1, 1, (FreeVector.of([d]),))
    with pytest.raises(RightModule):
        dr_complex(R)


@pytest.mark.parametrize("name", ["tate", "delta", "exponential", "kummer", "euler_z", "vanishing"])
def test_euler_characteristic_via_reduction(name) -> None:
    """
    The transferred Euler characteristic matches the battery's expected value.
    """
    fixture = FIXTURES[name]
    report = chi_via_reduction(fixture.presentation)
    assert report.provenance is Provenance.TRANSFER
    assert report.dims is None
    assert report.chi == fixture.chi


def test_dims_of_reduction_are_labelled() -> None:
    """
    Dims read off the reduction carry their own provenance.
    """
    report = dims_of_reduction(FIXTURES["tate"].presentation)
    assert report.dims == (1, 0)
    assert report.provenance is Provenance.VIA_REDUCTION
    zero = dims_of_reduction(FIXTURES["vanishing"].presentation)
    assert zero.dims == (0, 0)


def test_euler_characteristic_of_free_module_is_refused() -> None:
    """
    Outside minimal dimension there is no finite Euler characteristic.
    """
    with pytest.raises(NotMinimalDimension):
        chi_via_reduction(FIXTURES["free"].presentation)


def test_multiplication_by_z() -> None:
    """
    [B -z-> B] is acyclic generically and has H^0 = H^1 = QQ at z = 0.
    """
    report = euler_check_perfect(multiplication_by_z())
    assert report.generic_dims == (0, 0)
    assert report.special_dims == (1, 1)
    assert report.chi_generic == report.chi_special == 0
    assert report.equal


def test_single_term() -> None:
    """
    A single free term has Euler characteristic equal to its rank.
    """
    report = euler_check_perfect(single_term())
    assert report.generic_dims == report.special_dims == (1, 0)
    assert report.chi_generic == 1


def test_random_perfect_complexes() -> None:
    """
    Generic and special Euler characteristics agree with the alternating rank sum.
    """
    rng = random.Random(20240501)
    for _ in range(40):
        report = euler_check_perfect(random_perfect_complex(rng))
        assert report.equal
        assert report.chi_generic == report.alternating_rank_sum


def test_disagreeing_fibers_are_reported_as_a_warning(monkeypatch, caplog) -> None:
    """
    A generic/special disagreement shows up as equal=False and a WARNING, never an ERROR.
    """
    real = derham._cohomology_dims
    calls = []

    def skewed(ranks, map_ranks):
        dims = real(ranks, map_ranks)
        calls.append(dims)
        return dims if len(calls) == 1 else (dims[0] + 1,) + dims[1:]

    monkeypatch.setattr(derham, "_cohomology_dims", skewed)
    with caplog.at_level(logging.WARNING, logger="app.algebra.derham"):
        report = euler_check_perfect(single_term())
    assert not report.equal
    assert (report.chi_generic, report.chi_special) == (1, 2)
    assert [r.levelname for r in caplog.records if r.name == "app.algebra.derham"] == ["WARNING"]


def test_non_integral_entries_are_refused() -> None:
    """
    A pole at z = 0 is not a map of lattices.
    """
    C = PerfectComplexOverDVR((1, 1), (((LocalScalar.of(1, Z),),),))
    with pytest.raises(NonIntegral):
        euler_check_perfect(C)


def test_non_complexes_are_refused() -> None:
    """
    Two identity maps in a row do not form a complex.
    """
    one = LocalScalar.one()
    C = PerfectComplexOverDVR((1, 1, 1), (((one,),), ((one,),)))
    with pytest.raises(NotAComplex):
        euler_check_perfect(C)


def test_matrix_shapes_are_checked() -> None:
    """
    Matrix i must have shape ranks[i+1] x ranks[i].
    """
    one = LocalScalar.one()
    with pytest.raises(RankMismatch):
        PerfectComplexOverDVR((2, 1), (((one,),),))
