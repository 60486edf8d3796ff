"""
Integral presentations, lattices, reductions mod z and the Künneth comparison.
"""
import pytest

from app.algebra.battery import cyclic_avatar, named_fixtures, shifted_derivative, shifted_point
from app.algebra.lattices import (
    UNCOMPLETED_LABEL,
    Lattice,
    compare_lattices,
    generic_fiber_diagnostic,
    good_lattice,
    kunneth_check,
    lattice_from_generators,
    make_lattice,
    minimal_dimension_via_reduction,
    perturbed_generators,
    reduce_mod_z,
    reduce_presentation,
)
from app.algebra.groebner import FreeVector
from app.algebra.modules import CharCycle
from app.algebra.scalars import LocalScalar, RingTag, Z
from app.algebra.weyl import generator_d, generator_x, monomial
from app.errors import IndexOutOfRange, NotMinimalDimension, NotSameModule, NotSaturated, RankMismatch

FIXTURES = named_fixtures()
POLY = RingTag.POLYNOMIAL_Z


def _reduction_cycle(P):
    return reduce_mod_z(make_lattice(P)).char_cycle


def test_denominators_are_cleared() -> None:
    """
    d - 1/(1+z) becomes (1+z) d - 1 over QQ[z].
    """
    P = FIXTURES["exponential"].presentation
    assert P.as_module().matrix() == [["(z + 1)*d1 + (-1)"]]
    assert not P.saturated


def test_reduction_of_exponential() -> None:
    """
    The saturated lattice of d - 1/(1+z) reduces to W/W(d - 1).
    """
    report = reduce_mod_z(make_lattice(FIXTURES["exponential"].presentation))
    assert not report.is_zero
    assert report.reduced_module.matrix() == [["d1 - 1"]]
    assert report.char_cycle == CharCycle.of(xi1=1)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_minimal_dimension_verdicts_on_battery(name) -> None:
    """
    Every holonomic fixture is of minimal dimension via its reduction; the free one is not.
    """
    fixture = FIXTURES[name]
    assert minimal_dimension_via_reduction(fixture.presentation) is fixture.holonomic


def test_reduction_cycles_of_battery() -> None:
    """
    Point, line and crossing supports show up in the reductions.
    """
    assert _reduction_cycle(FIXTURES["tate"].presentation) == CharCycle.of(xi1=1)
    assert _reduction_cycle(FIXTURES["delta"].presentation) == CharCycle.of(x1=1)
    assert _reduction_cycle(FIXTURES["kummer"].presentation) == CharCycle.of(x1=1, xi1=1)
    assert _reduction_cycle(FIXTURES["euler_z"].presentation) == CharCycle.of(x1=1, xi1=1)


def test_vanishing_module_is_not_seen_generically() -> None:
    """
    z d - 1 reduces to zero while the uncompleted avatar is nonzero.
    """
    P = FIXTURES["vanishing"].presentation
    report = reduce_mod_z(make_lattice(P))
    assert report.is_zero
    assert report.completed_module_zero
    generic = generic_fiber_diagnostic(P)
    assert generic.label == UNCOMPLETED_LABEL
    assert not generic.is_zero
    assert generic.grade == 1


def test_reduction_needs_saturation() -> None:
    """
    An unsaturated presentation is refused by reduce_mod_z and kunneth_check.
    """
    P = FIXTURES["tate"].presentation
    with pytest.raises(NotSaturated):
        reduce_mod_z(P)
    with pytest.raises(NotSaturated):
        kunneth_check(P, 1)


def test_saturation_removes_z_torsion() -> None:
    """
    The avatar of z d reduces like d after saturation.
    """
    P = cyclic_avatar(generator_d(1, 1, RingTag.LOCAL_FIELD).scale(LocalScalar.uniformizer()))
    assert reduce_presentation(P.as_module()).relations == ()
    assert _reduction_cycle(P) == CharCycle.of(xi1=1)


AVATARS = {name: FIXTURES[name].presentation for name in ("tate", "delta", "exponential", "kummer", "euler_z")}
AVATARS.update({f"{build.__name__}_{c}": build(c) for build in (shifted_derivative, shifted_point) for c in (1, 2)})


@pytest.mark.parametrize("name", sorted(AVATARS))
def test_three_lattices_agree(name) -> None:
    """
    The default, perturbed and double-dual lattices have equal reduction cycles.
    """
    P = make_lattice(AVATARS[name])
    default = Lattice.default(P)
    perturbed = Lattice(P, perturbed_generators(P))
    result = compare_lattices(default, perturbed)
    assert result.equal
    assert result.finite_length
    good = reduce_mod_z(good_lattice(P))
    assert good.char_cycle == result.cycle_p


@pytest.mark.parametrize("name", sorted(AVATARS))
def test_compare_with_scaled_lattice(name) -> None:
    """
    L and zL need one power of z in one direction and none in the other.
    """
    L = Lattice.default(AVATARS[name])
    result = compare_lattices(L, L.scaled(1))
    assert result.equal
    assert (result.zpower_a, result.zpower_b) == (1, 0)
    assert result.multiplicity_p == result.multiplicity_q


def test_tate_multiplicity_under_scaling() -> None:
    """
    W/W d has multiplicity one before and after scaling.
    """
    L = Lattice.default(FIXTURES["tate"].presentation)
    result = compare_lattices(L, L.scaled(1))
    assert result.multiplicity_p == result.multiplicity_q == 1


def test_euler_operator_lattices() -> None:
    """
    In W/W x d the lattice generated by z and x already contains 1 = d x - x d.
    """
    x = generator_x(1, 1, RingTag.LOCAL_FIELD)
    d = generator_d(1, 1, RingTag.LOCAL_FIELD)
    P = make_lattice(cyclic_avatar(x * d))
    whole = Lattice.default(P)
    z_gen = FreeVector.of([monomial(1, POLY, (0,), (0,), Z)])
    x_gen = FreeVector.of([monomial(1, POLY, (1,), (0,), 1)])
    smaller = Lattice(P, (z_gen, x_gen))
    result = compare_lattices(whole, smaller)
    assert (result.zpower_a, result.zpower_b) == (0, 0)
    assert result.equal
    assert result.cycle_p == result.cycle_q == CharCycle.of(xi1=1, x1=1)
    assert result.finite_length


def test_compare_different_modules() -> None:
    """
    Lattices in W/W d and W/W x are not lattices of one module.
    """
    P = Lattice.default(FIXTURES["tate"].presentation)
    Q = Lattice.default(FIXTURES["delta"].presentation)
    with pytest.raises(NotSameModule):
        compare_lattices(P, Q, zpower=2)


def test_generator_rank_must_match() -> None:
    """
    Generators of the wrong rank are refused.
    """
    P = make_lattice(FIXTURES["tate"].presentation)
    d = generator_d(1, 1, RingTag.POLYNOMIAL_Z)
    with pytest.raises(RankMismatch):
        lattice_from_generators(P, [FreeVector.of([d, d])])


def test_good_lattice_refuses_free_module() -> None:
    """
    The free module has no good lattice in this sense.
    """
    with pytest.raises(NotMinimalDimension):
        good_lattice(FIXTURES["free"].presentation)


@pytest.mark.parametrize("name", ["tate", "delta", "exponential", "kummer", "euler_z", "vanishing"])
@pytest.mark.parametrize("i", [0, 1, 2])
def test_kunneth_on_battery(name, i) -> None:
    """
    The zero pattern and cycle additivity hold on every holonomic fixture.
    """
    report = kunneth_check(make_lattice(FIXTURES[name].presentation), i)
    assert report.zero_pattern_holds
    assert report.torsion_matches
    assert report.tor_term.is_zero
    if report.additivity_applicable:
        assert report.additivity_holds


def test_kunneth_terms_of_tate_module() -> None:
    """
    At i = 1 both Ext terms are W/dW and the torsion term vanishes.
    """
    report = kunneth_check(make_lattice(FIXTURES["tate"].presentation), 1)
    assert not report.integral_ext_reduced.is_zero
    assert report.integral_ext_reduced.char_cycle == CharCycle.of(xi1=1)
    assert report.ext_of_reduction.char_cycle == CharCycle.of(xi1=1)
    assert report.additivity_applicable
    assert report.additivity_holds


def test_kunneth_index_range() -> None:
    """
    Indices beyond n + 1 are refused.
    """
    with pytest.raises(IndexOutOfRange):
        kunneth_check(make_lattice(FIXTURES["tate"].presentation), 3)
