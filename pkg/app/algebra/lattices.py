"""
Lattices of completed-algebra modules and their reductions mod z.

A module over the completed Weyl algebra is represented by an integral
presentation over W_n(QQ[z]) (its avatar). Verdicts about the completed
module are read off the reduction of a z-saturated lattice.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

from app.algebra.groebner import (
    FreeVector,
    ModuleFrame,
    Side,
    buchberger,
    colon_z,
    contains,
    is_member,
    saturate_z,
    syzygies,
    transpose_vector,
)
from app.algebra.modules import (
    CharCycle,
    PresentedModule,
    ext_from_resolution,
    ext,
    is_minimal_dimension,
    is_zero_module,
    multiplicity,
    resolve,
    to_left,
    char_cycle,
    grade,
)
from app.algebra.scalars import ZRING, LocalScalar, RingTag, coerce_scalar, residue
from app.algebra.weyl import WeylElement, map_coefficients, unit, zero as weyl_zero
from app.errors import (
    IndexOutOfRange,
    NotMinimalDimension,
    NotSameModule,
    NotSaturated,
    RankMismatch,
    UnsupportedAmbient,
)
from app.settings import get_settings

logger = logging.getLogger(__name__)

UNCOMPLETED_LABEL = "uncompleted avatar"


@dataclass(frozen=True)
class IntegralPresentation:
    """
    Presentation over W_n(QQ[z]).

    Attributes
    ----------
    relations : tuple of FreeVector
        Relation rows with coefficients in QQ[z].
    rank : int
        Number of generators.
    side : Side
        Left or right module.
    ambient_n : int
        Number of variable pairs.
    saturated : bool
        True once the relation module equals its own z-saturation.
    """

    relations: Tuple[FreeVector, ...]
    rank: int
    side: Side
    ambient_n: int
    saturated: bool = False

    @property
    def frame(self) -> ModuleFrame:
        return ModuleFrame(self.ambient_n, RingTag.POLYNOMIAL_Z, self.rank)

    def as_module(self) -> PresentedModule:
        return PresentedModule(RingTag.POLYNOMIAL_Z, self.side, self.ambient_n, self.rank, self.relations)

    @classmethod
    def from_module(cls, M: PresentedModule, saturated: bool = False) -> "IntegralPresentation":
        if M.ring_tag is not RingTag.POLYNOMIAL_Z:
            raise UnsupportedAmbient("an integral presentation needs coefficients in QQ[z]")
        return cls(M.relations, M.rank, M.side, M.ambient_n, saturated)


def _clear_row(row: FreeVector) -> FreeVector:
    den = ZRING.one
    for entry in row.entries:
        for _, c in entry.terms:
            den = den.lcm(c.denominator)
    return row.map(
        lambda e: map_coefficients(e, lambda c: coerce_scalar(RingTag.POLYNOMIAL_Z, c * den), RingTag.POLYNOMIAL_Z)
    )


def integral_presentation(M: PresentedModule) -> IntegralPresentation:
    """
    Integral presentation of a module over QQ(z) or QQ[z].

    Rows over QQ(z) are multiplied by the lcm of their denominators, which
    leaves the module over QQ(z) unchanged.
    """
    if M.ring_tag is RingTag.POLYNOMIAL_Z:
        return IntegralPresentation.from_module(M)
    if M.ring_tag is not RingTag.LOCAL_FIELD:
        raise UnsupportedAmbient("lattices need coefficients in QQ(z) or QQ[z]")
    rows = tuple(_clear_row(r) for r in M.relations)
    return IntegralPresentation(rows, M.rank, M.side, M.ambient_n, False)


def _saturate_relations(P: IntegralPresentation) -> Tuple[FreeVector, ...]:
    if P.side is Side.LEFT:
        return saturate_z(P.relations, P.frame)
    left = tuple(transpose_vector(r) for r in P.relations)
    return tuple(transpose_vector(r) for r in saturate_z(left, P.frame))


def make_lattice(P: IntegralPresentation) -> IntegralPresentation:
    """Replace the relations by their z-saturation."""
    if P.saturated:
        return P
    return IntegralPresentation(_saturate_relations(P), P.rank, P.side, P.ambient_n, True)


@dataclass(frozen=True)
class ReductionReport:
    reduced_module: PresentedModule
    is_zero: bool
    char_cycle: Optional[CharCycle] = None
    minimal_dimension: Optional[bool] = None

    @property
    def completed_module_zero(self) -> bool:
        """A zero reduction forces the completed module itself to vanish."""
        return self.is_zero


def reduce_presentation(M: PresentedModule) -> PresentedModule:
    """Entrywise evaluation at z = 0 of a presentation over QQ[z]."""
    rows = []
    for r in M.relations:
        red = r.map(lambda e: map_coefficients(e, lambda c: residue(RingTag.POLYNOMIAL_Z, c), RingTag.RATIONAL_FIELD))
        if not red.is_zero():
            rows.append(red)
    return PresentedModule(RingTag.RATIONAL_FIELD, M.side, M.ambient_n, M.rank, tuple(rows))


def _safe_cycle(M: PresentedModule) -> Optional[CharCycle]:
    try:
        return char_cycle(M)
    except UnsupportedAmbient as exc:
        logger.info("no characteristic cycle: %s", exc)
        return None


def reduce_mod_z(P: IntegralPresentation) -> ReductionReport:
    if not P.saturated:
        raise NotSaturated("reduce_mod_z needs a saturated lattice")
    reduced = reduce_presentation(P.as_module())
    if is_zero_module(reduced):
        logger.warning("reduction is zero: the completed module vanishes")
        return ReductionReport(reduced, True)
    return ReductionReport(reduced, False, _safe_cycle(reduced), is_minimal_dimension(reduced))


def minimal_dimension_via_reduction(P: IntegralPresentation) -> bool:
    report = reduce_mod_z(make_lattice(P))
    if report.is_zero:
        return True
    return bool(report.minimal_dimension)


def _integral_dual(P: IntegralPresentation) -> IntegralPresentation:
    E = ext(P.ambient_n, P.as_module())
    return make_lattice(IntegralPresentation(E.relations, E.rank, E.side, E.ambient_n, False))


def good_lattice(P: IntegralPresentation) -> IntegralPresentation:
    """
    Lattice built as the torsion-free part of the integral double dual.

    V is Ext^n of the avatar over W_n(QQ[z]) modulo z-torsion, and the
    result is Ext^n(V) modulo z-torsion, a left lattice again.
    """
    if not minimal_dimension_via_reduction(P):
        raise NotMinimalDimension("good_lattice needs a module of minimal dimension")
    V = _integral_dual(make_lattice(P))
    L = _integral_dual(V)
    report = reduce_mod_z(L)
    if not report.is_zero and not report.minimal_dimension:
        raise NotMinimalDimension("reduction of the double dual is not of minimal dimension")
    logger.info("good lattice with %d generators and %d relations", L.rank, len(L.relations))
    return L


def lattice_from_generators(ambient: IntegralPresentation, generators: Sequence[FreeVector]) -> IntegralPresentation:
    """
    Presentation of the W_n(QQ[z])-submodule generated by ``generators``
    inside the module presented by ``ambient``.
    """
    left_ambient = to_left(ambient.as_module())
    gens = [transpose_vector(g) if ambient.side is Side.RIGHT else g for g in generators]
    for g in gens:
        if g.rank != ambient.rank:
            raise RankMismatch(f"generator of rank {g.rank} in a module of rank {ambient.rank}")
    p = len(gens)
    if p == 0:
        return IntegralPresentation((), 0, ambient.side, ambient.ambient_n, True)
    rels = syzygies(list(gens) + list(left_ambient.relations), ambient.frame)
    projected = []
    for s in rels:
        head = FreeVector.of(s.entries[:p])
        if not head.is_zero():
            projected.append(transpose_vector(head) if ambient.side is Side.RIGHT else head)
    return make_lattice(IntegralPresentation(tuple(projected), p, ambient.side, ambient.ambient_n, False))


def unit_vector(frame: ModuleFrame, index: int, coefficient: Optional[WeylElement] = None) -> FreeVector:
    one = coefficient or unit(frame.ambient_n, frame.ring_tag)
    zero_el = weyl_zero(frame.ambient_n, frame.ring_tag)
    return FreeVector(frame.rank, tuple(one if i == index else zero_el for i in range(frame.rank)))


def perturbed_generators(P: IntegralPresentation) -> Tuple[FreeVector, ...]:
    """Generators {z e_j, x1 e_j} of a smaller lattice of the same module."""
    n = P.ambient_n
    origin = (0,) * n
    x1 = tuple(1 if i == 0 else 0 for i in range(n))
    z = WeylElement.from_dict(n, RingTag.POLYNOMIAL_Z, {(origin, origin): ZRING.gens[0]})
    x = WeylElement.from_dict(n, RingTag.POLYNOMIAL_Z, {(x1, origin): ZRING.one})
    out = []
    for j in range(P.rank):
        out.append(unit_vector(P.frame, j, z))
        out.append(unit_vector(P.frame, j, x))
    return tuple(out)


@dataclass(frozen=True)
class Lattice:
    """A lattice given by generators inside an ambient integral presentation."""

    ambient: IntegralPresentation
    generators: Tuple[FreeVector, ...]

    @classmethod
    def default(cls, P: IntegralPresentation) -> "Lattice":
        P = make_lattice(P)
        return cls(P, tuple(unit_vector(P.frame, j) for j in range(P.rank)))

    def presentation(self) -> IntegralPresentation:
        return lattice_from_generators(self.ambient, self.generators)

    def scaled(self, k: int = 1) -> "Lattice":
        """The lattice z^k L."""
        n = self.ambient.ambient_n
        origin = (0,) * n
        zk = WeylElement.from_dict(n, RingTag.POLYNOMIAL_Z, {(origin, origin): ZRING.gens[0] ** k})
        return Lattice(self.ambient, tuple(g.lmul(zk) for g in self.generators))


@dataclass(frozen=True)
class LatticeComparison:
    cycle_p: CharCycle
    cycle_q: CharCycle
    equal: bool
    multiplicity_p: int
    multiplicity_q: int
    zpower_a: int
    zpower_b: int
    finite_length: bool


def _z_power(v: FreeVector, k: int) -> FreeVector:
    n = v.ambient_n
    origin = (0,) * n
    zk = WeylElement.from_dict(n, RingTag.POLYNOMIAL_Z, {(origin, origin): ZRING.gens[0] ** k})
    return v.lmul(zk)


def _least_power(vectors: Sequence[FreeVector], span: Sequence[FreeVector], frame: ModuleFrame, bound: int) -> Optional[int]:
    G = buchberger(span, frame=frame)
    for a in range(bound + 1):
        if contains(G, [_z_power(v, a) for v in vectors]):
            return a
    return None


def _apply_base_change(v: FreeVector, base_change: Sequence[FreeVector]) -> FreeVector:
    out = None
    for coeff, image in zip(v.entries, base_change):
        term = image.lmul(coeff)
        out = term if out is None else out + term
    return out


def _reduction_cycle(lattice: Lattice) -> Tuple[CharCycle, bool]:
    report = reduce_mod_z(lattice.presentation())
    if report.is_zero:
        return CharCycle(), True
    return report.char_cycle or CharCycle(), bool(report.minimal_dimension)


def compare_lattices(
    P: Lattice,
    Q: Lattice,
    base_change: Optional[Sequence[FreeVector]] = None,
    zpower: Optional[int] = None,
) -> LatticeComparison:
    """
    Check that two lattices span the same module and compare their reductions.

    ``base_change`` maps the free generators of Q's ambient into P's ambient
    (identity when omitted). Containments z^a P ⊆ Q and z^b Q ⊆ P are
    searched for a, b up to ``zpower``.
    """
    bound = get_settings().zpower if zpower is None else zpower
    if P.ambient.side is Side.RIGHT or Q.ambient.side is Side.RIGHT:
        raise UnsupportedAmbient("lattice comparison works with left lattices")
    frame = P.ambient.frame
    if base_change is None:
        if Q.ambient.rank != P.ambient.rank:
            raise NotSameModule("ambient presentations have different ranks")
        q_gens = list(Q.generators)
        q_rels = list(Q.ambient.relations)
        if _least_power(P.ambient.relations, q_rels, frame, bound) is None:
            raise NotSameModule("relations of the first ambient do not hold in the second")
    else:
        if len(base_change) != Q.ambient.rank:
            raise RankMismatch("base change needs one image per generator")
        q_gens = [_apply_base_change(g, base_change) for g in Q.generators]
        q_rels = [_apply_base_change(r, base_change) for r in Q.ambient.relations]
    if _least_power(q_rels, P.ambient.relations, frame, bound) is None:
        raise NotSameModule("relations of the second ambient do not hold in the first")
    a = _least_power(P.generators, q_gens + list(P.ambient.relations), frame, bound)
    b = _least_power(q_gens, list(P.generators) + list(P.ambient.relations), frame, bound)
    if a is None or b is None:
        raise NotSameModule(f"no mutual containment up to z^{bound}")
    cycle_p, finite_p = _reduction_cycle(P)
    cycle_q, finite_q = _reduction_cycle(Q)
    return LatticeComparison(
        cycle_p=cycle_p,
        cycle_q=cycle_q,
        equal=cycle_p == cycle_q,
        multiplicity_p=multiplicity(cycle_p),
        multiplicity_q=multiplicity(cycle_q),
        zpower_a=a,
        zpower_b=b,
        finite_length=finite_p and finite_q,
    )


@dataclass(frozen=True)
class KunnethTerm:
    module: PresentedModule
    is_zero: bool
    char_cycle: Optional[CharCycle]
    minimal_dimension: Optional[bool]


@dataclass(frozen=True)
class KunnethReport:
    index: int
    integral_ext_reduced: KunnethTerm
    ext_of_reduction: KunnethTerm
    tor_term: KunnethTerm
    zero_pattern_holds: bool
    additivity_applicable: bool
    additivity_holds: Optional[bool]
    torsion_matches: bool


def _term(M: PresentedModule) -> KunnethTerm:
    if is_zero_module(M):
        return KunnethTerm(M, True, CharCycle(), True)
    return KunnethTerm(M, False, _safe_cycle(M), is_minimal_dimension(M))


def _torsion_module(E: PresentedModule) -> PresentedModule:
    """The submodule killed by z, as a module over QQ: ((R : z) / R) reduced."""
    L = to_left(E)
    if L.rank == 0:
        return reduce_presentation(L)
    widened = colon_z(L.relations, L.frame) if L.relations else ()
    G = buchberger(L.relations, frame=L.frame)
    fresh = [w for w in widened if not is_member(w, G)]
    if not fresh:
        return PresentedModule(RingTag.RATIONAL_FIELD, E.side, E.ambient_n, 0, ())
    p = len(widened)
    rels = syzygies(list(widened) + list(L.relations), L.frame)
    projected = []
    for s in rels:
        head = FreeVector.of(s.entries[:p])
        if not head.is_zero():
            projected.append(head)
    torsion = PresentedModule(RingTag.POLYNOMIAL_Z, Side.LEFT, E.ambient_n, p, tuple(projected))
    reduced = reduce_presentation(torsion)
    if E.side is Side.RIGHT:
        return PresentedModule(
            RingTag.RATIONAL_FIELD, Side.RIGHT, E.ambient_n, reduced.rank,
            tuple(transpose_vector(r) for r in reduced.relations),
        )
    return reduced


def _torsion_free(E: PresentedModule) -> bool:
    L = to_left(E)
    if L.rank == 0 or not L.relations:
        return True
    G = buchberger(L.relations, frame=L.frame)
    return contains(G, saturate_z(L.relations, L.frame))


def kunneth_check(P: IntegralPresentation, i: int) -> KunnethReport:
    """
    The three terms of 0 -> Ext^i(L)/z -> Ext^i(L/zL) -> Ext^(i+1)(L)[z] -> 0.

    Term (a) is the integral Ext^i reduced mod z, term (b) the Ext^i of the
    reduction and term (c) the z-torsion of the integral Ext^(i+1).
    """
    if not P.saturated:
        raise NotSaturated("kunneth_check needs a saturated lattice")
    n = P.ambient_n
    if not 0 <= i <= n + 1:
        raise IndexOutOfRange(f"index {i} outside [0, {n + 1}]")
    M = P.as_module()
    res = resolve(M, i + 2)
    E_i = ext_from_resolution(M, res, i)
    E_next = ext_from_resolution(M, res, i + 1)
    term_a = _term(reduce_presentation(E_i))
    reduced = reduce_presentation(M)
    if i <= n:
        term_b = _term(ext(i, reduced))
    else:
        term_b = _term(PresentedModule(RingTag.RATIONAL_FIELD, M.side.opposite, n, 0, ()))
    term_c = _term(_torsion_module(E_next))
    torsion_matches = term_c.is_zero == _torsion_free(E_next)
    zero_pattern = term_b.is_zero == (term_a.is_zero and term_c.is_zero)
    applicable = all(t.is_zero or t.minimal_dimension for t in (term_a, term_b, term_c))
    applicable = applicable and all(t.char_cycle is not None for t in (term_a, term_b, term_c))
    holds = None
    if applicable:
        holds = term_b.char_cycle == term_a.char_cycle + term_c.char_cycle
    return KunnethReport(i, term_a, term_b, term_c, zero_pattern, applicable, holds, torsion_matches)


@dataclass(frozen=True)
class GenericFiberReport:
    label: str
    is_zero: bool
    grade: Any


def to_generic_fiber(P: IntegralPresentation) -> PresentedModule:
    rows = tuple(
        r.map(lambda e: map_coefficients(e, LocalScalar.of, RingTag.LOCAL_FIELD))
        for r in P.relations
    )
    return PresentedModule(RingTag.LOCAL_FIELD, P.side, P.ambient_n, P.rank, rows)


def generic_fiber_diagnostic(P: IntegralPresentation) -> GenericFiberReport:
    """Zero test and grade over W_n(QQ(z)); not authoritative for the completed module."""
    M = to_generic_fiber(P)
    if is_zero_module(M):
        return GenericFiberReport(UNCOMPLETED_LABEL, True, float("inf"))
    return GenericFiberReport(UNCOMPLETED_LABEL, False, grade(M))
