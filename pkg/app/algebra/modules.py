"""
Finitely presented modules over Weyl algebras.

A ``PresentedModule`` is the cokernel of its relation rows inside
W^rank. Right modules are handled through the transposition
anti-automorphism: ``to_left`` gives the left module whose relations are
the transposed rows, and every invariant of a right module is that of its
transposed left module.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from app.algebra.groebner import (
    DEFAULT_ORDER,
    FreeResolution,
    FreeVector,
    GroebnerBasis,
    ModuleFrame,
    Side,
    buchberger,
    free_resolution,
    syzygies,
    transpose_vector,
)
from app.algebra.scalars import Z_SYMBOL, RingTag, scalar_to_sympy
from app.algebra.weyl import WeylElement, symbol_gens, transpose, zero as weyl_zero
from app.errors import IndexOutOfRange, NotMinimalDimension, UnsupportedAmbient, ZeroModule
from app.utils.linalg import symbolic_domain_matrix

logger = logging.getLogger(__name__)

Grade = Union[int, float]


@dataclass(frozen=True)
class PresentedModule:
    """
    Cokernel of ``relations`` inside the free module of rank ``rank``.

    Attributes
    ----------
    ring_tag : RingTag
        Coefficient ring.
    side : Side
        Left or right module.
    ambient_n : int
        Number of variable pairs of the Weyl algebra.
    rank : int
        Number of generators (columns of the presentation).
    relations : tuple of FreeVector
        Relation rows.
    """

    ring_tag: RingTag
    side: Side
    ambient_n: int
    rank: int
    relations: Tuple[FreeVector, ...] = ()

    @property
    def frame(self) -> ModuleFrame:
        return ModuleFrame(self.ambient_n, self.ring_tag, self.rank)

    @classmethod
    def free(cls, n: int, tag: RingTag, rank: int = 1, side: Side = Side.LEFT) -> "PresentedModule":
        return cls(tag, side, n, rank, ())

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[WeylElement]], side: Side = Side.LEFT, rank: Optional[int] = None
    ) -> "PresentedModule":
        """Build a module from relation rows of Weyl elements (empty rows are dropped)."""
        rows = [list(r) for r in rows if len(r)]
        if not rows:
            raise ValueError("cannot infer the ring of a presentation without entries")
        first = rows[0][0]
        width = rank if rank is not None else len(rows[0])
        return cls(first.ring_tag, side, first.ambient_n, width, tuple(FreeVector.of(r) for r in rows))

    def matrix(self) -> List[List[str]]:
        return [[str(e) for e in r.entries] for r in self.relations]


def to_left(M: PresentedModule) -> PresentedModule:
    """Left module attached to ``M`` (identity on left modules)."""
    if M.side is Side.LEFT:
        return M
    return PresentedModule(M.ring_tag, Side.LEFT, M.ambient_n, M.rank, tuple(transpose_vector(r) for r in M.relations))


def relation_basis(M: PresentedModule) -> GroebnerBasis:
    """Gröbner basis (default order) of the relations of ``to_left(M)``."""
    L = to_left(M)
    return buchberger(L.relations, DEFAULT_ORDER, frame=L.frame)


def is_zero_module(M: PresentedModule) -> bool:
    if M.rank == 0:
        return True
    return relation_basis(M).is_full_module()


def _require_field(M: PresentedModule) -> None:
    if not M.ring_tag.is_field:
        raise UnsupportedAmbient(f"operation needs field coefficients, got {M.ring_tag.value}")


def monomial_dimension(generators: Sequence[Tuple[int, ...]], nvars: int) -> int:
    """
    Krull dimension of k[y_1..y_m] / (monomials).

    The largest set of variables containing the support of no generator.
    Returns -1 when the ideal contains 1.
    """
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in generators]
    if any(not s for s in supports):
        return -1
    for size in range(nvars, -1, -1):
        for subset in itertools.combinations(range(nvars), size):
            chosen = set(subset)
            if not any(s <= chosen for s in supports):
                return size
    return 0


def hilbert_dimension(M: PresentedModule) -> int:
    """Dimension of the support of gr(M) for the Bernstein filtration."""
    _require_field(M)
    G = relation_basis(M)
    if M.rank == 0 or G.is_full_module():
        raise ZeroModule("hilbert_dimension of the zero module")
    n2 = 2 * M.ambient_n
    best = -1
    for comp in range(M.rank):
        gens = [exps[:n2] for c, exps in G.leads if c == comp]
        best = max(best, monomial_dimension(gens, n2))
    return best


# -- characteristic cycles ------------------------------------------------------


@dataclass(frozen=True)
class CycleComponent:
    """A prime component (by its generators) with multiplicity."""

    generators: Tuple[str, ...]
    multiplicity: int

    @property
    def label(self) -> str:
        return "(" + ", ".join(self.generators) + ")"


@dataclass(frozen=True)
class CharCycle:
    components: Tuple[CycleComponent, ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[Tuple[str, ...], int]) -> "CharCycle":
        comps = tuple(CycleComponent(k, v) for k, v in sorted(mapping.items()) if v)
        return cls(comps)

    @classmethod
    def of(cls, **labels: int) -> "CharCycle":
        """Shorthand: ``CharCycle.of(xi1=1, x1=1)`` for principal components."""
        return cls.from_mapping({(k,): v for k, v in labels.items()})

    def as_mapping(self) -> Dict[Tuple[str, ...], int]:
        return {c.generators: c.multiplicity for c in self.components}

    def as_dict(self) -> Dict[str, int]:
        return {c.label: c.multiplicity for c in self.components}

    def __add__(self, other: "CharCycle") -> "CharCycle":
        acc = self.as_mapping()
        for k, v in other.as_mapping().items():
            acc[k] = acc.get(k, 0) + v
        return CharCycle.from_mapping(acc)

    def __bool__(self) -> bool:
        return bool(self.components)


def multiplicity(cycle: CharCycle) -> int:
    return sum(c.multiplicity for c in cycle.components)


def _symbol_rows(G: GroebnerBasis) -> List[List[sympy.Expr]]:
    n = G.frame.ambient_n
    gens = symbol_gens(n)
    rows = []
    for g in G.generators:
        top = max(sum(a) + sum(b) for e in g.entries for (a, b), _ in e.terms)
        row = []
        for e in g.entries:
            expr = sympy.Integer(0)
            for (a, b), c in e.terms:
                if sum(a) + sum(b) == top:
                    mono = sympy.Mul(*[v ** k for v, k in zip(gens, a + b)])
                    expr += scalar_to_sympy(e.ring_tag, c) * mono
            row.append(expr)
        rows.append(row)
    return rows


def char_cycle(M: PresentedModule) -> CharCycle:
    """
    Characteristic cycle for the filtration with all generators in degree 0.

    The symbols of a degree-compatible Gröbner basis generate gr of the
    relation module. A rank deficiency gives the full-support component
    ``(0)``; otherwise the components of top dimension are the prime factors
    of the gcd of the maximal minors, with their exponents as multiplicities.
    """
    _require_field(M)
    L = to_left(M)
    G = relation_basis(L)
    if L.rank == 0 or G.is_full_module():
        raise ZeroModule("char_cycle of the zero module")
    r = L.rank
    rows = _symbol_rows(G)
    gens = symbol_gens(L.ambient_n)
    if not rows:
        return CharCycle.from_mapping({("0",): r})
    dm = symbolic_domain_matrix(rows)
    rk = dm.to_field().rank()
    if rk < r:
        return CharCycle.from_mapping({("0",): r - rk})
    delta = None
    poly_gens = gens + (Z_SYMBOL,) if L.ring_tag is RingTag.LOCAL_FIELD else gens
    for subset in itertools.combinations(range(len(rows)), r):
        minor = dm.extract(list(subset), list(range(r))).det()
        expr = sympy.numer(sympy.together(dm.domain.to_sympy(minor)))
        if expr == 0:
            continue
        poly = sympy.Poly(expr, *poly_gens)
        delta = poly if delta is None else sympy.gcd(delta, poly)
    if delta is None or all(delta.degree(g) <= 0 for g in gens):
        raise UnsupportedAmbient("support of codimension above one is not supported")
    _, factors = sympy.factor_list(delta)
    mapping: Dict[Tuple[str, ...], int] = {}
    for f, e in factors:
        if all(f.degree(g) <= 0 for g in gens):
            continue
        canonical = sympy.Poly(f.as_expr(), *gens).to_field().monic()
        key = (str(canonical.as_expr()),)
        mapping[key] = mapping.get(key, 0) + e
    return CharCycle.from_mapping(mapping)


def generic_rank(M: PresentedModule) -> int:
    """Multiplicity of the full-support component of the cycle (0 when absent)."""
    return char_cycle(M).as_mapping().get(("0",), 0)


# -- Ext, grade, duality ----------------------------------------------------------


def homological_bound(M: PresentedModule) -> int:
    return M.ambient_n if M.ring_tag.is_field else M.ambient_n + 1


def _dual_rows(rows: Sequence[FreeVector]) -> List[FreeVector]:
    """Rows of tau(A)^T for the matrix A with rows ``rows``."""
    out = []
    for j in range(rows[0].rank):
        out.append(FreeVector.of([transpose(row.entries[j]) for row in rows]))
    return out


def _ext_presentation(res: FreeResolution, i: int) -> Tuple[int, Tuple[FreeVector, ...]]:
    """
    Left presentation (generator count, relations) of the transposed Ext^i.

    The dual complex is W^(r_0) -> W^(r_1) -> ... with maps ``u -> u B_k``,
    ``B_k = tau(A_k)^T``; Ext^i is ker(B_(i+1)) / im(B_i) at position i.
    """
    frame = res.frame
    if i >= len(res.ranks):
        return 0, ()
    r_i = res.ranks[i]
    if r_i == 0:
        return 0, ()
    at = ModuleFrame(frame.ambient_n, frame.ring_tag, r_i)
    image: List[FreeVector] = []
    if i >= 1:
        image = _dual_rows(res.matrices[i - 1])
    if i < res.length:
        outgoing = _dual_rows(res.matrices[i])
        kernel = list(syzygies(outgoing))
    else:
        return r_i, tuple(image)
    p = len(kernel)
    if p == 0:
        return 0, ()
    rels = syzygies(kernel + image, at)
    projected = []
    for s in rels:
        head = FreeVector.of(s.entries[:p])
        if not head.is_zero():
            projected.append(head)
    return p, tuple(projected)


def _wrap_ext(M: PresentedModule, p: int, rels: Tuple[FreeVector, ...]) -> PresentedModule:
    side = M.side.opposite
    if p == 0:
        return PresentedModule(M.ring_tag, side, M.ambient_n, 0, ())
    left = PresentedModule(M.ring_tag, Side.LEFT, M.ambient_n, p, rels)
    if is_zero_module(left):
        return PresentedModule(M.ring_tag, side, M.ambient_n, 0, ())
    if side is Side.RIGHT:
        return PresentedModule(M.ring_tag, Side.RIGHT, M.ambient_n, p, tuple(transpose_vector(r) for r in rels))
    return left


def resolve(M: PresentedModule, max_length: int) -> FreeResolution:
    L = to_left(M)
    return free_resolution(L.relations, max_length, frame=L.frame)


def ext_from_resolution(M: PresentedModule, res: FreeResolution, i: int) -> PresentedModule:
    p, rels = _ext_presentation(res, i)
    return _wrap_ext(M, p, rels)


def ext(i: int, M: PresentedModule) -> PresentedModule:
    """Ext^i(M, W) as a module of the opposite side."""
    bound = homological_bound(M)
    if not 0 <= i <= bound:
        raise IndexOutOfRange(f"Ext index {i} outside [0, {bound}]")
    res = resolve(M, i + 1)
    return ext_from_resolution(M, res, i)


def grade(M: PresentedModule) -> Grade:
    """Least i with Ext^i(M, W) nonzero; ``math.inf`` for the zero module."""
    if is_zero_module(M):
        return math.inf
    bound = homological_bound(M)
    res = resolve(M, bound + 1)
    for i in range(bound + 1):
        if not is_zero_module(ext_from_resolution(M, res, i)):
            return i
    logger.warning("no nonzero Ext up to %d for a nonzero module", bound)
    return math.inf


def is_minimal_dimension(M: PresentedModule) -> bool:
    """True iff Ext^i(M, W) = 0 for all i < n (so the zero module qualifies)."""
    _require_field(M)
    g = grade(M)
    verdict = g >= M.ambient_n
    if M.ambient_n == 1 and g != math.inf:
        dim = hilbert_dimension(M)
        if (dim == 1) != verdict:
            logger.warning("grade %s disagrees with Hilbert dimension %s", g, dim)
    return verdict


def dual_star(M: PresentedModule) -> PresentedModule:
    if not is_minimal_dimension(M):
        raise NotMinimalDimension("dual_star needs a module of minimal dimension")
    return ext(M.ambient_n, M)


def zero_vector(frame: ModuleFrame) -> FreeVector:
    return FreeVector(frame.rank, tuple(weyl_zero(frame.ambient_n, frame.ring_tag) for _ in range(frame.rank)))
