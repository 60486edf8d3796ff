"""
De Rham complexes and their cohomology.

Exact dims are available for holonomic cyclic modules in one variable via
Fourier transform and restriction to the origin; for lattices only the
Euler characteristic of the reduction is transferred.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import comb
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ

from app.algebra.groebner import FreeVector, GroebnerBasis, Side, left_normal_form, v_order_basis
from app.algebra.lattices import IntegralPresentation, make_lattice, minimal_dimension_via_reduction, reduce_mod_z
from app.algebra.modules import PresentedModule, is_minimal_dimension, is_zero_module, relation_basis
from app.algebra.scalars import LocalScalar, RingTag, is_integral, reduce_residue, scalar_to_sympy
from app.algebra.weyl import WeylElement, fourier, generator_d, monomial, zero as weyl_zero
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
from app.settings import get_settings
from app.utils.linalg import FRACTION_FIELD, local_rows, rank, rational_rows

logger = logging.getLogger(__name__)

THETA = sympy.Symbol("s")

Subset = Tuple[int, ...]


class Provenance(str, Enum):
    DIRECT_N1 = "DirectN1"
    VIA_REDUCTION = "ViaReduction"
    TRANSFER = "Transfer"


@dataclass(frozen=True)
class CohomologyReport:
    dims: Optional[Tuple[int, ...]]
    chi: int
    provenance: Provenance

    @classmethod
    def from_dims(cls, dims: Sequence[int], provenance: Provenance) -> "CohomologyReport":
        chi = sum((-1) ** i * d for i, d in enumerate(dims))
        return cls(tuple(dims), chi, provenance)


# -- the complex ------------------------------------------------------------------


def wedge_sign(i: int, I: Subset) -> int:
    """Sign of dx_i ^ dx_I against the sorted wedge of I + {i}."""
    return -1 if sum(1 for j in I if j < i) % 2 else 1


@dataclass(frozen=True)
class DeRhamComplex:
    """
    The complex M -> M^n -> ... -> M^(binom(n, s)) -> ... -> M placed in
    degrees -n..0.

    Position ``s`` holds one copy of M per s-subset of {0..n-1}.
    """

    module: PresentedModule
    basis: GroebnerBasis = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.module.ambient_n

    def subsets(self, s: int) -> List[Subset]:
        return list(combinations(range(self.n), s))

    def term_rank(self, s: int) -> int:
        return comb(self.n, s) * self.module.rank

    def degree(self, s: int) -> int:
        return s - self.n

    def act(self, i: int, value: FreeVector) -> FreeVector:
        """Left action of d_(i+1) followed by the normal form in M."""
        d = generator_d(self.n, i + 1, self.module.ring_tag)
        return left_normal_form(value.lmul(d), self.basis)

    def d(self, s: int, element: Mapping[Subset, Any]) -> Dict[Subset, Any]:
        return differential(self, s, element)


def differential(
    C: DeRhamComplex,
    s: int,
    element: Mapping[Subset, Any],
    action: Optional[Callable[[int, Any], Any]] = None,
) -> Dict[Subset, Any]:
    """
    Apply d(m dx_I) = sum_i d_i m dx_i ^ dx_I to an element of position ``s``.

    ``action(i, value)`` defaults to the module action; passing
    ``lambda i, f: sympy.diff(f, x[i])`` gives the polynomial de Rham complex.
    """
    if not 0 <= s < C.n:
        raise IndexOutOfRange(f"no differential leaves position {s} for n = {C.n}")
    act = action or C.act
    out: Dict[Subset, Any] = {}
    for I, value in element.items():
        if len(I) != s:
            raise IndexOutOfRange(f"subset {I} does not sit in position {s}")
        for i in range(C.n):
            if i in I:
                continue
            J = tuple(sorted(I + (i,)))
            term = act(i, value)
            if wedge_sign(i, I) < 0:
                term = -term
            out[J] = out[J] + term if J in out else term
    return out


def dr_complex(M: PresentedModule) -> DeRhamComplex:
    if M.side is Side.RIGHT:
        raise RightModule("the de Rham complex is built for left modules")
    return DeRhamComplex(M, relation_basis(M))


# -- b-function along x1 ------------------------------------------------------------


@dataclass(frozen=True)
class BFunction:
    polynomial: sympy.Poly
    integer_roots: Tuple[int, ...]

    def __str__(self) -> str:
        return str(self.polynomial.as_expr())


def _falling(a: int) -> sympy.Expr:
    return sympy.prod([THETA - j for j in range(a)])


def _rising(k: int) -> sympy.Expr:
    return sympy.prod([THETA + j for j in range(1, k + 1)])


def _theta_multiple(u: WeylElement) -> sympy.Expr:
    """
    A polynomial in theta = x d lying in the ideal generated by the initial
    form of ``u`` for the weight (-1, 1).
    """
    weight = {key: key[1][0] - key[0][0] for key, _ in u.terms}
    m = max(weight.values())
    top = [(key, c) for key, c in u.terms if weight[key] == m]
    if m >= 0:
        q = sum(scalar_to_sympy(u.ring_tag, c) * _falling(a[0]) for (a, _), c in top)
        return sympy.expand(q.subs(THETA, THETA - m) * _falling(m))
    q = sum(scalar_to_sympy(u.ring_tag, c) * _falling(b[0]) for (_, b), c in top)
    return sympy.expand(_rising(-m) * q)


def integer_roots(poly: sympy.Poly) -> Tuple[int, ...]:
    roots = set()
    _, factors = poly.factor_list()
    for f, _ in factors:
        if f.degree() == 1:
            r = -f.nth(0) / f.nth(1)
            if r.is_integer:
                roots.add(int(r))
    return tuple(sorted(roots))


def _b_function(relations: Sequence[FreeVector]) -> BFunction:
    b = sympy.Poly(0, THETA, domain="QQ")
    for g in v_order_basis(relations):
        entry = g.entries[0]
        if not entry:
            continue
        b = b.gcd(sympy.Poly(_theta_multiple(entry), THETA, domain="QQ"))
    if b.is_zero:
        raise NotHolonomic("no nonzero polynomial in theta in the initial ideal")
    b = b.monic()
    return BFunction(b, integer_roots(b))


def _require_n1(M: PresentedModule) -> None:
    if M.side is Side.RIGHT:
        raise RightModule("expected a left module")
    if M.ambient_n != 1:
        raise UnsupportedAmbient(f"only n = 1 is supported, got n = {M.ambient_n}")
    if M.ring_tag is not RingTag.RATIONAL_FIELD:
        raise UnsupportedAmbient("only coefficients in QQ are supported here")
    if M.rank > 1:
        raise UnsupportedAmbient("only cyclic modules are supported here")


def b_function_along_x(M: PresentedModule) -> BFunction:
    """
    Monic generator of the theta-polynomials in the initial ideal of the
    annihilator along x1.

    Raises
    ------
    NotHolonomic
        If the module is not of minimal dimension.
    UnsupportedAmbient
        For n != 1, coefficients other than QQ or non-cyclic modules.
    """
    _require_n1(M)
    if is_zero_module(M):
        one = sympy.Poly(1, THETA, domain="QQ")
        return BFunction(one, ())
    if not is_minimal_dimension(M):
        raise NotHolonomic("b-function along x needs a holonomic module")
    return _b_function(M.relations)


# -- exact cohomology for n = 1 ------------------------------------------------------


def _principal_generator(M: PresentedModule) -> WeylElement:
    rows = [r for r in M.relations if not r.is_zero()]
    if len(rows) == 1:
        return rows[0].entries[0]
    G = relation_basis(M)
    if len(G.generators) == 1:
        return G.generators[0].entries[0]
    raise UnsupportedAmbient("h_dr_n1 needs a principal annihilator")


def h_dr_n1(M: PresentedModule) -> CohomologyReport:
    """
    Exact H^0 and H^1 of the de Rham complex of W_1/W_1 P over QQ.

    The Fourier transform Q of P turns d into the x-action; kernel and
    cokernel of x on W_1/W_1 Q are computed on the finite window cut out
    by the extreme integer roots of the b-function of Q.
    """
    _require_n1(M)
    if M.rank == 0 or is_zero_module(M):
        return CohomologyReport.from_dims((0, 0), Provenance.DIRECT_N1)
    if not is_minimal_dimension(M):
        raise NotHolonomic("de Rham dims are only finite for holonomic modules")
    Q = fourier(_principal_generator(M))
    b = _b_function([FreeVector.of([Q])])
    if not b.integer_roots:
        return CohomologyReport.from_dims((0, 0), Provenance.DIRECT_N1)
    k0, k1 = b.integer_roots[0], b.integer_roots[-1]
    m = max(beta[0] - alpha[0] for (alpha, beta), _ in Q.terms)
    source = list(range(max(0, k0 - m), k1 - m + 1))
    target = list(range(max(0, k0), k1 + 1))
    column = {j: i for i, j in enumerate(target)}
    rows = []
    for j in source:
        product = monomial(1, RingTag.RATIONAL_FIELD, (0,), (j,)) * Q
        row = [QQ.zero] * len(target)
        for (alpha, beta), c in product.terms:
            if alpha[0] == 0 and beta[0] in column:
                row[column[beta[0]]] = c
        rows.append(row)
    rk = rank(rows)
    logger.debug("restriction window [%d, %d], map %dx%d of rank %d", k0, k1, len(source), len(target), rk)
    return CohomologyReport.from_dims((len(source) - rk, len(target) - rk), Provenance.DIRECT_N1)


@dataclass(frozen=True)
class StabilizationReport:
    dims: Tuple[int, int]
    chi: int
    degree: int
    stable: bool


def _standard_monomials(G: GroebnerBasis, degree: int) -> List[Tuple[int, int, int]]:
    out = []
    for comp in range(G.frame.rank):
        leads = [exps[:2] for c, exps in G.leads if c == comp]
        for total in range(degree + 1):
            for a in range(total + 1):
                b = total - a
                if not any(a >= la and b >= lb for la, lb in leads):
                    out.append((comp, a, b))
    return sorted(out, key=lambda m: (m[1] + m[2], m[0], m[1]))


def chi_by_stabilization(
    M: PresentedModule, max_degree: Optional[int] = None, window: Optional[int] = None
) -> StabilizationReport:
    """
    Kernel and cokernel of d on Bernstein filtration pieces F_k M.

    The kernel is taken on F_k and the cokernel of d(F_(k+1)) inside F_k;
    the pair is accepted once it stays constant over ``window`` consecutive
    degrees.
    """
    settings = get_settings()
    max_degree = settings.max_degree if max_degree is None else max_degree
    window = settings.stabilization_window if window is None else window
    if M.side is Side.RIGHT:
        raise RightModule("expected a left module")
    if M.ambient_n != 1 or M.ring_tag is not RingTag.RATIONAL_FIELD:
        raise UnsupportedAmbient("stabilization is implemented for n = 1 over QQ")
    G = relation_basis(M)
    if M.rank == 0 or G.is_full_module():
        return StabilizationReport((0, 0), 0, 0, True)
    monos = _standard_monomials(G, max_degree + 2)
    index = {mono: i for i, mono in enumerate(monos)}
    d1 = generator_d(1, 1)
    cache: Dict[Tuple[int, int, int], List[Any]] = {}

    def image(mono: Tuple[int, int, int]) -> List[Any]:
        if mono not in cache:
            comp, a, b = mono
            entries = [weyl_zero(1) for _ in range(M.rank)]
            entries[comp] = d1 * monomial(1, RingTag.RATIONAL_FIELD, (a,), (b,))
            nf = left_normal_form(FreeVector.of(entries), G)
            row = [QQ.zero] * len(monos)
            for c, e in enumerate(nf.entries):
                for (alpha, beta), coeff in e.terms:
                    row[index[(c, alpha[0], beta[0])]] = coeff
            cache[mono] = row
        return cache[mono]

    history: List[Tuple[int, int]] = []
    for k in range(max_degree + 1):
        low = [m for m in monos if m[1] + m[2] <= k]
        nxt = [m for m in monos if m[1] + m[2] <= k + 1]
        ker = len(low) - rank([image(m) for m in low])
        rows_next = [image(m) for m in nxt]
        high = [index[m] for m in monos if m[1] + m[2] > k]
        inside = rank(rows_next) - rank([[r[c] for c in high] for r in rows_next])
        history.append((ker, len(low) - inside))
        if len(history) >= window and len(set(history[-window:])) == 1:
            h0, h1 = history[-1]
            return StabilizationReport((h0, h1), h0 - h1, k, True)
    h0, h1 = history[-1]
    logger.warning("filtration dims did not stabilize up to degree %d", max_degree)
    return StabilizationReport((h0, h1), h0 - h1, max_degree, False)


# -- transfer through the reduction ---------------------------------------------------


def _reduction(P: IntegralPresentation) -> Optional[PresentedModule]:
    if not minimal_dimension_via_reduction(P):
        raise NotMinimalDimension("the Euler characteristic is only defined in minimal dimension")
    report = reduce_mod_z(make_lattice(P))
    return None if report.is_zero else report.reduced_module


def dims_of_reduction(P: IntegralPresentation) -> CohomologyReport:
    """De Rham dims of the reduction L/zL (not claimed for the completed module)."""
    reduced = _reduction(P)
    if reduced is None:
        return CohomologyReport.from_dims((0, 0), Provenance.VIA_REDUCTION)
    direct = h_dr_n1(reduced)
    return CohomologyReport(direct.dims, direct.chi, Provenance.VIA_REDUCTION)


def chi_via_reduction(P: IntegralPresentation) -> CohomologyReport:
    """Euler characteristic of the completed module, read off the reduction."""
    reduced = _reduction(P)
    if reduced is None:
        return CohomologyReport(None, 0, Provenance.TRANSFER)
    return CohomologyReport(None, h_dr_n1(reduced).chi, Provenance.TRANSFER)


# -- perfect complexes over the valuation ring ----------------------------------------


Matrix = Tuple[Tuple[LocalScalar, ...], ...]


@dataclass(frozen=True)
class PerfectComplexOverDVR:
    """
    0 -> B^(r_0) -> B^(r_1) -> ... with ``matrices[i]`` of shape
    ranks[i+1] x ranks[i] acting on columns.
    """

    ranks: Tuple[int, ...]
    matrices: Tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if len(self.matrices) != max(len(self.ranks) - 1, 0):
            raise RankMismatch("need one matrix between consecutive terms")
        for i, mat in enumerate(self.matrices):
            if len(mat) != self.ranks[i + 1] or any(len(row) != self.ranks[i] for row in mat):
                raise RankMismatch(f"matrix {i} must have shape {self.ranks[i + 1]}x{self.ranks[i]}")


@dataclass(frozen=True)
class EulerCheckReport:
    generic_dims: Tuple[int, ...]
    special_dims: Tuple[int, ...]
    chi_generic: int
    chi_special: int
    alternating_rank_sum: int

    @property
    def equal(self) -> bool:
        return self.chi_generic == self.chi_special


def _compose(after: Matrix, before: Matrix) -> List[List[LocalScalar]]:
    inner = len(before)
    width = len(before[0]) if before else 0
    out = []
    for row in after:
        acc = []
        for c in range(width):
            s = LocalScalar.zero()
            for k in range(inner):
                s = s + row[k] * before[k][c]
            acc.append(s)
        out.append(acc)
    return out


def _cohomology_dims(ranks: Sequence[int], map_ranks: Sequence[int]) -> Tuple[int, ...]:
    dims = []
    for i, r in enumerate(ranks):
        outgoing = map_ranks[i] if i < len(map_ranks) else 0
        incoming = map_ranks[i - 1] if i >= 1 else 0
        dims.append(r - outgoing - incoming)
    return tuple(dims)


def euler_check_perfect(C: PerfectComplexOverDVR) -> EulerCheckReport:
    """
    Compare cohomology of the generic fiber (over QQ(z)) and of the special
    fiber (at z = 0).

    Raises
    ------
    NonIntegral
        If an entry has a pole at z = 0.
    NotAComplex
        If two consecutive maps do not compose to zero.
    """
    for mat in C.matrices:
        for row in mat:
            for c in row:
                if not is_integral(c):
                    raise NonIntegral(f"entry {c} is not integral")
    for i in range(len(C.matrices) - 1):
        if any(c for row in _compose(C.matrices[i + 1], C.matrices[i]) for c in row):
            raise NotAComplex(f"d^{i + 1} d^{i} is not zero")
    generic = [rank(local_rows(mat), FRACTION_FIELD) for mat in C.matrices]
    special = [rank(rational_rows([[reduce_residue(c) for c in row] for row in mat])) for mat in C.matrices]
    gdims = _cohomology_dims(C.ranks, generic)
    sdims = _cohomology_dims(C.ranks, special)
    alternating = sum((-1) ** i * r for i, r in enumerate(C.ranks))
    report = EulerCheckReport(
        gdims,
        sdims,
        sum((-1) ** i * d for i, d in enumerate(gdims)),
        sum((-1) ** i * d for i, d in enumerate(sdims)),
        alternating,
    )
    if not report.equal:
        logger.warning("generic chi %d differs from special chi %d", report.chi_generic, report.chi_special)
    return report
