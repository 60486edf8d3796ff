"""
Left Gröbner bases for submodules of W_n(R)^r.

Internally a vector is a dict ``{(component, exps): coefficient}`` where
``exps = alpha + beta + (e,)``. The last slot holds the z exponent for
coefficients in QQ[z] (z is an extra central variable and coefficients live
in QQ) and the h exponent in the homogenized algebra (d x = x d + h^2).
For QQ and QQ(z) coefficients it is 0.

Right-module bases are computed on the transposed left module.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from app.algebra.scalars import ZRING, LocalScalar, RingTag
from app.algebra.weyl import WeylElement, reorder, transpose, zero as weyl_zero
from app.errors import EngineLimitExceeded, InternalInvariant, MixedAmbient, RankMismatch, UnsupportedAmbient
from app.settings import get_settings

logger = logging.getLogger(__name__)

Exps = Tuple[int, ...]
Mono = Tuple[int, Exps]
Vec = Dict[Mono, Any]


class OrderKind(str, Enum):
    DEG_REV_LEX_BERNSTEIN = "DegRevLexBernstein"
    POT_ELIMINATION = "POTElimination"
    V_ORDER_ALONG_X1 = "VOrderAlongX1"


class Side(str, Enum):
    LEFT = "Left"
    RIGHT = "Right"

    @property
    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class TermOrder:
    """
    Monomial order on module terms.

    ``DEG_REV_LEX_BERNSTEIN`` compares Bernstein degree, then the z exponent,
    then reverse lexicographically. ``POT_ELIMINATION`` uses the same
    monomial order with position over term (component 0 largest).
    ``V_ORDER_ALONG_X1`` compares total degree including h, then the weight
    (exponent of d1 minus exponent of x1), then reverse lexicographically
    with h last; it is only used in the homogenized algebra.
    """

    kind: OrderKind = OrderKind.DEG_REV_LEX_BERNSTEIN
    position_over_term: bool = False

    @property
    def pot(self) -> bool:
        return self.position_over_term or self.kind is OrderKind.POT_ELIMINATION

    @property
    def homogenized(self) -> bool:
        return self.kind is OrderKind.V_ORDER_ALONG_X1


DEFAULT_ORDER = TermOrder()
POT_ORDER = TermOrder(OrderKind.POT_ELIMINATION, True)
V_ORDER = TermOrder(OrderKind.V_ORDER_ALONG_X1)


@dataclass(frozen=True)
class ModuleFrame:
    """Shape of a free module W_n(R)^rank."""

    ambient_n: int
    ring_tag: RingTag
    rank: int


@dataclass(frozen=True)
class FreeVector:
    """An element of a free module, given by its entries."""

    rank: int
    entries: Tuple[WeylElement, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rank:
            raise RankMismatch(f"expected {self.rank} entries, got {len(self.entries)}")
        if self.entries:
            first = self.entries[0]
            for e in self.entries[1:]:
                if (e.ambient_n, e.ring_tag) != (first.ambient_n, first.ring_tag):
                    raise MixedAmbient("entries of a vector must share ring and ambient")

    @classmethod
    def of(cls, entries: Sequence[WeylElement]) -> "FreeVector":
        return cls(len(entries), tuple(entries))

    @classmethod
    def zero(cls, frame: ModuleFrame) -> "FreeVector":
        return cls(frame.rank, tuple(weyl_zero(frame.ambient_n, frame.ring_tag) for _ in range(frame.rank)))

    @property
    def ambient_n(self) -> int:
        return self.entries[0].ambient_n

    @property
    def ring_tag(self) -> RingTag:
        return self.entries[0].ring_tag

    @property
    def frame(self) -> ModuleFrame:
        return ModuleFrame(self.ambient_n, self.ring_tag, self.rank)

    def is_zero(self) -> bool:
        return all(not e for e in self.entries)

    def __add__(self, other: "FreeVector") -> "FreeVector":
        if other.rank != self.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")
        return FreeVector(self.rank, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "FreeVector":
        return FreeVector(self.rank, tuple(-a for a in self.entries))

    def __sub__(self, other: "FreeVector") -> "FreeVector":
        return self + (-other)

    def lmul(self, u: WeylElement) -> "FreeVector":
        """Left multiplication ``u * self``."""
        return FreeVector(self.rank, tuple(u * a for a in self.entries))

    def rmul(self, u: WeylElement) -> "FreeVector":
        return FreeVector(self.rank, tuple(a * u for a in self.entries))

    def map(self, fn: Callable[[WeylElement], WeylElement]) -> "FreeVector":
        return FreeVector(self.rank, tuple(fn(a) for a in self.entries))

    def __str__(self) -> str:
        return "[" + ", ".join(str(e) for e in self.entries) + "]"


def transpose_vector(v: FreeVector) -> FreeVector:
    return v.map(transpose)


# -- statistics ---------------------------------------------------------------


@dataclass
class EngineStats:
    """Counters gathered while a collector is active."""

    spairs_processed: int = 0
    spairs_skipped: int = 0
    zero_reductions: int = 0
    bases_computed: int = 0
    max_basis_size: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {
            "spairs_processed": self.spairs_processed,
            "spairs_skipped": self.spairs_skipped,
            "zero_reductions": self.zero_reductions,
            "bases_computed": self.bases_computed,
            "max_basis_size": self.max_basis_size,
        }


_STATS: ContextVar[Optional[EngineStats]] = ContextVar("weylfiber_engine_stats", default=None)


@contextmanager
def collect_stats() -> Iterator[EngineStats]:
    stats = EngineStats()
    token = _STATS.set(stats)
    try:
        yield stats
    finally:
        _STATS.reset(token)


# -- engine -------------------------------------------------------------------


def _divides(a: Exps, b: Exps) -> bool:
    return all(i <= j for i, j in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(i, j) for i, j in zip(a, b))


class _Engine:
    """Call-local Buchberger machinery for one ambient and order."""

    def __init__(self, n: int, tag: RingTag, order: TermOrder) -> None:
        if order.homogenized and tag is not RingTag.RATIONAL_FIELD:
            raise UnsupportedAmbient("the V-order is only available over QQ")
        self.n = n
        self.tag = tag
        self.order = order
        self.homogenized = order.homogenized
        self.one = LocalScalar.one() if tag is RingTag.LOCAL_FIELD else QQ.one
        self.max_pairs = get_settings().max_spairs
        self.stats = _STATS.get()
        self._cache: Dict[Mono, tuple] = {}

    def mono_key(self, exps: Exps) -> tuple:
        n2 = 2 * self.n
        if self.homogenized:
            return (sum(exps), exps[n2 // 2] - exps[0], tuple(-v for v in reversed(exps)))
        return (sum(exps[:n2]), exps[n2], tuple(-v for v in reversed(exps[:n2])))

    def key(self, mono: Mono) -> tuple:
        hit = self._cache.get(mono)
        if hit is None:
            comp, exps = mono
            mk = self.mono_key(exps)
            hit = (-comp, mk) if self.order.pot else (mk, -comp)
            self._cache[mono] = hit
        return hit

    def lead(self, v: Vec) -> Mono:
        return max(v, key=self.key)

    def mul_term(self, c: Any, t: Exps, v: Vec) -> Vec:
        """Return ``c * m_t * v`` where m_t is the normal-ordered monomial t."""
        n = self.n
        ta, tb, te = t[:n], t[n:2 * n], t[2 * n]
        out: Vec = {}
        for (comp, exps), cv in v.items():
            a, b, e = exps[:n], exps[n:2 * n], exps[2 * n]
            base = c * cv
            for nu, k in reorder(tb, a):
                shift = 2 * sum(nu) if self.homogenized else 0
                key = (
                    comp,
                    tuple(x + y - z for x, y, z in zip(ta, a, nu))
                    + tuple(x + y - z for x, y, z in zip(tb, b, nu))
                    + (te + e + shift,),
                )
                val = base * k
                if key in out:
                    s = out[key] + val
                    if s:
                        out[key] = s
                    else:
                        del out[key]
                else:
                    out[key] = val
        return out

    @staticmethod
    def subtract_into(p: Vec, q: Vec) -> None:
        for k, c in q.items():
            if k in p:
                s = p[k] - c
                if s:
                    p[k] = s
                else:
                    del p[k]
            else:
                p[k] = -c

    def monic(self, v: Vec) -> Vec:
        lc = v[self.lead(v)]
        if lc == self.one:
            return dict(v)
        return {k: c / lc for k, c in v.items()}

    def normal_form(
        self, f: Vec, basis: Sequence[Vec], leads: Sequence[Mono], track: bool = False
    ) -> Tuple[Vec, Optional[List[Dict[Exps, Any]]]]:
        p = dict(f)
        rem: Vec = {}
        quotients: Optional[List[Dict[Exps, Any]]] = [dict() for _ in basis] if track else None
        while p:
            m = self.lead(p)
            c = p[m]
            for idx, (g, lm) in enumerate(zip(basis, leads)):
                if lm[0] == m[0] and _divides(lm[1], m[1]):
                    t = tuple(i - j for i, j in zip(m[1], lm[1]))
                    q = c / g[lm]
                    self.subtract_into(p, self.mul_term(q, t, g))
                    if quotients is not None:
                        qd = quotients[idx]
                        s = qd[t] + q if t in qd else q
                        if s:
                            qd[t] = s
                        else:
                            del qd[t]
                    break
            else:
                rem[m] = c
                del p[m]
        return rem, quotients

    def spoly(self, gi: Vec, gj: Vec, li: Mono, lj: Mono) -> Tuple[Vec, Exps, Exps]:
        lcm = _lcm(li[1], lj[1])
        ti = tuple(a - b for a, b in zip(lcm, li[1]))
        tj = tuple(a - b for a, b in zip(lcm, lj[1]))
        s = self.mul_term(self.one, ti, gi)
        self.subtract_into(s, self.mul_term(self.one, tj, gj))
        return s, ti, tj

    def complete(self, gens: Sequence[Vec]) -> List[Vec]:
        basis: List[Vec] = []
        leads: List[Mono] = []
        pending: set = set()
        processed = 0

        def append(h: Vec) -> None:
            h = self.monic(h)
            lm = self.lead(h)
            idx = len(basis)
            for i, other in enumerate(leads):
                if other[0] == lm[0]:
                    pending.add((i, idx))
            basis.append(h)
            leads.append(lm)

        for f in gens:
            if not f:
                continue
            h, _ = self.normal_form(f, basis, leads)
            if h:
                append(h)

        while pending:
            i, j = min(
                pending,
                key=lambda ij: (self.key((leads[ij[0]][0], _lcm(leads[ij[0]][1], leads[ij[1]][1]))), ij[1], ij[0]),
            )
            pending.discard((i, j))
            if self._chain_skip(i, j, leads, pending):
                if self.stats is not None:
                    self.stats.spairs_skipped += 1
                continue
            processed += 1
            if processed > self.max_pairs:
                raise EngineLimitExceeded(f"more than {self.max_pairs} S-pairs")
            s, _, _ = self.spoly(basis[i], basis[j], leads[i], leads[j])
            h, _ = self.normal_form(s, basis, leads)
            if h:
                append(h)
            elif self.stats is not None:
                self.stats.zero_reductions += 1

        out = self.interreduce(basis, leads)
        if self.stats is not None:
            self.stats.spairs_processed += processed
            self.stats.bases_computed += 1
            self.stats.max_basis_size = max(self.stats.max_basis_size, len(out))
        logger.debug("basis of size %d after %d S-pairs", len(out), processed)
        return out

    @staticmethod
    def _chain_skip(i: int, j: int, leads: Sequence[Mono], pending: set) -> bool:
        comp = leads[i][0]
        lcm = _lcm(leads[i][1], leads[j][1])
        for k, lk in enumerate(leads):
            if k in (i, j) or lk[0] != comp or not _divides(lk[1], lcm):
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            return True
        return False

    def interreduce(self, basis: Sequence[Vec], leads: Sequence[Mono]) -> List[Vec]:
        keep = []
        for i, lm in enumerate(leads):
            redundant = False
            for j, other in enumerate(leads):
                if j == i or other[0] != lm[0] or not _divides(other[1], lm[1]):
                    continue
                if other != lm or j < i:
                    redundant = True
                    break
            if not redundant:
                keep.append(i)
        kept = [basis[i] for i in keep]
        kept_leads = [leads[i] for i in keep]
        out = []
        for idx, g in enumerate(kept):
            others = kept[:idx] + kept[idx + 1:]
            other_leads = kept_leads[:idx] + kept_leads[idx + 1:]
            h, _ = self.normal_form(g, others, other_leads)
            out.append(self.monic(h))
        out.sort(key=lambda v: self.key(self.lead(v)))
        return out

    def schreyer(self, basis: Sequence[Vec]) -> List[Vec]:
        """Syzygies of a Gröbner basis from the standard representations of its S-vectors."""
        leads = [self.lead(g) for g in basis]
        syz: List[Vec] = []
        for j in range(len(basis)):
            for i in range(j):
                if leads[i][0] != leads[j][0]:
                    continue
                s, ti, tj = self.spoly(basis[i], basis[j], leads[i], leads[j])
                rem, quotients = self.normal_form(s, basis, leads, track=True)
                if rem:
                    raise InternalInvariant("S-vector of a Gröbner basis did not reduce to zero")
                vec: Vec = {(i, ti): self.one}
                self.subtract_into(vec, {(j, tj): self.one})
                for k, qd in enumerate(quotients or []):
                    self.subtract_into(vec, {(k, t): c for t, c in qd.items()})
                if vec:
                    syz.append(vec)
        return syz


# -- conversions ----------------------------------------------------------------


def to_vec(v: FreeVector, offset: int = 0) -> Vec:
    out: Vec = {}
    for comp, el in enumerate(v.entries):
        for (a, b), c in el.terms:
            if el.ring_tag is RingTag.POLYNOMIAL_Z:
                for (e,), q in c.items():
                    out[(comp + offset, a + b + (e,))] = q
            else:
                out[(comp + offset, a + b + (0,))] = c
    return out


def from_vec(v: Vec, frame: ModuleFrame, offset: int = 0) -> FreeVector:
    n = frame.ambient_n
    per_comp: List[Dict[Tuple[Exps, Exps], Any]] = [dict() for _ in range(frame.rank)]
    for (comp, exps), c in v.items():
        c_idx = comp - offset
        if not 0 <= c_idx < frame.rank:
            continue
        key = (exps[:n], exps[n:2 * n])
        e = exps[2 * n]
        acc = per_comp[c_idx]
        if frame.ring_tag is RingTag.POLYNOMIAL_Z:
            term = ZRING({(e,): c})
            acc[key] = acc[key] + term if key in acc else term
        else:
            acc[key] = acc[key] + c if key in acc else c
    entries = tuple(WeylElement.from_dict(n, frame.ring_tag, acc) for acc in per_comp)
    return FreeVector(frame.rank, entries)


def _resolve_frame(vectors: Sequence[FreeVector], frame: Optional[ModuleFrame]) -> ModuleFrame:
    if not vectors:
        if frame is None:
            raise ValueError("a frame is required for an empty generator list")
        return frame
    first = vectors[0].frame
    for v in vectors[1:]:
        if v.rank != first.rank:
            raise RankMismatch(f"rank {first.rank} vs {v.rank}")
        if (v.ambient_n, v.ring_tag) != (first.ambient_n, first.ring_tag):
            raise MixedAmbient("generators must share ring and ambient")
    if frame is not None and frame != first:
        if frame.rank != first.rank:
            raise RankMismatch(f"rank {frame.rank} vs {first.rank}")
        raise MixedAmbient("generators do not live in the given frame")
    return first


# -- public API -------------------------------------------------------------------


@dataclass(frozen=True)
class GroebnerBasis:
    """
    Inter-reduced Gröbner basis of a submodule.

    For ``side == Side.RIGHT`` the generators are right-module generators;
    the internal vectors hold their transposes.
    """

    order: TermOrder
    generators: Tuple[FreeVector, ...]
    ring_tag: RingTag
    side: Side
    frame: ModuleFrame
    vecs: Tuple[Vec, ...] = field(default=(), compare=False, repr=False)
    leads: Tuple[Mono, ...] = field(default=(), compare=False, repr=False)

    def engine(self) -> _Engine:
        return _Engine(self.frame.ambient_n, self.ring_tag, self.order)

    def __len__(self) -> int:
        return len(self.generators)

    def is_full_module(self) -> bool:
        """True iff the basis spans the whole free module."""
        zero_exps = (0,) * (2 * self.frame.ambient_n + 1)
        units = {comp for comp, exps in self.leads if exps == zero_exps}
        return units == set(range(self.frame.rank))


def buchberger(
    generators: Sequence[FreeVector],
    order: TermOrder = DEFAULT_ORDER,
    *,
    frame: Optional[ModuleFrame] = None,
    side: Side = Side.LEFT,
) -> GroebnerBasis:
    frame = _resolve_frame(generators, frame)
    gens = [transpose_vector(g) for g in generators] if side is Side.RIGHT else list(generators)
    eng = _Engine(frame.ambient_n, frame.ring_tag, order)
    basis = eng.complete([to_vec(g) for g in gens])
    leads = tuple(eng.lead(g) for g in basis)
    out = [from_vec(g, frame) for g in basis]
    if side is Side.RIGHT:
        out = [transpose_vector(g) for g in out]
    return GroebnerBasis(order, tuple(out), frame.ring_tag, side, frame, tuple(basis), leads)


def left_normal_form(v: FreeVector, G: GroebnerBasis) -> FreeVector:
    if v.rank != G.frame.rank:
        raise RankMismatch(f"vector of rank {v.rank} against basis of rank {G.frame.rank}")
    if (v.ambient_n, v.ring_tag) != (G.frame.ambient_n, G.ring_tag):
        raise MixedAmbient("vector and basis live over different rings")
    w = transpose_vector(v) if G.side is Side.RIGHT else v
    eng = G.engine()
    rem, _ = eng.normal_form(to_vec(w), G.vecs, G.leads)
    out = from_vec(rem, G.frame)
    return transpose_vector(out) if G.side is Side.RIGHT else out


def is_member(v: FreeVector, G: GroebnerBasis) -> bool:
    return left_normal_form(v, G).is_zero()


def contains(G: GroebnerBasis, vectors: Sequence[FreeVector]) -> bool:
    return all(is_member(v, G) for v in vectors)


def syzygy_module(G: GroebnerBasis) -> Tuple[FreeVector, ...]:
    """Left syzygies of the generators of ``G`` (Schreyer)."""
    if not G.generators:
        return ()
    eng = G.engine()
    syz = eng.schreyer(list(G.vecs))
    target = ModuleFrame(G.frame.ambient_n, G.ring_tag, len(G.generators))
    out = tuple(from_vec(s, target) for s in syz)
    if G.side is Side.RIGHT:
        out = tuple(transpose_vector(s) for s in out)
    return out


def syzygies(vectors: Sequence[FreeVector], frame: Optional[ModuleFrame] = None) -> Tuple[FreeVector, ...]:
    """
    Generators of the left syzygy module of an arbitrary list of vectors.

    Built by eliminating the first block of ``(f_k, e_k)`` under a
    position-over-term order.
    """
    if not vectors:
        return ()
    frame = _resolve_frame(vectors, frame)
    q, p = frame.rank, len(vectors)
    eng = _Engine(frame.ambient_n, frame.ring_tag, POT_ORDER)
    one = eng.one
    tagged = []
    for k, v in enumerate(vectors):
        vec = to_vec(v)
        vec[(q + k, (0,) * (2 * frame.ambient_n + 1))] = one
        tagged.append(vec)
    basis = eng.complete(tagged)
    target = ModuleFrame(frame.ambient_n, frame.ring_tag, p)
    return tuple(from_vec(g, target, offset=q) for g in basis if eng.lead(g)[0] >= q)


def intersect(
    A: Sequence[FreeVector], B: Sequence[FreeVector], frame: Optional[ModuleFrame] = None
) -> Tuple[FreeVector, ...]:
    """Generators of the intersection of two left submodules."""
    frame = _resolve_frame(list(A) + list(B), frame)
    if not A or not B:
        return ()
    q = frame.rank
    eng = _Engine(frame.ambient_n, frame.ring_tag, POT_ORDER)
    gens = []
    for a in A:
        va = to_vec(a)
        gens.append({**va, **to_vec(a, offset=q)})
    for b in B:
        gens.append(to_vec(b))
    basis = eng.complete(gens)
    return tuple(from_vec(g, frame, offset=q) for g in basis if eng.lead(g)[0] >= q)


def _z_multiples(frame: ModuleFrame) -> List[FreeVector]:
    n = frame.ambient_n
    zterm = WeylElement.from_dict(n, RingTag.POLYNOMIAL_Z, {((0,) * n, (0,) * n): ZRING.gens[0]})
    zero_el = weyl_zero(n, RingTag.POLYNOMIAL_Z)
    return [
        FreeVector(frame.rank, tuple(zterm if i == j else zero_el for i in range(frame.rank)))
        for j in range(frame.rank)
    ]


def colon_z(N: Sequence[FreeVector], frame: Optional[ModuleFrame] = None) -> Tuple[FreeVector, ...]:
    """Generators of (N : z) = (N intersected with z F) / z."""
    frame = _resolve_frame(N, frame)
    if frame.ring_tag is not RingTag.POLYNOMIAL_Z:
        raise UnsupportedAmbient("colon by z needs coefficients in QQ[z]")
    if not N:
        return ()
    out = []
    for v in intersect(N, _z_multiples(frame), frame):
        vec = to_vec(v)
        shifted = {(comp, exps[:-1] + (exps[-1] - 1,)): c for (comp, exps), c in vec.items()}
        out.append(from_vec(shifted, frame))
    return tuple(out)


def saturate_z(N: Sequence[FreeVector], frame: Optional[ModuleFrame] = None) -> Tuple[FreeVector, ...]:
    """
    Generators of (N : z^inf), returned as an inter-reduced Gröbner basis.

    Iterates the colon step until the new generators already lie in the
    current module.
    """
    frame = _resolve_frame(N, frame)
    if frame.ring_tag is not RingTag.POLYNOMIAL_Z:
        raise UnsupportedAmbient("saturation needs coefficients in QQ[z]")
    limit = get_settings().max_saturation_steps
    current = buchberger(N, frame=frame)
    for step in range(limit):
        widened = colon_z(current.generators, frame)
        if contains(current, widened):
            logger.info("saturation stable after %d colon steps", step)
            return current.generators
        current = buchberger(list(current.generators) + list(widened), frame=frame)
    raise EngineLimitExceeded(f"saturation did not stabilize in {limit} steps")


@dataclass(frozen=True)
class FreeResolution:
    """
    A free resolution ... -> F_2 -> F_1 -> F_0 of a cokernel.

    ``matrices[k]`` holds the rows of the map F_(k+1) -> F_k, so
    ``ranks[k+1] == len(matrices[k])``. ``complete`` is False when the
    resolution was cut at ``max_length`` with nonzero syzygies left.
    """

    frame: ModuleFrame
    matrices: Tuple[Tuple[FreeVector, ...], ...]
    ranks: Tuple[int, ...]
    complete: bool

    @property
    def length(self) -> int:
        return len(self.matrices)


def free_resolution(
    relations: Sequence[FreeVector], max_length: int, *, frame: Optional[ModuleFrame] = None
) -> FreeResolution:
    frame = _resolve_frame(relations, frame)
    matrices: List[Tuple[FreeVector, ...]] = []
    ranks = [frame.rank]
    current = buchberger(relations, frame=frame)
    complete = False
    while True:
        if not current.generators:
            complete = True
            break
        matrices.append(current.generators)
        ranks.append(len(current.generators))
        syz = syzygy_module(current)
        if not syz:
            complete = True
            break
        if len(matrices) >= max_length:
            break
        next_frame = ModuleFrame(frame.ambient_n, frame.ring_tag, len(current.generators))
        current = buchberger(syz, frame=next_frame)
    logger.info("resolution ranks %s (complete=%s)", ranks, complete)
    return FreeResolution(frame, tuple(matrices), tuple(ranks), complete)


# -- homogenized algebra -------------------------------------------------------


def homogenize(v: Vec, n: int) -> Vec:
    """Homogenize an internal vector with respect to total degree, h in the last slot."""
    if not v:
        return {}
    top = max(sum(exps[:2 * n]) for _, exps in v)
    return {(comp, exps[:2 * n] + (top - sum(exps[:2 * n]),)): c for (comp, exps), c in v.items()}


def dehomogenize(v: Vec, n: int) -> Vec:
    out: Vec = {}
    for (comp, exps), c in v.items():
        key = (comp, exps[:2 * n] + (0,))
        s = out[key] + c if key in out else c
        if s:
            out[key] = s
        elif key in out:
            del out[key]
    return out


def v_order_basis(generators: Sequence[FreeVector]) -> Tuple[FreeVector, ...]:
    """
    Gröbner basis for the weight (-1 on x1, +1 on d1) filtration.

    The generators are homogenized, completed in the homogenized algebra
    under ``V_ORDER`` and dehomogenized; the result generates the same left
    module and its initial forms generate the initial module.
    """
    if not generators:
        return ()
    frame = _resolve_frame(generators, None)
    eng = _Engine(frame.ambient_n, frame.ring_tag, V_ORDER)
    basis = eng.complete([homogenize(to_vec(g), frame.ambient_n) for g in generators])
    out = []
    for g in basis:
        d = dehomogenize(g, frame.ambient_n)
        if d:
            out.append(from_vec(d, frame))
    return tuple(out)
