"""
Gröbner bases, syzygies, z-saturation and free resolutions.
"""
import random

import pytest
from sympy import QQ

from app.algebra.battery import random_ideal, random_weyl_element
from app.algebra.groebner import (
    FreeVector,
    ModuleFrame,
    Side,
    buchberger,
    colon_z,
    collect_stats,
    contains,
    free_resolution,
    is_member,
    left_normal_form,
    saturate_z,
    syzygies,
    transpose_vector,
)
from app.algebra.scalars import RingTag, Z
from app.algebra.weyl import bernstein_degree, generator_d, generator_x, monomial, zero
from app.errors import EngineLimitExceeded, RankMismatch
from app.settings import reset_settings
from app.utils.linalg import rank

POLY = RingTag.POLYNOMIAL_Z


def _vec(*entries):
    return FreeVector.of(list(entries))


def _zmono(alpha, beta, c):
    return monomial(1, POLY, alpha, beta, c)


def test_unit_ideal_is_full() -> None:
    """
    x and d generate W_1 since d x - x d = 1.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    G = buchberger([_vec(x), _vec(d)])
    assert G.is_full_module()
    assert len(G) == 1


def test_membership_of_random_combinations() -> None:
    """
    Left combinations of the generators reduce to zero; their normal forms are idempotent.
    """
    rng = random.Random(2024)
    for _ in range(6):
        M = random_ideal(rng, n=1, count=2)
        G = buchberger(M.relations)
        combo = None
        for r in M.relations:
            term = r.lmul(random_weyl_element(rng, 1))
            combo = term if combo is None else combo + term
        assert is_member(combo, G)
        v = _vec(random_weyl_element(rng, 1, max_degree=3))
        nf = left_normal_form(v, G)
        assert left_normal_form(nf, G) == nf
        assert is_member(v - nf, G)


def test_right_module_basis_uses_right_multiplication() -> None:
    """
    x*d lies in the right ideal d*W only after transposition is respected: d*x does.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    G = buchberger([_vec(d)], side=Side.RIGHT)
    assert is_member(_vec(d * x), G)
    assert not is_member(_vec(x * d), G)


def test_syzygies_combine_to_zero() -> None:
    """
    Every returned syzygy s satisfies sum s_k f_k = 0.
    """
    rng = random.Random(5)
    for _ in range(4):
        vectors = [_vec(random_weyl_element(rng, 1), random_weyl_element(rng, 1)) for _ in range(3)]
        vectors = [v for v in vectors if not v.is_zero()]
        for s in syzygies(vectors):
            total = None
            for coeff, f in zip(s.entries, vectors):
                term = f.lmul(coeff)
                total = term if total is None else total + term
            assert total.is_zero()


def test_koszul_syzygy() -> None:
    """
    (d2, -d1) is a syzygy of (d1, d2) in W_2.
    """
    d1, d2 = generator_d(2, 1), generator_d(2, 2)
    syz = syzygies([_vec(d1), _vec(d2)])
    G = buchberger(syz)
    assert is_member(_vec(d2, -d1), G)


def test_colon_and_saturation_by_z() -> None:
    """
    (z^2 d : z) contains z d but not d; the saturation contains d.
    """
    frame = ModuleFrame(1, POLY, 1)
    zzd = _vec(_zmono((0,), (1,), Z**2))
    colon = buchberger(colon_z([zzd], frame), frame=frame)
    assert is_member(_vec(_zmono((0,), (1,), Z)), colon)
    assert not is_member(_vec(_zmono((0,), (1,), 1)), colon)
    sat = buchberger(saturate_z([zzd], frame), frame=frame)
    assert is_member(_vec(_zmono((0,), (1,), 1)), sat)


def test_saturated_module_is_left_alone() -> None:
    """
    (1 + z) d - 1 has no z-torsion, so saturation adds nothing.
    """
    g = _vec(_zmono((0,), (1,), 1 + Z) - _zmono((0,), (0,), 1))
    G = buchberger([g])
    assert all(is_member(v, G) for v in saturate_z([g]))


SPAN_DEGREE = 8
WEYL_MONOMIALS = [((a,), (b,)) for a in range(SPAN_DEGREE + 1) for b in range(SPAN_DEGREE + 1 - a)]


def _coordinates(u):
    index = {m: i for i, m in enumerate(WEYL_MONOMIALS)}
    row = [QQ.zero] * len(WEYL_MONOMIALS)
    for key, c in u.terms:
        row[index[key]] = QQ.convert(c)
    return row


def _degree_span(G):
    """Multiples x^a d^b g of the basis elements with degree at most SPAN_DEGREE."""
    out = []
    for g in G.generators:
        (u,) = g.entries
        room = SPAN_DEGREE - bernstein_degree(u)
        for a in range(room + 1):
            for b in range(room + 1 - a):
                out.append(monomial(1, RingTag.RATIONAL_FIELD, (a,), (b,)) * u)
    return out


def test_membership_agrees_with_linear_algebra() -> None:
    """
    Up to degree 8 the ideal is spanned by shifted basis elements, so a rank test decides membership.
    """
    rng = random.Random(88)
    for _ in range(20):
        M = random_ideal(rng, n=1, count=2)
        G = buchberger(M.relations)
        span = _degree_span(G)
        rows = [_coordinates(u) for u in span]
        base = rank(rows)
        members = []
        if span:
            combo = zero(1)
            for u in rng.sample(span, min(4, len(span))):
                combo = combo + rng.randint(1, 5) * u
            members.append(combo)
        candidates = members + [random_weyl_element(rng, 1, max_degree=SPAN_DEGREE, terms=4) for _ in range(4)]
        for f in candidates:
            in_span = rank(rows + [_coordinates(f)]) == base
            assert is_member(_vec(f), G) == in_span
        for f in members:
            assert is_member(_vec(f), G)


@pytest.mark.parametrize(
    "generators",
    [
        [[_zmono((0,), (1,), Z**2)]],
        [[_zmono((0,), (1,), Z) - _zmono((0,), (0,), Z)], [_zmono((1,), (0,), Z**2)]],
        [[_zmono((1,), (1,), Z) - _zmono((0,), (0,), Z**2)]],
        [[_zmono((0,), (1,), 1 + Z) - _zmono((0,), (0,), 1)]],
    ],
)
def test_saturation_is_idempotent(generators) -> None:
    """
    Saturating a saturated module returns the same module.
    """
    frame = ModuleFrame(1, POLY, 1)
    once = saturate_z([_vec(*g) for g in generators], frame)
    twice = saturate_z(once, frame)
    assert contains(buchberger(once, frame=frame), twice)
    assert contains(buchberger(twice, frame=frame), once)


def test_saturation_is_idempotent_on_random_ideals() -> None:
    """
    Idempotence on seeded random ideals with QQ[z] coefficients.
    """
    rng = random.Random(41)
    frame = ModuleFrame(1, POLY, 1)
    for _ in range(4):
        M = random_ideal(rng, n=1, count=2, tag=POLY, max_degree=1, terms=2)
        once = saturate_z(M.relations, frame)
        twice = saturate_z(once, frame)
        assert contains(buchberger(once, frame=frame), twice)
        assert contains(buchberger(twice, frame=frame), once)


def test_resolution_ranks() -> None:
    """
    W_1/W_1 d resolves as 0 -> W -> W; W_2/(d1, d2) as the Koszul complex.
    """
    d = generator_d(1, 1)
    res = free_resolution([_vec(d)], 3)
    assert res.ranks == (1, 1)
    assert res.complete
    d1, d2 = generator_d(2, 1), generator_d(2, 2)
    res2 = free_resolution([_vec(d1), _vec(d2)], 4)
    assert res2.ranks == (1, 2, 1)
    assert res2.complete


def test_transpose_vector_is_involution() -> None:
    """
    Transposing twice gives the vector back.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    v = _vec(x * d + 2, d)
    assert transpose_vector(transpose_vector(v)) == v


def test_rank_mismatch() -> None:
    """
    Generators of different ranks are refused.
    """
    x = generator_x(1, 1)
    with pytest.raises(RankMismatch):
        buchberger([_vec(x), _vec(x, zero(1))])


def test_stats_are_collected() -> None:
    """
    A collector sees the bases and S-pairs of the computations run inside it.
    """
    x, d = generator_x(1, 1), generator_d(1, 1)
    with collect_stats() as stats:
        buchberger([_vec(x**2), _vec(x * d), _vec(d**2)])
    assert stats.bases_computed == 1
    assert stats.spairs_processed >= 1


def test_spair_bound_is_enforced(monkeypatch) -> None:
    """
    With a bound of one S-pair the ideal (x^2, x d, d^2) cannot be completed.
    """
    monkeypatch.setenv("WEYLFIBER_MAX_SPAIRS", "1")
    reset_settings()
    x, d = generator_x(1, 1), generator_d(1, 1)
    with pytest.raises(EngineLimitExceeded):
        buchberger([_vec(x**2), _vec(x * d), _vec(d**2)])
