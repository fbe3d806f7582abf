"""
Tests for the constraint system and the bilinear search.
"""

from fractions import Fraction

import numpy as np
import pytest

from app.core.classification import D4, FAMILY_GB, classify_dim4
from app.core.lck_analysis import structural_theorem_suite, theorem_delta_residual, theorem_deta_check
from app.core.search import (
    AffineSubspace,
    canonical_key,
    default_system,
    deduplicate,
    enumerate_nilpotent_v_dim2,
    make_search,
    search_bilinear,
    solve_linear,
)
from app.core.triples import (
    build_abelian_kahler,
    build_gb,
    check_triple,
    correspondence,
    inverse_correspondence,
    semidirect,
    transport,
)
from app.utils.exceptions import ValidationError


def test_system_shape():
    """Three conditions on a 2x2 abelian 𝔥, plus v = 0 when fixed."""
    system = default_system(1, 1)
    assert system.unknowns == 8
    assert system.coefficients.shape == (12, 8)
    fixed = default_system(1, 1, fix_v_zero=True)
    assert fixed.coefficients.shape == (16, 8)


def test_d4_point_solves_both_blocks(d4_triple):
    system = default_system(1, 1)
    backend = system.backend
    x = np.concatenate([d4_triple.u.ravel(), d4_triple.v.ravel()])
    assert backend.all_zero(system.linear_residual(x))
    assert backend.all_zero(system.bilinear_residual(d4_triple.u, d4_triple.v))


def test_v_zero_leaves_the_gb_line():
    """With v = 0 the linear block forces u = -Id/2 + b J."""
    space = solve_linear(default_system(1, 1, fix_v_zero=True))
    assert space.dimension == 1
    u, v = default_system(1, 1).split(space.point([Fraction(3)]))
    assert u[0, 0] == Fraction(-1, 2)
    assert u[1, 1] == Fraction(-1, 2)
    assert u[0, 1] == -u[1, 0]
    assert all(x == 0 for x in v.ravel())


def test_affine_point_checks_coordinate_count(exact):
    space = AffineSubspace(exact.zeros(2), exact.identity(2), exact)
    with pytest.raises(ValidationError):
        space.point([1])


def test_random_point_stays_on_the_sampling_grid(exact, rng):
    space = AffineSubspace(exact.array([1, 0]), exact.identity(2), exact)
    point = space.random_point(rng, radius=2, denominator=3)
    assert all(abs(x) <= 3 and (x * 3).denominator == 1 for x in point)


def test_search_with_v_fixed_hits_gb_triples():
    hits = search_bilinear(default_system(1, 1, fix_v_zero=True), samples=8, seed=3)
    assert hits
    for triple in hits:
        assert check_triple(triple).in_h
        assert classify_dim4(triple).tag == FAMILY_GB


def test_search_is_deterministic():
    system = default_system(1, 1)
    first = [canonical_key(t) for t in search_bilinear(system, samples=6, seed=11)]
    second = [canonical_key(t) for t in search_bilinear(system, samples=6, seed=11)]
    assert first == second


def test_search_hits_are_verified():
    for triple in search_bilinear(default_system(1, 2), samples=6, seed=5):
        assert check_triple(triple).in_h
        assert triple.c == 2


def test_search_without_samples():
    assert search_bilinear(default_system(1, 1), samples=0, seed=0) == []


def test_search_needs_exact_backend(floating):
    system = default_system(1, 1, backend=floating)
    with pytest.raises(ValidationError):
        make_search(system)


def test_deduplicate_keeps_first_occurrences(exact):
    a, b = build_gb(1, exact), build_gb(2, exact)
    unique = deduplicate([a, b, build_gb(1, exact)])
    assert unique == [a, b]


def test_enumeration_for_c_zero(exact):
    algebra, structure = build_abelian_kahler(1, exact)
    split = enumerate_nilpotent_v_dim2(algebra, structure, 0)
    assert split.rank_one is None
    assert len(split.triples) == 4
    for triple in split.triples:
        assert triple.c == 0
        assert exact.all_zero(triple.v)
        assert check_triple(triple).in_h


def test_enumeration_for_nonzero_c(exact):
    algebra, structure = build_abelian_kahler(1, exact)
    split = enumerate_nilpotent_v_dim2(algebra, structure, 2)
    assert len(split.triples) == 5
    assert all(check_triple(triple).in_h for triple in split.triples)
    assert not exact.all_zero(split.rank_one.v)
    assert split.triples[-1] is split.rank_one


def test_enumeration_describes_the_family(exact):
    """u(b) = -Id/2 + c b J with v = 0, for every rational b."""
    algebra, structure = build_abelian_kahler(1, exact)
    split = enumerate_nilpotent_v_dim2(algebra, structure, 2)
    family = split.family
    assert exact.all_zero(family.offset + exact.identity(2) * Fraction(1, 2))
    assert exact.all_zero(family.slope - structure.J * 2)
    for b, instance in zip((0, 1, -2, Fraction(7, 2)), split.instances):
        assert exact.all_zero(family.member(b).u - instance.u)
    member = family.member(Fraction(5, 3))
    assert check_triple(member).in_h
    assert classify_dim4(transport(member, 1)).b == Fraction(5, 3)


def test_enumeration_rejects_other_algebras(exact, counterexample_triple):
    with pytest.raises(ValidationError) as info:
        enumerate_nilpotent_v_dim2(counterexample_triple.algebra, counterexample_triple.structure, 1)
    assert info.value.error_code == "wrong_algebra"
    algebra, structure = build_abelian_kahler(1, exact)
    with pytest.raises(ValidationError) as info:
        enumerate_nilpotent_v_dim2(algebra, structure.rescaled(2), 1)
    assert info.value.error_code == "nonstandard_structure"


@pytest.fixture(scope="module")
def unit_class_hits():
    """Verified triples of A_{1,1} from a fixed seed."""
    return search_bilinear(default_system(1, 1), samples=300, seed=42)


def test_linear_block_vanishes_on_random_points(rng):
    system = default_system(1, 2)
    space = solve_linear(system)
    for _ in range(50):
        assert system.backend.all_zero(system.linear_residual(space.random_point(rng)))


def test_search_covers_both_dimension_four_classes(unit_class_hits):
    tags = {classify_dim4(triple).tag for triple in unit_class_hits}
    assert tags == {D4, FAMILY_GB}


def test_search_keeps_minima_apart(unit_class_hits):
    """Roundings stay near their minima, so distinct minima give distinct triples."""
    assert len(unit_class_hits) > 10
    classes = [classify_dim4(triple) for triple in unit_class_hits]
    labels = {result.describe() for result in classes if result.tag == FAMILY_GB}
    assert len(labels) > 2


def test_rank_one_hits_leave_the_integer_points(unit_class_hits):
    """Secant repair reaches rational points of the rank-one circle besides the integer ones."""
    rank_one = [triple for triple in unit_class_hits if classify_dim4(triple).tag == D4]
    assert any(x.denominator > 1 for triple in rank_one for x in triple.u.ravel())


def test_roundings_stay_within_the_radius():
    search = make_search(default_system(1, 1))
    minimum = np.array([-0.4952, 0.4307, -0.5693, -0.4952])
    candidates = list(search._roundings(minimum))
    assert [Fraction(0), Fraction(0), Fraction(-1), Fraction(0)] not in candidates
    for coords in candidates:
        assert max(abs(float(q) - z) for q, z in zip(coords, minimum)) <= search.rounding_radius


def test_search_triples_satisfy_the_residual_identities(unit_class_hits):
    hits = list(unit_class_hits[:20])
    hits += search_bilinear(default_system(2, 2, fix_v_zero=True), samples=3, seed=1)
    assert any(triple.n == 2 for triple in hits)
    for triple in hits:
        algebra, structure = semidirect(triple)
        assert theorem_delta_residual(algebra, structure) == 0
        assert theorem_deta_check(algebra, structure).holds
        failed = [claim.name for claim in structural_theorem_suite(algebra, structure) if claim.status == "fail"]
        assert failed == []
        assert sum(triple.u[k, k] for k in range(triple.dim)) == -triple.n


@pytest.mark.parametrize("c", [Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(5)])
def test_correspondence_round_trip_on_search_triples(c):
    hits = search_bilinear(default_system(1, c), samples=15, seed=7)
    hits += search_bilinear(default_system(1, c, fix_v_zero=True), samples=3, seed=7)
    assert hits
    for triple in hits:
        normalized = correspondence(triple)
        assert check_triple(normalized).in_h
        back = inverse_correspondence(normalized, c)
        assert back.c == triple.c
        assert np.array_equal(back.u, triple.u)
        assert np.array_equal(back.v, triple.v)


def test_search_with_v_required_nonzero(exact):
    hits = search_bilinear(default_system(1, 1), samples=100, seed=42, require_v_nonzero=True)
    assert hits
    for triple in hits:
        assert not exact.all_zero(triple.v)
        assert classify_dim4(triple).tag == D4


def test_commuting_search_with_v_required_nonzero(exact):
    for triple in search_bilinear(default_system(1, 0), samples=20, seed=3, require_v_nonzero=True):
        assert check_triple(triple).in_h
        assert not exact.all_zero(triple.v)
        assert exact.all_zero(triple.u @ triple.v - triple.v @ triple.u)


def test_conflicting_v_options():
    with pytest.raises(ValidationError) as info:
        make_search(default_system(1, 1, fix_v_zero=True), require_v_nonzero=True)
    assert info.value.error_code == "conflicting_options"
