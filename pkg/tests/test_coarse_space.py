import pytest

from coarsemod.coarse_space import (
    Cover,
    MetricSubset,
    UniformEmbedding,
    ball,
    build_cover,
    diameter,
    enlarge,
    sample_pairs,
    transported_radius,
    verify_cover,
    verify_uniform_embedding,
)
from coarsemod.errors import MismatchedSpecsError, NonDivergentWitnessError, UnsupportedFamilyError
from coarsemod.groups import group_from_alias
from coarsemod.types import CoverSpec, GroupSpec, Verdict, WitnessTable


def doubling(z):
    two = WitnessTable.linear(2)
    return UniformEmbedding.from_images(z, z, {"t": "t^2"}, two, two)


def test_ball_sizes(z, f2):
    assert len(ball(f2.identity, 1)) == 5
    assert len(ball(f2.identity, 2)) == 17
    assert len(ball(z.identity, 7)) == 15


def test_ball_contains_center(f2):
    center = f2.normal_form("a b")
    points = ball(center, 2)
    assert center in points
    assert all(f2.distance(center, x) <= 2 for x in points)


def test_enlarge(z, z2):
    zero = MetricSubset.of(z, [z.identity])
    assert enlarge(zero, 2).words() == ball(z.identity, 2).words()
    assert enlarge(zero, 0) == zero
    pair = MetricSubset.from_words(z2, ["e", "t1^3"])
    assert len(enlarge(pair, 1)) == 10


def test_enlarge_is_monotone(f2):
    subset = MetricSubset.from_words(f2, ["a", "b^-1"])
    assert enlarge(subset, 1).issubset(enlarge(subset, 2))
    assert subset.issubset(enlarge(subset, 1))


def test_diameter(z2, f2):
    assert diameter(ball(z2.identity, 3)) == 6
    assert diameter(ball(f2.identity, 2)) == 4
    assert diameter([z2.identity]) == 0


@pytest.mark.parametrize(
    "alias,families,radius",
    [("Z", 2, 200), ("Z2", 3, 40), ("Z3", 4, 12)],
)
@pytest.mark.parametrize("separation", [2, 5, 10])
def test_lattice_covers_pass(alias, families, radius, separation):
    group = group_from_alias(alias)
    cover = build_cover(group.spec, separation)
    assert cover.family_count == families
    certificate = verify_cover(cover, separation, ball(group.identity, radius))
    assert certificate.passed, certificate.counterexample


@pytest.mark.parametrize("alias,separation,bound", [("Z", 2, 1), ("Z", 5, 5), ("Z2", 4, 14), ("Z2", 1, 6)])
def test_lattice_cover_bounds_are_tight(alias, separation, bound):
    group = group_from_alias(alias)
    cover = build_cover(group.spec, separation)
    assert cover.bound == bound
    window = ball(group.identity, 30 if alias == "Z" else 16)
    certificate = verify_cover(cover, separation, window)
    assert certificate.passed, certificate.counterexample
    assert diameter(window) > bound


def test_free_group_cover_passes(f2):
    cover = build_cover(f2.spec, 2)
    assert cover.family_count == 2
    assert verify_cover(cover, 2, ball(f2.identity, 7)).passed


def test_no_cover_for_baumslag_solitar():
    with pytest.raises(UnsupportedFamilyError):
        build_cover(GroupSpec.from_alias("BS(2,3)"), 2)


def test_restricted_cover_round_trips(z):
    cover = build_cover(z.spec, 2)
    window = ball(z.identity, 20)
    explicit = Cover.from_spec(z, cover.restrict(window).to_spec())
    assert verify_cover(explicit, 2, window).passed


def test_explicit_cover_reports_uncovered_point(z):
    spec = CoverSpec(families=[[["e", "t"]], [["t^3"]]], bound=1, separation=1)
    certificate = verify_cover(Cover.from_spec(z, spec), 1, ball(z.identity, 2))
    assert certificate.verdict == Verdict.FAIL
    assert certificate.counterexample.point is not None


def test_explicit_cover_reports_close_members(z):
    spec = CoverSpec(families=[[["e"], ["t"]]], bound=0, separation=2)
    certificate = verify_cover(Cover.from_spec(z, spec), 2, MetricSubset.from_words(z, ["e", "t"]))
    assert not certificate.passed
    assert certificate.counterexample.pair == ["e", "t"]


def test_doubling_embedding(z):
    j = doubling(z)
    assert j(z.normal_form("t^3")).word == "t^6"
    certificate = verify_uniform_embedding(j, sample_pairs(z, 10, 50, seed=0))
    assert certificate.passed


def test_embedding_with_wrong_witness_fails(z):
    j = UniformEmbedding.from_images(z, z, {"t": "t^2"}, WitnessTable.linear(3), WitnessTable.linear(3))
    certificate = verify_uniform_embedding(j, sample_pairs(z, 5, 10))
    assert not certificate.passed
    assert certificate.counterexample.side == "lower"


def test_embedding_must_respect_relations(z2, f2):
    one = WitnessTable.linear(1)
    with pytest.raises(MismatchedSpecsError):
        UniformEmbedding.from_images(z2, f2, {"t1": "a", "t2": "b"}, one, one)


def test_flat_witness_is_rejected():
    with pytest.raises(ValueError):
        WitnessTable(points=[[0, 0], [1, 1], [2, 1]])


def test_non_divergent_witness_error(z):
    flat = WitnessTable.model_construct(points=[[0, 1], [1, 1]])
    with pytest.raises(NonDivergentWitnessError):
        UniformEmbedding(z, z, (z.generator(0),), flat, flat)


def test_preimage_and_transported_radius(z):
    j = doubling(z)
    evens = MetricSubset.from_words(z, ["t^2", "t^3", "t^-4"])
    assert j.preimage(evens, 10).words() == ["t", "t^-2"]
    assert transported_radius(j, 3) == 7
    assert type(transported_radius(j, 6)) is int


def test_sample_pairs_are_deterministic(f2):
    assert sample_pairs(f2, 3, 20, seed=7) == sample_pairs(f2, 3, 20, seed=7)
