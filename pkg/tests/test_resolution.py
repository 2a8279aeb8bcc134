import pytest
from hypothesis import given, settings, strategies as st

from coarsemod.control import FilteredMorphism
from coarsemod.errors import MismatchedSpecsError, NotIdempotentError, UnsupportedTierError
from coarsemod.filtered import PresentedModule, free_module, trivial_module
from coarsemod.group_ring import GroupRingElement, GroupRingMatrix, basis_vector
from coarsemod.groups import group_from_alias
from coarsemod.resolution import (
    CAPPED,
    HYPOTHESIS_UNMET,
    certify_cover,
    complement_check,
    diagonal_idempotents,
    elementary_conjugate,
    free_cover,
    generated_idempotents,
    idempotent_image,
    image_cokernel,
    kernel_of,
    resolve,
    unit_conjugate,
)
from coarsemod.rings import ring_from_alias
from coarsemod.syzygies import annihilates, groebner_syzygies, window_syzygies


def column(group, ring, *entries):
    return GroupRingMatrix.from_triplets(group, ring, len(entries), 1, [(i, 0, e) for i, e in enumerate(entries)])


def times(text, group, ring):
    return FilteredMorphism.multiplication(GroupRingElement.parse(text, group, ring))


def test_trivial_module_over_z_has_length_one_resolution(z, qq):
    chain = resolve(trivial_module(z, qq))
    assert chain.ranks == [1, 1]
    assert chain.terminated
    assert chain.modes == ["presentation"]
    assert chain.composes_to_zero()
    assert chain.passed
    assert chain.bounds == [0, 1]


def test_koszul_ranks_over_z2(z2, qq):
    chain = resolve(trivial_module(z2, qq), certify=False)
    assert chain.ranks == [1, 2, 1]
    assert chain.terminated
    assert chain.modes == ["presentation", "groebner-complete"]
    assert chain.composes_to_zero()
    assert chain.certificates == []


def test_koszul_resolution_is_window_exact(z2, qq):
    chain = resolve(trivial_module(z2, qq))
    exactness = [c for c in chain.certificates if c.kind.value == "exactness"]
    assert len(exactness) == 3
    assert all(c.passed for c in exactness)
    assert [c.constant for c in exactness] == [1, 2, 1]


def monomial(group, exponents):
    return " ".join(f"{name}^{e}" for name, e in zip(group.names, exponents) if e)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["Z", "Z2"]), st.data())
def test_monomial_relation_modules_have_length_at_most_the_rank(alias, data):
    group, qq = group_from_alias(alias), ring_from_alias("QQ")
    n = len(group.names)
    if n == 2 and data.draw(st.booleans()):
        a, b = data.draw(st.sampled_from([-1, 1])), data.draw(st.sampled_from([-1, 1]))
        entries = [f"t1^{a} - 1", f"t2^{b} - 1"]
    else:
        exponents = data.draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n).filter(any))
        entries = [f"{monomial(group, exponents)} - 1"]
    chain = resolve(PresentedModule(group, qq, 1, column(group, qq, *entries)), certify=False)
    assert chain.terminated
    assert len(chain.ranks) - 1 <= n
    assert chain.composes_to_zero()


def test_stage_constants_at_the_radius_are_marked(z, qq):
    stages = [c for c in resolve(trivial_module(z, qq)).certificates if c.kind.value != "exactness"]
    assert [c.constant for c in stages] == [0, 0]
    assert not any(CAPPED in c.tags for c in stages)
    shallow = resolve(trivial_module(z, qq), radius=0).certificates
    capped = [c for c in shallow if c.kind.value != "exactness"]
    assert len(capped) == 2
    assert all(CAPPED in c.tags for c in capped)


def test_resolution_depth_is_capped(z2, qq):
    chain = resolve(trivial_module(z2, qq), max_depth=1, certify=False)
    assert chain.ranks == [1, 2]
    assert not chain.terminated


def test_free_module_resolves_to_itself(z, qq):
    chain = resolve(free_module(z, qq, 2))
    assert chain.ranks == [2]
    assert chain.terminated
    assert chain.to_json()["differentials"] == []


def test_complete_resolution_needs_tier_a(z, zz):
    with pytest.raises(UnsupportedTierError):
        resolve(trivial_module(z, zz), complete=True)
    with pytest.raises(ValueError):
        resolve(trivial_module(z, zz), max_depth=-1)


def test_exact_kernel_over_laurent_polynomials(z, qq):
    matrix = column(z, qq, "t - 1", "t^2 - 1")
    result = kernel_of(matrix)
    assert result.label == "groebner-complete"
    assert len(result.generators) == 1
    first, second = result.generators[0]
    assert annihilates(result.generators[0], matrix)
    assert len(second.support()) == 1
    assert first == -(second * GroupRingElement.parse("t + 1", z, qq))


def test_exact_kernel_is_zero_for_a_nonzerodivisor(z, qq):
    assert groebner_syzygies(column(z, qq, "t - 1")).is_zero


def test_exact_kernel_modulo_relations(z, qq):
    relations = GroupRingMatrix.from_triplets(z, qq, 1, 1, [(0, 0, "t - 1")])
    result = groebner_syzygies(column(z, qq, "1"), relations)
    assert len(result.generators) == 1
    (entry,) = result.generators[0]
    assert entry.augmentation() == 0
    assert len(entry.support()) == 2


def test_window_kernel_outside_tier_a(z2, zz):
    matrix = column(z2, zz, "t1 - 1", "t2 - 1")
    result = kernel_of(matrix)
    assert result.label == "window-verified(3)"
    assert result.generators
    assert all(annihilates(row, matrix) for row in result.generators)
    with pytest.raises(UnsupportedTierError):
        kernel_of(matrix, complete=True)
    with pytest.raises(UnsupportedTierError):
        groebner_syzygies(matrix)


def test_window_kernel_of_free_group_element(f2, zz):
    result = window_syzygies(column(f2, zz, "a - 1"), radius=2)
    assert result.is_zero


def test_free_cover(z, zz):
    module = free_module(z, zz)
    cover = free_cover(module)
    assert cover.is_standard and cover.rank == 1
    bound, bicontrol = certify_cover(cover, 6)
    assert bound.constant == 0
    assert bicontrol.passed
    shifted = module.with_sigma([basis_vector(z.normal_form("t"), 0, zz), basis_vector(z.identity, 0, zz)])
    assert not free_cover(shifted).is_standard
    assert free_cover(shifted).rank == 2


def test_kernel_of_needs_free_source(z, zz):
    identity = GroupRingMatrix.identity(z, zz, 1)
    phi = FilteredMorphism.between_standard(trivial_module(z, zz), free_module(z, zz), identity)
    with pytest.raises(MismatchedSpecsError):
        kernel_of(phi)


def test_image_cokernel_of_identity(z, zz):
    result = image_cokernel(times("1", z, zz), 6)
    assert result.hypothesis_met
    assert result.image_spans_target
    assert result.cokernel_is_zero
    assert all(c.passed for c in result.certificates)


def test_image_cokernel_of_t_minus_one(z, zz):
    result = image_cokernel(times("t - 1", z, zz), 8)
    assert not result.hypothesis_met
    assert result.bound.constant == 1
    assert all(HYPOTHESIS_UNMET in c.tags for c in result.certificates)
    assert not result.image_spans_target
    assert not result.cokernel_is_zero
    assert result.to_json()["hypothesis_met"] is False
    assert result.to_json()["inner_window"] == 7


def test_image_cokernel_of_shift(z, zz):
    result = image_cokernel(times("t", z, zz), 6)
    assert result.hypothesis_met
    assert result.cokernel_is_zero
    assert result.image_spans_target
    assert result.bound.constant == 1
    assert result.inner_window == 5


def test_generated_idempotents_over_integers(z, zz):
    matrices = generated_idempotents(z, zz)
    assert len(matrices) == 25
    for e in matrices:
        assert e.is_idempotent()
        report = idempotent_image(e, 3)
        assert report.passed, [c.kind for c in report.certificates if not c.passed]


def test_diagonal_idempotent_report(z2, qq):
    e = diagonal_idempotents(z2, qq)[1]
    report = idempotent_image(e, 3)
    assert report.passed
    assert report.bound.constant == 0
    assert len(report.certificates) == 5


def test_non_idempotents_are_rejected(z, zz):
    with pytest.raises(NotIdempotentError):
        idempotent_image(GroupRingMatrix.from_triplets(z, zz, 1, 1, [(0, 0, "t")]), 3)
    with pytest.raises(MismatchedSpecsError):
        idempotent_image(GroupRingMatrix(z, zz, 1, 2, {}), 3)


def test_elementary_conjugate(z, zz):
    e = diagonal_idempotents(z, zz)[2]
    conjugate = elementary_conjugate(e, 0, 1, GroupRingElement.parse("t^2", z, zz))
    assert conjugate.is_idempotent()
    assert conjugate != e
    assert complement_check(conjugate, 3).passed
    with pytest.raises(ValueError):
        elementary_conjugate(e, 1, 1, GroupRingElement.parse("t", z, zz))


def test_unit_conjugate(z, f2, zz):
    d = diagonal_idempotents(z, zz)[2]
    t = z.normal_form("t")
    base = elementary_conjugate(d, 0, 1, GroupRingElement.one(z, zz))
    moved = unit_conjugate(base, [t, z.identity])
    assert moved == elementary_conjugate(d, 0, 1, GroupRingElement.parse("t", z, zz))
    assert idempotent_image(moved, 3).passed
    assert unit_conjugate(d, [t, t]) == d
    e = elementary_conjugate(diagonal_idempotents(f2, zz)[2], 0, 1, GroupRingElement.parse("b", f2, zz))
    assert unit_conjugate(e, [f2.normal_form("a"), f2.normal_form("b")]).is_idempotent()
    with pytest.raises(MismatchedSpecsError):
        unit_conjugate(d, [t])


def test_presented_module_relation_mismatch(z, zz):
    relations = GroupRingMatrix.from_triplets(z, zz, 1, 2, [(0, 0, "t")])
    with pytest.raises(ValueError):
        PresentedModule(z, zz, 1, relations)
