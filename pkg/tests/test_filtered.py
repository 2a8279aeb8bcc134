import pytest
from hypothesis import given, settings, strategies as st

from coarsemod.coarse_space import MetricSubset, UniformEmbedding, ball
from coarsemod.errors import UncertifiedStructureError, WindowTooSmallError
from coarsemod.filtered import (
    EquivariantStructure,
    StandardFiltration,
    action_from_equivariant,
    certify_structure,
    check_antithetic_insular,
    check_antithetic_pair,
    check_approximation,
    check_insular,
    check_lean,
    check_local_finiteness,
    cokernel_filtration,
    compare_generating_sets,
    equivariant_of,
    free_module,
    image_filtration,
    minimal_constant,
    product_filtration,
    pushforward,
    transport_certificate,
    trivial_module,
)
from coarsemod.group_ring import GroupRingElement, GroupRingMatrix, basis_vector, translate_vector
from coarsemod.groups import group_from_alias
from coarsemod.rings import ring_from_alias
from coarsemod.types import CertificateKind, WitnessTable


def doubling(z):
    two = WitnessTable.linear(2)
    return UniformEmbedding.from_images(z, z, {"t": "t^2"}, two, two)


@pytest.mark.parametrize("alias", ["z", "z2", "f2"])
def test_free_and_trivial_modules_are_zero_lean(request, zz, alias):
    group = request.getfixturevalue(alias)
    window = 3 if alias == "f2" else 6
    for module in (free_module(group, zz), trivial_module(group, zz)):
        certificate = check_lean(StandardFiltration(module), 0, window)
        assert certificate.passed, certificate.counterexample


@pytest.mark.parametrize("d", range(0, 9))
def test_trivial_module_is_not_insular(z, zz, d):
    certificate = check_insular(StandardFiltration(trivial_module(z, zz)), d, 20)
    assert not certificate.passed
    first, second = certificate.counterexample.subsets
    assert len(first) == 1 and len(second) == 1
    assert certificate.counterexample.witness


def test_free_module_is_zero_insular(z, zz):
    assert check_insular(StandardFiltration(free_module(z, zz)), 0, 10).passed


def test_free_module_over_f2_is_zero_insular(f2, qq):
    assert check_insular(StandardFiltration(free_module(f2, qq)), 0, 4).passed


@pytest.mark.parametrize("c", [0, 1, 2])
def test_pushforward_along_doubling(z, zz, c):
    filtered = pushforward(StandardFiltration(free_module(z, zz)), doubling(z))
    assert check_lean(filtered, 2 * c, 8).passed
    assert check_insular(filtered, 2 * c, 8).passed


def test_pushforward_generators_come_from_preimage(z, zz):
    filtered = pushforward(StandardFiltration(free_module(z, zz)), doubling(z))
    odd = filtered.evaluate(MetricSubset.from_words(z, ["t^3"]), 8)
    assert odd.is_zero()
    even = filtered.evaluate(MetricSubset.from_words(z, ["t^4"]), 8)
    assert basis_vector(z.normal_form("t^2"), 0, zz) in even


def test_transported_constants(z, zz):
    j = doubling(z)
    lean = check_lean(StandardFiltration(free_module(z, zz)), 1, 6)
    moved = transport_certificate(lean, j)
    assert moved.constant == 2
    assert "transported" in moved.tags
    assert moved.details["source_constant"] == 1
    assert moved.window == 13 and type(moved.window) is int
    insular = transport_certificate(check_insular(StandardFiltration(free_module(z, zz)), 1, 6), j)
    assert insular.kind == CertificateKind.INSULAR
    assert insular.constant == 2


def test_evaluation_outside_window(z, zz):
    filtered = StandardFiltration(free_module(z, zz))
    with pytest.raises(WindowTooSmallError) as exc:
        filtered.evaluate(MetricSubset.from_words(z, ["t^5"]), 3)
    assert exc.value.required == 5


@pytest.mark.parametrize("check", [check_lean, check_insular, check_antithetic_insular])
def test_constant_beyond_window_is_refused(z, zz, check):
    filtered = StandardFiltration(trivial_module(z, zz))
    with pytest.raises(WindowTooSmallError) as exc:
        check(filtered, 9, 4)
    assert exc.value.required == 9
    assert check(filtered, 4, 4).constant == 4


def test_local_finiteness(z, zz):
    certificate = check_local_finiteness(StandardFiltration(trivial_module(z, zz)), ball(z.identity, 2))
    assert certificate.passed
    assert certificate.details["ranks"] == [1, 1, 1]


def test_minimal_constant_returns_last_failure(z, zz):
    filtered = StandardFiltration(trivial_module(z, zz))
    certificate = minimal_constant(lambda d: check_insular(filtered, d, 12), 3)
    assert not certificate.passed
    assert certificate.constant == 3


def test_minimal_constant_stops_at_first_pass(z, zz):
    filtered = StandardFiltration(free_module(z, zz))
    assert minimal_constant(lambda d: check_lean(filtered, d, 6), 4).constant == 0


def test_antithetic_pairs(z):
    near = MetricSubset.from_words(z, ["e", "t"])
    far = MetricSubset.from_words(z, ["t^10"])
    assert check_antithetic_pair(near, far, 1, 20).passed
    assert check_antithetic_pair(near, far, 1, 20).d_prime == 0
    touching = MetricSubset.from_words(z, ["t^2"])
    assert not check_antithetic_pair(MetricSubset.from_words(z, ["e"]), touching, 1, 20).passed
    overlap = MetricSubset.from_words(z, ["t", "t^2"])
    result = check_antithetic_pair(near, overlap, 1, 20)
    assert result.passed and result.d_prime == 1


def test_compare_generating_sets(z, zz):
    module = free_module(z, zz)
    shifted = [basis_vector(z.normal_form("t"), 0, zz)]
    forward, backward = compare_generating_sets(module, module.sigma, shifted, 8)
    assert forward.passed and forward.constant == 1
    assert backward.passed and backward.constant == 1


def test_approximation(z, zz):
    module = free_module(z, zz)
    filtered = StandardFiltration(module)
    sigma = [basis_vector(z.normal_form("t^-1"), 0, zz)]
    assert check_approximation(module, sigma, filtered, 1, 6).passed
    unmet = check_approximation(module, sigma, filtered, 0, 6)
    assert "hypothesis unmet" in unmet.tags


def test_product_filtration_is_lean(z2, zz):
    filtered = product_filtration(free_module(z2, zz), trivial_module(z2, zz))
    assert filtered.module.rank == 2
    assert check_lean(filtered, 0, 5).passed


def test_cokernel_of_t_minus_one_is_trivial(z, zz):
    matrix = GroupRingMatrix.from_triplets(z, zz, 1, 1, [(0, 0, "t - 1")])
    filtered = cokernel_filtration(matrix, free_module(z, zz))
    assert filtered.evaluate(ball(z.identity, 2), 6).quotient_rank() == 1
    assert not check_insular(filtered, 0, 10).passed


def test_image_filtration(z, zz):
    matrix = GroupRingMatrix.from_triplets(z, zz, 1, 1, [(0, 0, "t - 1")])
    filtered = image_filtration(StandardFiltration(free_module(z, zz)), matrix)
    image = filtered.evaluate(MetricSubset.from_words(z, ["e"]), 4)
    assert {(z.normal_form("t"), 0): 1, (z.identity, 0): -1} in image
    assert check_lean(filtered, 0, 6).passed


def test_image_filtration_shape_mismatch(z, zz):
    matrix = GroupRingMatrix.from_triplets(z, zz, 2, 1, [(0, 0, "t")])
    with pytest.raises(ValueError):
        image_filtration(StandardFiltration(free_module(z, zz)), matrix)


def test_equivariant_structure_recovers_action(z2, zz):
    module = free_module(z2, zz)
    structure = equivariant_of(module)
    assert structure.certificate.passed
    acting = action_from_equivariant(structure)
    a = GroupRingElement.parse("2 t1 - t2^-1", z2, zz)
    x = basis_vector(z2.normal_form("t1"), 0, zz)
    assert acting.act(a, x) == module.act(a, x)


def test_uncertified_structure_is_rejected(z, zz):
    structure = EquivariantStructure(StandardFiltration(free_module(z, zz)), lambda gamma: lambda v: v)
    with pytest.raises(UncertifiedStructureError):
        action_from_equivariant(structure)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_evaluation_is_monotone_on_nested_subsets(data):
    z2, zz = group_from_alias("Z2"), ring_from_alias("ZZ")
    larger = data.draw(st.lists(st.sampled_from(z2.identity_ball(2)), min_size=1, max_size=6, unique=True))
    smaller = data.draw(st.lists(st.sampled_from(larger), max_size=len(larger), unique=True))
    shift = GroupRingMatrix.from_triplets(z2, zz, 1, 1, [(0, 0, "t1 - 1")])
    for filtered in (
        StandardFiltration(trivial_module(z2, zz)),
        image_filtration(StandardFiltration(free_module(z2, zz)), shift),
    ):
        small = filtered.evaluate(MetricSubset.of(z2, smaller), 2)
        big = filtered.evaluate(MetricSubset.of(z2, larger), 2)
        assert small.is_subset_of(big)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["Z2", "F2"]), st.integers(0, 10_000))
def test_cocycle_law_on_random_pairs(alias, seed):
    group, zz = group_from_alias(alias), ring_from_alias("ZZ")
    for module in (free_module(group, zz), trivial_module(group, zz)):
        certificate = equivariant_of(module, window=2, samples=50, seed=seed).certificate
        assert certificate.passed, certificate.counterexample
        assert certificate.details["pairs"] == 50


def test_cocycle_law_rejects_the_wrong_side_action(f2, zz):
    carrier = StandardFiltration(free_module(f2, zz))
    structure = EquivariantStructure(carrier, lambda gamma: lambda vector: translate_vector(gamma, vector))
    certificate = certify_structure(structure, window=4, samples=50, seed=0)
    assert not certificate.passed
    assert "cocycle" in certificate.counterexample.note
