import pytest
from hypothesis import given, settings, strategies as st
from sympy.polys.matrices import DomainMatrix

from coarsemod.control import (
    FilteredMorphism,
    GeometricModule,
    GeometricMorphism,
    bound_of,
    check_bicontrolled,
    check_equivariance,
    check_well_defined,
    classify_morphism,
    compose_geometric,
    generator_bound,
    window_injective,
    window_surjective,
)
from coarsemod.errors import MismatchedSpecsError, WindowTooSmallError
from coarsemod.filtered import StandardFiltration, equivariant_of, free_module, trivial_module
from coarsemod.group_ring import GroupRingElement, GroupRingMatrix
from coarsemod.groups import group_from_alias
from coarsemod.rings import ring_from_alias
from coarsemod.types import MorphismClass, SamplingPlan


def times(text, group, ring):
    return FilteredMorphism.multiplication(GroupRingElement.parse(text, group, ring))


@pytest.mark.parametrize("text,expected", [("t - 1", 1), ("t^5", 5), ("t^3 + t^-3", 3), ("2", 0)])
def test_measured_bounds(z, zz, text, expected):
    certificate = bound_of(times(text, z, zz), 20)
    assert certificate.passed
    assert certificate.constant == expected


@pytest.mark.parametrize("text", ["t - 1", "t^5", "t^3 + t^-3"])
def test_generator_bound_dominates_measured_bound(z, zz, text):
    phi = times(text, z, zz)
    assert generator_bound(phi) >= bound_of(phi, 12).constant


def test_generator_bound_of_lattice_element(z2, qq):
    phi = times("t1^2 t2 - 1", z2, qq)
    assert generator_bound(phi) == 3


@pytest.mark.parametrize("b", range(0, 9))
def test_t_minus_one_is_not_bicontrolled(z, zz, b):
    certificate = check_bicontrolled(times("t - 1", z, zz), b, 20)
    assert not certificate.passed
    assert certificate.counterexample.witness


def test_bicontrol_constant_must_fit_the_window(z, zz):
    with pytest.raises(WindowTooSmallError):
        check_bicontrolled(times("t", z, zz), 7, 5)


def test_t_minus_one_is_injective_but_not_surjective(z, zz):
    phi = times("t - 1", z, zz)
    assert window_injective(phi, 8)
    assert window_surjective(phi, 8) is None
    assert classify_morphism(phi, 8).verdict == MorphismClass.NEITHER


def test_identity_is_both(z2, zz):
    phi = FilteredMorphism.identity(StandardFiltration(free_module(z2, zz)))
    result = classify_morphism(phi, 4)
    assert result.verdict == MorphismClass.BOTH
    assert result.enlargement == 0
    assert result.bound.constant == 0
    assert result.to_json()["classification"] == "both"


def test_shift_is_both_with_enlargement(z, zz):
    result = classify_morphism(times("t", z, zz), 6)
    assert result.injective and result.surjective
    assert result.enlargement == 1
    assert result.bound.constant == 1
    assert result.bicontrol.passed
    assert result.verdict == MorphismClass.BOTH


def test_shape_mismatch(z, zz):
    matrix = GroupRingMatrix.identity(z, zz, 2)
    with pytest.raises(MismatchedSpecsError):
        FilteredMorphism.between_standard(free_module(z, zz), free_module(z, zz), matrix)


def test_equivariance_of_group_ring_maps(f2, zz):
    assert check_equivariance(times("a - b^-1", f2, zz)).passed


def test_perturbed_map_is_not_equivariant(z, zz):
    module = StandardFiltration(free_module(z, zz))
    identity = GroupRingMatrix.identity(z, zz, 1)
    phi = FilteredMorphism(module, module, identity, perturbation={(z.identity, 0): {(z.identity, 0): 1}})
    assert not phi.equivariant
    certificate = check_equivariance(phi)
    assert not certificate.passed
    assert certificate.counterexample.gamma is not None
    with pytest.raises(MismatchedSpecsError):
        generator_bound(phi)


def test_equivariance_accepts_structures(z2, zz):
    structure = equivariant_of(free_module(z2, zz))
    assert check_equivariance(structure).passed


def test_well_defined_maps(z, zz):
    identity = GroupRingMatrix.identity(z, zz, 1)
    onto_trivial = FilteredMorphism.between_standard(free_module(z, zz), trivial_module(z, zz), identity)
    assert check_well_defined(onto_trivial) is None
    from_trivial = FilteredMorphism.between_standard(trivial_module(z, zz), free_module(z, zz), identity)
    assert check_well_defined(from_trivial) is not None


def test_geometric_bounds_and_composition(z, zz):
    module = GeometricModule.uniform(z, zz, 1, 5)
    shift = GeometricMorphism.from_group_ring_element(GroupRingElement.parse("t", z, zz), module)
    back = GeometricMorphism.from_group_ring_element(GroupRingElement.parse("t^-1", z, zz), module)
    assert shift.measured_bound() == 1
    there_and_back = compose_geometric(back, shift)
    assert there_and_back.declared_bound == 2
    assert there_and_back.measured_bound() == 0
    assert compose_geometric(shift, shift).measured_bound() == 2


def test_geometric_identity_composes(z2, qq):
    module = GeometricModule.uniform(z2, qq, 2, 2)
    identity = GeometricMorphism.identity(module)
    assert compose_geometric(identity, identity) == identity
    assert identity.measured_bound() == 0


def test_geometric_block_beyond_declared_bound(z, zz):
    module = GeometricModule.uniform(z, zz, 1, 3)
    block = DomainMatrix([[zz.to_domain(1)]], (1, 1), zz.domain)
    with pytest.raises(ValueError):
        GeometricMorphism(module, module, {(z.identity, z.normal_form("t^2")): block}, 1)


def test_geometric_blocks_vanish_mod_n(z, z4):
    module = GeometricModule.uniform(z, z4, 1, 2)
    phi = GeometricMorphism.from_group_ring_element(GroupRingElement.parse("4 t^2 + 1", z, z4), module)
    assert phi.measured_bound() == 0


laurent = st.dictionaries(st.integers(-2, 2), st.integers(-3, 3).filter(bool), min_size=1, max_size=4)


@settings(max_examples=50, deadline=None)
@given(laurent)
def test_generator_bound_dominates_measured_bound_on_random_elements(terms):
    z, zz = group_from_alias("Z"), ring_from_alias("ZZ")
    element = GroupRingElement(z, zz, {z.from_coordinates([k]): c for k, c in terms.items()})
    phi = FilteredMorphism.multiplication(element)
    measured = bound_of(phi, 6, SamplingPlan(random_subsets=10))
    assert measured.passed
    assert generator_bound(phi) >= measured.constant


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["Z2", "F2"]), st.data())
def test_composite_bound_is_at_most_the_declared_sum(alias, data):
    group, zz = group_from_alias(alias), ring_from_alias("ZZ")
    elements = st.dictionaries(
        st.sampled_from(group.identity_ball(2)), st.integers(-2, 2).filter(bool), max_size=3
    )
    module = GeometricModule.uniform(group, zz, 1, 3)
    phi = GeometricMorphism.from_group_ring_element(GroupRingElement(group, zz, data.draw(elements)), module)
    psi = GeometricMorphism.from_group_ring_element(GroupRingElement(group, zz, data.draw(elements)), module)
    composite = compose_geometric(psi, phi)
    assert composite.measured_bound() <= psi.declared_bound + phi.declared_bound
