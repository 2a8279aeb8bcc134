import pytest
from hypothesis import given, settings, strategies as st

from coarsemod.errors import RadiusCapExceededError, UnknownGeneratorError, UnsupportedFamilyError
from coarsemod.groups import BaumslagSolitarGroup, group_from_alias, group_from_spec
from coarsemod.types import GroupFamily, GroupSpec


def test_aliases_resolve_to_families():
    assert group_from_alias("Z").spec.family == GroupFamily.FREE_ABELIAN
    assert group_from_alias("Z3").spec.rank == 3
    assert group_from_alias("F2").spec.family == GroupFamily.FREE
    assert group_from_alias("BS(2,3)").spec.family == GroupFamily.BAUMSLAG_SOLITAR
    assert group_from_alias("T(2,2)").spec.family == GroupFamily.PRODUCT_OF_TREES


def test_unknown_alias_is_rejected():
    with pytest.raises(ValueError):
        GroupSpec.from_alias("SL(2,Z)")


def test_group_instances_are_shared():
    assert group_from_alias("Z2") is group_from_alias("Z2")


def test_unknown_generator(f2):
    with pytest.raises(UnknownGeneratorError) as exc:
        f2.normal_form("a*c")
    assert exc.value.symbol == "c"


def test_distance_examples(z2, f2):
    assert z2.distance(z2.identity, z2.normal_form("t1^2 t2^3")) == 5
    assert f2.distance(f2.identity, f2.normal_form("a*b*a^-1")) == 3
    g = f2.normal_form("a b")
    assert f2.distance(g, g) == 0


def test_free_reduction(f2):
    assert f2.normal_form("a b B A").is_identity
    assert f2.normal_form("a*b^2*b^-2").word == "a"
    assert f2.normal_form("A").word == "a^-1"


def test_free_abelian_normal_form_commutes(z2):
    assert z2.normal_form("t1 t2 t1^-1") == z2.normal_form("t2")
    assert z2.normal_form("t2^3 t1^-1").key == (-1, 3)


def test_baumslag_solitar_relation(bs):
    assert isinstance(bs, BaumslagSolitarGroup)
    assert bs.normal_form("x y^2 x^-1") == bs.normal_form("y^3")
    assert bs.normal_form("x^-1 y^3 x") == bs.normal_form("y^2")
    assert not bs.normal_form("x y x^-1").is_identity


def test_baumslag_solitar_radius_cap(bs):
    with pytest.raises(RadiusCapExceededError) as exc:
        bs.identity_ball(bs.radius_cap + 1)
    assert exc.value.cap == bs.radius_cap


def test_unsupported_family():
    spec = GroupSpec.model_construct(family="surface", rank=2)
    with pytest.raises(UnsupportedFamilyError):
        group_from_spec(spec)


@pytest.mark.parametrize("r", range(0, 7))
def test_free_group_ball_census(f2, r):
    assert len(f2.identity_ball(r)) == 2 * 3**r - 1


@pytest.mark.parametrize("n,r", [(1, r) for r in range(11)] + [(2, r) for r in range(11)])
def test_lattice_ball_matches_brute_force(n, r):
    group = group_from_alias(f"Z{n}")
    ball = {g.key for g in group.identity_ball(r)}
    if n == 1:
        brute = {(x,) for x in range(-r, r + 1)}
    else:
        brute = {(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x) + abs(y) <= r}
    assert ball == brute


def test_bfs_sphere_agrees_with_lattice_enumeration(z2):
    for r in range(5):
        assert sorted(z2.bfs_sphere(r)) == z2.sphere(r)


def test_baumslag_solitar_word_length_below_normal_form(bs):
    for g in bs.identity_ball(4):
        assert g.length <= bs.nf_length(g.key)
        assert bs.distance(bs.identity, g) == g.length


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_metric_axioms_on_free_group(data):
    group = group_from_alias("F2")
    points = group.identity_ball(3)
    g, h, k = (data.draw(st.sampled_from(points)) for _ in range(3))
    assert group.distance(g, h) <= group.distance(g, k) + group.distance(k, h)
    assert group.distance(g, h) == group.distance(h, g)
    assert group.distance(k * g, k * h) == group.distance(g, h)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3), st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_lattice_distance_is_l1(a, b):
    group = group_from_alias("Z3")
    g, h = group.from_coordinates(a), group.from_coordinates(b)
    assert group.distance(g, h) == sum(abs(x - y) for x, y in zip(a, b))
