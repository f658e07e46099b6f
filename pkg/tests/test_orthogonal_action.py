import pytest
from hypothesis import HealthCheck, given, settings as hsettings, strategies as st
from sympy import pi

from catalog.builtin import ssw_actions, trivial_action
from core.errors import InputParseError
from core.finite_group import SignedPerm, generate_group
from core.gamma_hom import Homomorphism, builtin_gamma, parse_gamma
from core.orthogonal_action import SphereAction, StiefelAction, centralizer_indices, fixed_space, \
    group_isometric_sectors, is_manifold, restrict, sector_list, sphere_fixed_set, sphere_strata, sphere_volume, \
    stiefel_fixed_set, total_components
from tests.helpers import element_index, same_value, sector_for


# ==========================================
# 📐 Fixed subspaces
# ==========================================

def test_signed_fixed_space_follows_orbits():
    # swaps coordinates 1 and 2 with a sign: fixed vectors are multiples of e1 - e2, plus e3
    g = SignedPerm([1, 0, 2], [-1, -1, 1])
    space = fixed_space([g])
    assert space.dim == 2
    assert space.signed
    assert (1, -1, 0) in space.basis and (0, 0, 1) in space.basis


def test_fixed_space_of_no_elements_needs_dimension():
    assert fixed_space([], 3).dim == 3
    with pytest.raises(InputParseError):
        fixed_space([])


def test_restriction_to_fixed_subspace():
    g = SignedPerm.diagonal([1, 1, -1, -1])
    space = fixed_space([g])
    h = SignedPerm([1, 0, 2, 3], [1, 1, 1, 1])
    assert restrict(h, space) == SignedPerm([1, 0])


# ==========================================
# 🌐 Sphere sectors
# ==========================================

def test_rsw_sphere_sectors(sphere_pair, gamma_z):
    for action in sphere_pair:
        sectors = sector_list(action, gamma_z)
        assert sectors[0].is_nontwisted
        shapes = sorted(s.fixed_set.describe() for s in sectors[1:])
        assert shapes == ["S^1"] * 3 + ["S^3"] * 3
        assert total_components(sectors) == 7


def test_minus_identity_has_no_sector(sphere_pair, gamma_z):
    o1 = sphere_pair[0]
    minus = element_index(o1.group, (1, 2, 3, 4, 5, 6))
    assert all(s.hom_class.representative.images != (minus,) for s in sector_list(o1, gamma_z))


def test_sector_centralizer_and_kernel(sphere_pair, gamma_z):
    o1 = sphere_pair[0]
    sectors = sector_list(o1, gamma_z)
    a12 = sector_for(sectors, [element_index(o1.group, (1, 2))])
    assert a12.centralizer.order == 8
    # a12 and the identity act trivially on the fixed coordinates 3..6
    assert a12.effective_kernel.order == 2
    assert a12.restricted.order == 4
    assert same_value(a12.heat_coefficient, pi ** 2 / 2)


def test_sphere_volume():
    assert same_value(sphere_volume(2), 2 * pi)
    assert same_value(sphere_volume(4), 2 * pi ** 2)
    assert sphere_volume(1) == 2


def test_manifold_detection(sphere_pair):
    antipodal = generate_group([SignedPerm.diagonal([-1, -1, -1])], name="Z2")
    assert is_manifold(SphereAction(antipodal))
    assert not is_manifold(sphere_pair[0])


def test_ssw_component_counts(gamma_z):
    elementary, heisenberg = ssw_actions(3, 1)
    e_sectors = sector_list(elementary, gamma_z)
    h_sectors = sector_list(heisenberg, gamma_z)
    assert total_components(e_sectors) == 27
    assert total_components(h_sectors) == 11
    assert {s.dimension for s in e_sectors[1:]} == {8}
    assert {s.dimension for s in h_sectors[1:]} == {8}


def test_trivial_action_counts_hom_classes(d6, z3):
    z2 = parse_gamma("Z^2")
    assert total_components(sector_list(trivial_action(d6), z2)) == 8
    assert total_components(sector_list(trivial_action(z3), z2)) == 9
    assert total_components(sector_list(trivial_action(z3), parse_gamma("F2"))) == 9


def test_one_dimensional_fixed_space_counts_points():
    # a reflection group on R^2: each reflection fixes a line, which the other reflection flips
    group = generate_group([SignedPerm.diagonal([1, -1]), SignedPerm.diagonal([-1, 1])], name="V4")
    sectors = sector_list(SphereAction(group), builtin_gamma("Z"))
    points = [s for s in sectors if s.fixed_set.manifold_dimension == 0]
    assert len(points) == 2
    assert all(s.m == 1 for s in points)


def test_sphere_fixed_sets_of_single_elements(sphere_pair):
    o1 = sphere_pair[0]
    group = o1.group

    def fixed(negated):
        return sphere_fixed_set(o1, Homomorphism((element_index(group, negated),), group))

    assert fixed((1, 2)).describe() == "S^3"
    assert fixed((1, 4, 5, 6)).subspace_dim == 2
    assert fixed((1, 2, 3, 4, 5, 6)).is_empty


@pytest.mark.parametrize("extra, components", [([], 2), ([SignedPerm.diagonal([1, 1, -1])], 1)])
def test_fixed_point_pairs_merge_under_a_flip(extra, components):
    group = generate_group([SignedPerm.diagonal([-1, -1, 1]), *extra])
    hom = Homomorphism((group.locate(SignedPerm.diagonal([-1, -1, 1])),), group)
    fixed = sphere_fixed_set(SphereAction(group), hom)
    assert fixed.manifold_dimension == 0
    assert fixed.component_count == components


@hsettings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.data())
def test_fixed_sets_do_not_depend_on_the_representative(sphere_pair, stiefel_pair, gamma_z2, data):
    for action, fixed_set in ((sphere_pair[0], sphere_fixed_set), (sphere_pair[1], sphere_fixed_set),
                              (stiefel_pair[0], stiefel_fixed_set)):
        group = action.group
        sector = data.draw(st.sampled_from(sector_list(action, gamma_z2)))
        g = data.draw(st.integers(min_value=0, max_value=group.order - 1))
        images = tuple(group.conj(g, x) for x in sector.hom_class.representative.images)
        moved = fixed_set(action, Homomorphism(images, group))
        assert moved.describe() == sector.fixed_set.describe()
        assert moved.invariant() == sector.fixed_set.invariant()
        assert len(centralizer_indices(group, images)) == sector.centralizer.order


# ==========================================
# 🧭 Frame-space sectors
# ==========================================

@pytest.mark.parametrize("rank, first, second", [(1, 4, 4), (2, 16, 10), (3, 64, 22)])
def test_rsw_stiefel_component_totals(stiefel_pair, rank, first, second):
    gamma = builtin_gamma("Z") if rank == 1 else parse_gamma(f"Z^{rank}")
    o1, o2 = stiefel_pair
    assert total_components(sector_list(o1, gamma)) == first
    assert total_components(sector_list(o2, gamma)) == second


@pytest.mark.slow
def test_rsw_stiefel_component_totals_rank_four(stiefel_pair):
    o1, o2 = stiefel_pair
    gamma = parse_gamma("Z^4")
    assert total_components(sector_list(o1, gamma)) == 256
    assert total_components(sector_list(o2, gamma)) == 46


def test_square_frame_sector_is_flagged(stiefel_pair, gamma_z2):
    o1 = stiefel_pair[0]
    sectors = sector_list(o1, gamma_z2)
    a12, a13 = element_index(o1.group, (1, 2)), element_index(o1.group, (1, 3))
    sector = sector_for(sectors, [a12, a13])
    assert sector.fixed_set.describe() == "V(3,3)"
    assert sector.fixed_set.flagged
    # a1456 has determinant -1 on coordinates 4, 5, 6 and swaps the two components
    assert sector.m == 1


def test_stiefel_fixed_sets(k1, k2):
    o1 = StiefelAction(k1, 3)
    a12 = Homomorphism((element_index(k1, (1, 2)),), k1)
    fixed = stiefel_fixed_set(o1, a12)
    assert fixed.describe() == "V(4,3)"
    assert fixed.manifold_dimension == 6
    assert fixed.component_count == 1
    assert not fixed.flagged
    assert stiefel_fixed_set(o1, Homomorphism((element_index(k1, (1, 4, 5, 6)),), k1)).is_empty

    # square frames: a13 flips coordinate 3 and merges the orientation classes in K1, nothing does in K2
    square_1 = stiefel_fixed_set(StiefelAction(k1, 4), a12)
    square_2 = stiefel_fixed_set(StiefelAction(k2, 4), Homomorphism((element_index(k2, (1, 2)),), k2))
    assert square_1.flagged and square_2.flagged
    assert (square_1.component_count, square_2.component_count) == (1, 2)


def test_stiefel_needs_diagonal_signs(d6):
    with pytest.raises(InputParseError):
        StiefelAction(d6, 2)


def test_stiefel_frame_size_is_checked(k1):
    with pytest.raises(InputParseError):
        StiefelAction(k1, 7)


# ==========================================
# 🪞 Isometric copies and strata
# ==========================================

def test_isometric_sector_groups(sphere_pair, gamma_z):
    o2 = sphere_pair[1]
    sectors = sector_list(o2, gamma_z)
    groups = group_isometric_sectors(o2, sectors)
    assert sorted(len(g) for g in groups) == [1, 3, 3]
    assert sorted(p for g in groups for p in g) == list(range(len(sectors)))


def test_reflection_strata():
    group = generate_group([SignedPerm.diagonal([1, 1, -1])], name="Z2")
    strata = sphere_strata(SphereAction(group))
    assert [(s.dimension, s.isotropy_order) for s in strata] == [(1, 2)]


def test_free_action_has_no_strata():
    antipodal = generate_group([SignedPerm.diagonal([-1, -1, -1])], name="Z2")
    assert sphere_strata(SphereAction(antipodal)) == []


def test_representation_must_be_a_homomorphism(d6):
    with pytest.raises(InputParseError):
        SphereAction(d6, [SignedPerm.diagonal([-1, 1, 1])] * d6.order)
