import pytest
from hypothesis import given, settings as hsettings, strategies as st
from sympy import Integer, oo

from core.errors import InputParseError, InternalConsistencyError, UnsupportedSector
from core.finite_group import FiniteMatrixGroup, SignedPerm, generate_group
from core.gamma_hom import builtin_gamma
from core.orthogonal_action import SphereAction, sector_list
from core.sphere_spectrum import SpectrumSegment, harmonic_invariant_dim, harmonic_table, lens_isotropy_profile, \
    lens_lattice_counts, lens_rotation_group, lens_space_spectrum, quotient_sphere_spectrum, sector_spectrum, \
    zero_only
from tests.helpers import element_index, sector_for


# ==========================================
# 📊 Segments
# ==========================================

def test_from_pairs_merges_and_sorts():
    seg = SpectrumSegment.from_pairs([(4, 1), (0, 1), (4, 2), (9, 0)], 10, "laplace")
    assert seg.entries == ((Integer(0), 1), (Integer(4), 3))
    assert seg.multiplicity(4) == 3
    assert seg.multiplicity(5) == 0
    assert seg.total_multiplicity() == 4


def test_multiplicity_beyond_cutoff_is_refused():
    seg = SpectrumSegment.from_pairs([(0, 1)], 10, "laplace")
    with pytest.raises(InputParseError):
        seg.multiplicity(11)


def test_truncate_cannot_extend():
    seg = SpectrumSegment.from_pairs([(0, 1), (3, 4), (8, 9)], 8, "laplace")
    assert seg.truncate(5).entries == ((Integer(0), 1), (Integer(3), 4))
    with pytest.raises(InputParseError):
        seg.truncate(9)


def test_segment_invariants():
    with pytest.raises(InternalConsistencyError):
        SpectrumSegment(((Integer(4), 1), (Integer(3), 1)), Integer(10), "laplace")
    with pytest.raises(InternalConsistencyError):
        SpectrumSegment(((Integer(12), 1),), Integer(10), "laplace")
    with pytest.raises(InputParseError):
        SpectrumSegment.from_pairs([(1, 1)], 10)


def test_zero_only_is_complete():
    seg = zero_only(2)
    assert seg.is_complete and seg.cutoff == oo
    assert seg.multiplicity(1000) == 0
    assert seg.first_nonzero() is None


# ==========================================
# 🎼 Molien counts
# ==========================================

def test_harmonics_of_the_round_two_sphere():
    trivial = FiniteMatrixGroup([SignedPerm.identity(3)])
    assert harmonic_table(trivial, 4).dims == (1, 3, 5, 7, 9)


def test_antipodal_quotient_keeps_even_degrees():
    antipodal = generate_group([SignedPerm.diagonal([-1, -1, -1])])
    assert harmonic_table(antipodal, 4).dims == (1, 0, 5, 0, 9)
    assert harmonic_invariant_dim(antipodal, 2) == 5


def test_quotient_spectrum_eigenvalues():
    antipodal = generate_group([SignedPerm.diagonal([-1, -1, -1])])
    seg = quotient_sphere_spectrum(antipodal, 4)
    assert [(int(e), m) for e, m in seg.entries] == [(0, 1), (6, 5), (20, 9)]
    assert seg.cutoff == 20


@st.composite
def signed_permutations(draw, n=3):
    images = draw(st.permutations(list(range(n))))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))
    return SignedPerm(images, signs)


@hsettings(max_examples=200, deadline=None)
@given(st.lists(signed_permutations(), min_size=1, max_size=3))
def test_molien_average_is_integral(generators):
    group = generate_group(generators)
    table = harmonic_table(group, 6)
    assert table.dims[0] == 1
    assert all(d >= 0 for d in table.dims)
    # the full symmetry group of the cube still has invariant harmonics in degrees 4 and 6
    assert table.dims[4] >= 1 and table.dims[6] >= 1


def test_rsw_pair_is_isospectral(sphere_pair):
    o1, o2 = sphere_pair
    assert quotient_sphere_spectrum(o1, 8) == quotient_sphere_spectrum(o2, 8)


# ==========================================
# 🔄 Lens spaces
# ==========================================

@pytest.mark.parametrize("q, weights", [(5, [1, 2]), (7, [1, 3]), (8, [1, 3]), (4, [1, 1]), (3, [1, 1, 1])])
def test_lens_count_matches_molien(q, weights):
    assert lens_space_spectrum(q, weights, 8) == quotient_sphere_spectrum(lens_rotation_group(q, weights), 8)


@hsettings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=12),
       st.lists(st.integers(min_value=1, max_value=11), min_size=1, max_size=2))
def test_lens_count_agrees_with_molien_for_random_weights(q, weights):
    assert lens_space_spectrum(q, weights, 12) == quotient_sphere_spectrum(lens_rotation_group(q, weights), 12)


def test_lens_counts_of_the_trivial_group():
    # q = 1: all monomials of degree k in 4 real variables
    assert lens_lattice_counts(1, [1, 1], 3) == [1, 4, 10, 20]


def test_lens_isotropy_profile():
    assert lens_isotropy_profile(5, [1, 2]) == {}
    assert lens_isotropy_profile(4, [1, 2]) == {(2, 2): 1}


def test_lens_inputs_are_checked():
    with pytest.raises(InputParseError):
        lens_space_spectrum(0, [1])
    with pytest.raises(InputParseError):
        lens_space_spectrum(5, [])


# ==========================================
# 🎯 Sector spectra
# ==========================================

def test_three_sphere_sector_gap(sphere_pair, gamma_z):
    o1 = sphere_pair[0]
    sectors = sector_list(o1, gamma_z)
    seg = sector_spectrum(sector_for(sectors, [element_index(o1.group, (1, 2))]), 6)
    assert seg.between(0, 8) == []
    assert seg.first_nonzero()[0] == 8


def test_circle_sector_gap(sphere_pair, gamma_z):
    o1 = sphere_pair[0]
    sectors = sector_list(o1, gamma_z)
    seg = sector_spectrum(sector_for(sectors, [element_index(o1.group, (1, 4, 5, 6))]), 6)
    assert seg.between(0, 4) == []
    assert seg.between(4, 9) == []
    assert seg.multiplicity(4) == 1


def test_point_sectors_are_zero_only():
    group = generate_group([SignedPerm.diagonal([1, -1]), SignedPerm.diagonal([-1, 1])])
    sectors = sector_list(SphereAction(group), builtin_gamma("Z"))
    point = next(s for s in sectors if s.fixed_set.manifold_dimension == 0)
    assert sector_spectrum(point).entries == ((Integer(0), 1),)


def test_non_sphere_sector_is_unsupported(stiefel_pair, gamma_z):
    sectors = sector_list(stiefel_pair[0], gamma_z)
    with pytest.raises(UnsupportedSector):
        sector_spectrum(sectors[0])
