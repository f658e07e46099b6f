from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from sympy import Integer, pi, sqrt

from catalog.loader import fixture_strata, load_fixture_pair
from core.errors import InputParseError
from core.flat_orbifold import circle_spectrum
from core.gamma_hom import builtin_gamma, parse_gamma
from core.orthogonal_action import Stratum, total_components
from core.sectors import MANIFOLD, compare_gamma_spectra, compare_lowest_strata, compare_segments, decompose, \
    gamma_spectrum, heat_trace, leading_asymptotics, lowest_stratum_dimension, zero_multiplicity
from core.sphere_spectrum import SpectrumSegment
from tests.helpers import same_value


def gamma_rank(l: int):
    return builtin_gamma("Z") if l == 1 else builtin_gamma("Z^l", l)


@pytest.fixture
def rsw29_spectra(sphere_pair, gamma_z):
    o1, o2 = sphere_pair
    return gamma_spectrum(o1, gamma_z, 6), gamma_spectrum(o2, gamma_z, 6)


# ==========================================
# 📊 Γ-spectra of the sphere pair
# ==========================================

def test_z_spectra_disagree_at_four(rsw29_spectra):
    a, b = rsw29_spectra
    verdict = compare_gamma_spectra(a, b)
    assert not verdict.equal
    assert verdict.eigenvalue == 4
    assert (verdict.multiplicity_a, verdict.multiplicity_b) == (3, 6)
    assert verdict.cutoff == 36
    assert verdict.describe() == "first disagreement at eigenvalue 4 (3 vs 6)"


def test_twisted_parts(rsw29_spectra):
    a, b = rsw29_spectra
    assert a.twisted().multiplicity(0) == b.twisted().multiplicity(0) == 6
    assert a.twisted().multiplicity(4) == 3
    assert b.twisted().multiplicity(4) == 6


def test_trivial_gamma_recovers_isospectrality(sphere_pair):
    o1, o2 = sphere_pair
    trivial = builtin_gamma("trivial")
    verdict = compare_gamma_spectra(gamma_spectrum(o1, trivial, 6), gamma_spectrum(o2, trivial, 6))
    assert verdict.equal
    assert verdict.cutoff == 60


def test_merged_spectrum_is_consistent(rsw29_spectra):
    for spectrum in rsw29_spectra:
        spectrum.verify()
        assert not spectrum.degraded
        assert zero_multiplicity(spectrum) == spectrum.component_count() == 7
        assert spectrum.nontwisted().cutoff == 60


def test_provenance_adds_up(rsw29_spectra):
    a, _ = rsw29_spectra
    sources = a.provenance(4)
    assert sum(m for _, m in sources) == a.merged.multiplicity(4)
    assert len(a.provenance(0)) == 7


def test_decompose_rejects_unknown_models(gamma_z):
    with pytest.raises(InputParseError):
        decompose(object(), gamma_z)


def test_units_must_match():
    laplace = SpectrumSegment.from_pairs([(0, 1), (1, 2)], 4, "laplace")
    mu = SpectrumSegment.from_pairs([(0, 1), (1, 2)], 4, "mu")
    with pytest.raises(InputParseError):
        compare_segments(laplace, mu)


def test_comparison_is_antisymmetric(rsw29_spectra):
    a, b = rsw29_spectra
    forward, backward = compare_gamma_spectra(a, b), compare_gamma_spectra(b, a)
    assert forward.equal == backward.equal
    assert forward.cutoff == backward.cutoff
    assert forward.eigenvalue == backward.eigenvalue == 4
    assert (backward.multiplicity_a, backward.multiplicity_b) == (forward.multiplicity_b, forward.multiplicity_a)
    assert compare_segments(b.merged, a.merged) == backward


# ==========================================
# 🔥 Heat traces
# ==========================================

def test_heat_trace_of_a_circle():
    t = mpmath.mpf("0.01")
    value = heat_trace(circle_spectrum(1, k_max=20), "0.01")
    # theta function identity: sum exp(-4 pi^2 k^2 t) = (4 pi t)^(-1/2) sum exp(-k^2 / 4t)
    assert abs(value.value - 1 / mpmath.sqrt(4 * mpmath.pi * t)) < mpmath.mpf("1e-8")
    assert value.truncated
    assert value.terms == 41


@pytest.mark.parametrize("t", ["0", "-1"])
def test_heat_trace_needs_positive_time(t):
    with pytest.raises(InputParseError):
        heat_trace(circle_spectrum(1), t)


@hsettings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=49), st.integers(min_value=1, max_value=10))
def test_heat_trace_decreases_in_time(start, step):
    spectrum = circle_spectrum(1, k_max=20)
    earlier = heat_trace(spectrum, Fraction(start, 100))
    later = heat_trace(spectrum, Fraction(start + step, 100))
    assert earlier.value > later.value
    assert later.value >= spectrum.multiplicity(0)


def test_leading_heat_coefficients(sphere_pair, gamma_z):
    sectors = decompose(sphere_pair[0], gamma_z)
    expansion = leading_asymptotics(sectors)
    assert same_value(expansion.coefficient(5), pi ** 3 / 8)
    assert same_value(expansion.coefficient(3), 3 * pi ** 2 / 2)
    assert expansion.top()[0] == 5
    twisted = leading_asymptotics(sectors, twisted_only=True)
    assert twisted.coefficient(5) == 0
    assert twisted.top()[0] == 3


def test_empty_expansion_has_no_top():
    with pytest.raises(InputParseError):
        leading_asymptotics([]).top()


# ==========================================
# 🧵 Singular-set fixtures
# ==========================================

@pytest.mark.parametrize("l", [1, 2, 3])
def test_circle_fixture_component_formulas(l):
    first, second, _ = load_fixture_pair("rsw33.json")
    gamma = gamma_rank(l)
    assert total_components(decompose(first, gamma)) == 2 * (4 ** l - 1) + 2 ** l
    assert total_components(decompose(second, gamma)) == 4 * 2 ** l - 3


@pytest.mark.parametrize("l", [1, 2, 3])
def test_cube_skeleton_component_formula(l):
    _, second, _ = load_fixture_pair("rsw35.json")
    assert total_components(decompose(second, gamma_rank(l))) == 2 ** (2 * l + 3) - 3 * 2 ** (l + 2) + 5


@pytest.mark.parametrize("gamma, expected", [("Z", 2 * sqrt(2)), ("Z^2", 6 * sqrt(2)), ("F2", 6 * sqrt(2))])
def test_circle_lengths_sum_to_the_same_value(gamma, expected):
    first, second, _ = load_fixture_pair("rsw37.json")
    presentation = parse_gamma(gamma)
    for fixture in (first, second):
        expansion = leading_asymptotics(decompose(fixture, presentation), twisted_only=True)
        assert same_value(expansion.coefficient(1), expected)


def test_fixture_spectra_are_degraded(gamma_z):
    first, _, _ = load_fixture_pair("rsw37.json")
    spectrum = gamma_spectrum(first, gamma_z)
    assert spectrum.degraded
    assert spectrum.cutoff == 0
    assert spectrum.merged.entries == ((Integer(0), 3),)
    # the twisted part is still known beyond zero
    ev, mult = spectrum.twisted().first_nonzero()
    assert same_value(ev, 2 * pi ** 2) and mult == 4


# ==========================================
# 🧱 Lowest strata
# ==========================================

def test_lowest_strata_of_fixtures():
    a, b, _ = load_fixture_pair("rsw33.json")
    verdict = compare_lowest_strata(fixture_strata(a), fixture_strata(b))
    assert (verdict.lowest_a, verdict.lowest_b) == (1, 1)
    assert not verdict.distinguishes
    a, b, _ = load_fixture_pair("rsw35.json")
    verdict = compare_lowest_strata(fixture_strata(a), fixture_strata(b))
    assert verdict.distinguishes
    assert verdict.describe() == "lowest singular strata differ: 1 vs 0"


def test_manifold_has_no_lowest_stratum():
    assert lowest_stratum_dimension([]) == MANIFOLD
    assert compare_lowest_strata([], [Stratum(2, 2)]).distinguishes
