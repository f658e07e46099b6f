import pytest

from catalog.builtin import sign_matrix, sunada15_pair, torus5_pair
from catalog.loader import load_lattice_pair
from core.errors import InputParseError
from core.finite_group import AmbientClassInvariant, SignedPerm, generate_group
from core.gamma_hom import parse_gamma
from core.sunada import CERTIFIED, FAILED, INCONCLUSIVE, NOT_CONVERSE, SunadaTriple, certify_gamma_isospectral, \
    check_sunada, conjugate_action


# ==========================================
# 🧪 Almost conjugacy
# ==========================================

def test_k_groups_are_almost_conjugate_in_the_orthogonal_group(k1, k2):
    verdict = check_sunada(SunadaTriple(AmbientClassInvariant.orthogonal(), k1, k2))
    assert verdict
    assert verdict.conjugate is None
    assert verdict.describe() == "almost conjugate"


def test_diagonal_ambient_separates_the_k_groups(k1, k2):
    signs = generate_group([sign_matrix(6, (i,)) for i in range(1, 7)], cap=64)
    verdict = check_sunada(SunadaTriple(AmbientClassInvariant.finite(signs), k1, k2))
    assert not verdict
    assert verdict.describe() == "not almost conjugate"


def test_conjugate_subgroups_report_a_witness():
    s3 = generate_group([SignedPerm([1, 0, 2]), SignedPerm([1, 2, 0])], name="S3")
    h1 = generate_group([SignedPerm([1, 0, 2])])
    h2 = generate_group([SignedPerm([2, 1, 0])])
    verdict = check_sunada(SunadaTriple(AmbientClassInvariant.finite(s3), h1, h2))
    assert verdict.conjugate
    assert verdict.conjugator is not None
    assert verdict.describe() == "conjugate (the quotients are isometric)"


def test_triples_need_a_common_dimension(k1, d6):
    with pytest.raises(InputParseError):
        SunadaTriple(AmbientClassInvariant.orthogonal(), k1, d6)


# ==========================================
# 📜 Certificates
# ==========================================

def test_sphere_pair_certificate_fails(sphere_pair, gamma_z):
    certificate = certify_gamma_isospectral(*sphere_pair, gamma_z)
    assert certificate.status == FAILED
    assert not certificate.certified
    failing = [p for p in certificate.pairings if not p.passed]
    assert failing[0].fixed_set == "S^3"
    assert NOT_CONVERSE in certificate.reason


def test_conjugated_action_is_certified(sphere_pair, gamma_z):
    o1 = sphere_pair[0]
    swap = SignedPerm([3, 1, 2, 0, 4, 5])
    certificate = certify_gamma_isospectral(o1, conjugate_action(o1, swap, name="O1'"), gamma_z)
    assert certificate.status == CERTIFIED
    assert all(p.passed for p in certificate.pairings)
    assert len(certificate.pairings) == 7


@pytest.mark.parametrize("gamma", ["Z", "Z^2"])
def test_frame_space_pair_is_certified(gamma):
    certificate = certify_gamma_isospectral(*sunada15_pair(), parse_gamma(gamma))
    assert certificate.status == CERTIFIED
    assert certificate.describe().startswith("certified")


def test_flat_certificate_is_inconclusive(gamma_z):
    first, second, norm, _ = load_lattice_pair("tetralattice_1729.json")
    certificate = certify_gamma_isospectral(*torus5_pair(first, second, norm), gamma_z)
    assert certificate.status == INCONCLUSIVE
    assert "linear parts" in certificate.metadata["proxy"]


def test_models_must_match(sphere_pair, stiefel_pair, gamma_z):
    with pytest.raises(InputParseError):
        certify_gamma_isospectral(sphere_pair[0], stiefel_pair[1], gamma_z)
