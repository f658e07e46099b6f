import pytest

from catalog.builtin import named_group, sign_matrix
from core.errors import GroupTooLarge, InputParseError
from core.exactnum import ExactMatrix
from core.finite_group import AmbientClassInvariant, MatrixElement, SignedPerm, centralizer, conjugacy_classes, \
    cyclic_group, direct_product, element_from_matrix, find_conjugator, generate_group, is_almost_conjugate, \
    klein_four_group


def symmetric_group_3():
    return generate_group([SignedPerm([1, 0, 2]), SignedPerm([1, 2, 0])], name="S3")


def all_sign_changes(n=6):
    return generate_group([sign_matrix(n, (i,)) for i in range(1, n + 1)], cap=2 ** n, name="signs")


# ==========================================
# 🔀 Elements
# ==========================================

def test_signed_perm_compose_matches_matrix_product():
    a = SignedPerm([1, 2, 0], [1, -1, 1])
    b = SignedPerm([0, 2, 1], [-1, 1, 1])
    assert a.compose(b).to_matrix() == a.to_matrix() @ b.to_matrix()
    assert a.compose(a.inverse()).is_identity()


def test_signed_perm_validation():
    with pytest.raises(InputParseError):
        SignedPerm([0, 0, 1])
    with pytest.raises(InputParseError):
        SignedPerm([0, 1], [1, 2])


def test_signed_perm_det_one_minus_t_from_cycles():
    assert SignedPerm.diagonal([-1, 1]).det_one_minus_t() == (1, 0, -1)
    # a 3-cycle contributes 1 - t^3
    assert SignedPerm.from_cycles(3, [(1, 2, 3)]).det_one_minus_t() == (1, 0, 0, -1)
    g = SignedPerm([1, 2, 0], [1, -1, 1])
    assert g.det_one_minus_t() == g.to_matrix().det_one_minus_t()


def test_element_from_matrix_prefers_signed_permutations():
    assert isinstance(element_from_matrix([[0, -1], [1, 0]]), SignedPerm)
    assert isinstance(element_from_matrix([["3/5", "-4/5"], ["4/5", "3/5"]]), MatrixElement)
    with pytest.raises(InputParseError):
        element_from_matrix([[1, 1], [0, 1]])


def test_mixed_generator_forms_close_to_one_group():
    swap = SignedPerm([1, 0])
    flip = MatrixElement(ExactMatrix([[1, 0], [0, -1]]))
    assert flip == SignedPerm.diagonal([1, -1])
    assert hash(flip) == hash(SignedPerm.diagonal([1, -1]))
    # all eight signed permutations of two points, each once
    group = generate_group([swap, flip], name="B2")
    assert group.order == 8
    assert group.elements[group.locate(SignedPerm.diagonal([-1, -1]))] == MatrixElement(ExactMatrix([[-1, 0], [0, -1]]))


# ==========================================
# 👥 Groups
# ==========================================

def test_k_groups_have_order_eight(k1, k2):
    assert k1.order == 8 and k2.order == 8
    assert k1.is_abelian() and k2.is_abelian()


def test_group_closure_respects_the_cap():
    with pytest.raises(GroupTooLarge) as info:
        generate_group([SignedPerm([1, 2, 0])], cap=2)
    assert info.value.explored == 3


def test_mixed_dimensions_are_rejected():
    with pytest.raises(InputParseError):
        generate_group([SignedPerm([1, 0]), SignedPerm([1, 2, 0])])


def test_dihedral_classes(d6):
    classes = conjugacy_classes(d6)
    assert sorted(len(c) for c in classes) == [1, 2, 3]
    class_of = d6.class_map()
    for k, cls in enumerate(classes):
        assert all(class_of[i] == k for i in cls.members)


def test_class_witnesses_conjugate_the_representative(d6):
    for cls in conjugacy_classes(d6):
        for member, g in zip(cls.members, cls.conjugators):
            assert d6.conj(g, cls.representative) == member


@pytest.mark.parametrize("name", ["D6", "D8", "Z5", "H3", "K1"])
def test_orbit_stabilizer(name):
    group = named_group(name)
    for cls in conjugacy_classes(group):
        assert len(cls) * centralizer(group, [cls.representative]).order == group.order


def test_element_orders(z3, d6):
    assert sorted(z3.element_order(i) for i in range(3)) == [1, 3, 3]
    assert sorted(d6.element_order(i) for i in range(6)) == [1, 2, 2, 2, 3, 3]


def test_direct_product():
    group = direct_product(cyclic_group(2), cyclic_group(3))
    assert group.order == 6
    assert group.n == 5
    assert group.is_abelian()


def test_klein_four_group():
    v4 = klein_four_group()
    assert v4.order == 4
    assert all(v4.element_order(i) <= 2 for i in range(4))


# ==========================================
# 🧪 Almost conjugacy
# ==========================================

def test_k1_k2_almost_conjugate_in_orthogonal_group(k1, k2):
    verdict = is_almost_conjugate(AmbientClassInvariant.orthogonal(), k1, k2)
    assert verdict
    assert verdict.mode == "orthogonal_ambient"
    assert sum(a for _, a, _ in verdict.table) == 8


def test_k1_k2_not_almost_conjugate_inside_diagonal_signs(k1, k2):
    # every class of an abelian ambient group is a single element
    assert not is_almost_conjugate(AmbientClassInvariant.finite(all_sign_changes()), k1, k2)


def test_finite_ambient_needs_a_group():
    with pytest.raises(InputParseError):
        AmbientClassInvariant("finite_ambient")
    with pytest.raises(InputParseError):
        AmbientClassInvariant("unitary")


def test_find_conjugator_for_transpositions():
    s3 = symmetric_group_3()
    h1 = generate_group([SignedPerm([1, 0, 2])])
    h2 = generate_group([SignedPerm([0, 2, 1])])
    g = find_conjugator(s3, h1, h2)
    assert g is not None
    assert {s3.conj(g, s3.locate(x)) for x in h1.elements} == {s3.locate(x) for x in h2.elements}
    assert find_conjugator(s3, h1, s3) is None
