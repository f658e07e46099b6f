import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from core.errors import InputParseError, InternalConsistencyError
from core.exactnum import Cyclotomic, ExactMatrix, fixed_subspace_dim, normalize_scalar, parse_rational, \
    series_inverse, smith_normal_form, sym_power_trace_series


# ==========================================
# 🔢 Cyclotomic numbers
# ==========================================

def test_fourth_root_squares_to_minus_one():
    i = Cyclotomic.root_of_unity(4)
    assert i * i == -1
    assert normalize_scalar(i * i) == -1


def test_roots_of_unity_sum_to_zero():
    assert Cyclotomic.from_exponents(5, {k: 1 for k in range(5)}) == 0


def test_galois_action_permutes_roots():
    z = Cyclotomic.root_of_unity(5)
    assert z.galois(2) == Cyclotomic.root_of_unity(5, 2)
    with pytest.raises(InputParseError):
        z.galois(5)


def test_normalized_trace_of_primitive_roots():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        # mu(m)/phi(m) for a primitive m-th root
        assert Cyclotomic.root_of_unity(12).normalized_trace() == 0
        assert Cyclotomic.root_of_unity(6).normalized_trace() == Fraction(1, 2)
        assert Cyclotomic.root_of_unity(5).normalized_trace() == Fraction(-1, 4)


def test_inverse_and_conjugate():
    z = Cyclotomic.root_of_unity(5)
    x = z + 1
    assert x * x.inverse() == 1
    # 2 cos(pi/3) = 1
    w = Cyclotomic.root_of_unity(6)
    assert w + w.conjugate() == 1


def test_normalized_trace_does_not_depend_on_the_field():
    z = Cyclotomic.root_of_unity(5)
    assert z.normalized_trace() == Fraction(-1, 4)
    assert z.lift(10).normalized_trace() == Fraction(-1, 4)


def test_mixed_orders_multiply_in_a_common_field():
    i = Cyclotomic.root_of_unity(4)
    w = Cyclotomic.root_of_unity(3)
    assert i * w == Cyclotomic.root_of_unity(12, 3 + 4)


def test_rational_part_of_irrational_value_raises():
    with pytest.raises(InternalConsistencyError):
        Cyclotomic.root_of_unity(3).rational_part()


# ==========================================
# 🧾 Scalars
# ==========================================

def test_normalize_scalar():
    assert normalize_scalar(Fraction(4, 2)) == 2
    assert isinstance(normalize_scalar(Fraction(4, 2)), int)
    assert normalize_scalar("3/6") == Fraction(1, 2)
    assert normalize_scalar(Cyclotomic(7, [3])) == 3


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(5) == 5
    with pytest.raises(InputParseError):
        parse_rational("abc")
    with pytest.raises(InputParseError):
        parse_rational("1/0")


# ==========================================
# 🧱 Matrices
# ==========================================

def test_determinant_and_inverse():
    m = ExactMatrix([[2, 1], [1, 1]])
    assert m.determinant() == 1
    assert m.inverse() == ExactMatrix([[1, -1], [-1, 2]])
    assert m @ m.inverse() == ExactMatrix.identity(2)


def test_singular_inverse_raises():
    with pytest.raises(InputParseError):
        ExactMatrix([[1, 2], [2, 4]]).inverse()


def test_rational_rotation_is_orthogonal():
    r = ExactMatrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    assert r.is_orthogonal()
    assert not ExactMatrix([[1, 1], [0, 1]]).is_orthogonal()


def test_cyclotomic_diagonal_is_unitary():
    z = Cyclotomic.root_of_unity(5)
    m = ExactMatrix.diagonal([z, z.conjugate()])
    assert m.is_orthogonal()
    assert m.determinant() == 1


@pytest.mark.parametrize("rows, expected", [
    ([[-1, 0], [0, -1]], (1, 2, 1)),
    ([[0, -1], [1, 0]], (1, 0, 1)),
    ([[1, 0], [0, 1]], (1, -2, 1)),
    ([[1, 0, 0], [0, 1, 0], [0, 0, -1]], (1, -1, -1, 1)),
])
def test_det_one_minus_t(rows, expected):
    assert ExactMatrix(rows).det_one_minus_t() == expected


def test_nullspace_and_rank():
    m = ExactMatrix([[1, 1, 0], [0, 0, 1]])
    assert m.rank() == 2
    basis = m.nullspace()
    assert len(basis) == 1
    assert m.apply(basis[0]) == (0, 0)


def test_fixed_subspace_dim():
    assert fixed_subspace_dim([ExactMatrix.diagonal([1, 1, -1])]) == 2
    assert fixed_subspace_dim([ExactMatrix.diagonal([1, -1, 1]), ExactMatrix.diagonal([-1, 1, 1])]) == 1
    with pytest.raises(InputParseError):
        fixed_subspace_dim([ExactMatrix.identity(2), ExactMatrix.identity(3)])


# ==========================================
# 📈 Series
# ==========================================

def test_series_inverse_geometric():
    series = series_inverse((1, -1), 4)
    assert [series[k] for k in range(5)] == [1, 1, 1, 1, 1]
    assert series[-1] == 0
    with pytest.raises(IndexError):
        series[5]


def test_symmetric_power_traces_of_identity():
    series = sym_power_trace_series(ExactMatrix.identity(2), 3)
    assert [series[k] for k in range(4)] == [1, 2, 3, 4]


def test_series_inverse_needs_unit_constant_term():
    with pytest.raises(InternalConsistencyError):
        series_inverse((2, 1), 3)


# ==========================================
# 🧮 Smith normal form
# ==========================================

def test_smith_normal_form_small():
    u, d, v = smith_normal_form([[2, 4], [6, 8]])
    assert u @ ExactMatrix([[2, 4], [6, 8]]) @ v == d
    assert (d.rows[0][0], d.rows[1][1]) == (2, 4)


def test_smith_normal_form_rejects_fractions():
    with pytest.raises(InputParseError):
        smith_normal_form(ExactMatrix([["1/2", 0], [0, 1]]))


@st.composite
def integer_matrices(draw):
    rows = draw(st.integers(min_value=1, max_value=4))
    cols = draw(st.integers(min_value=1, max_value=4))
    return [draw(st.lists(st.integers(min_value=-6, max_value=6), min_size=cols, max_size=cols)) for _ in range(rows)]


@hsettings(max_examples=500, deadline=None)
@given(integer_matrices())
def test_smith_normal_form_properties(rows):
    a = ExactMatrix(rows)
    u, d, v = smith_normal_form(a)
    assert u @ a @ v == d
    assert abs(u.determinant()) == 1
    assert abs(v.determinant()) == 1
    assert d.is_diagonal()
    diag = [d.rows[i][i] for i in range(min(d.nrows, d.ncols))]
    assert all(x >= 0 for x in diag)
    nonzero = [x for x in diag if x]
    # zeros trail, and each invariant factor divides the next
    assert diag[:len(nonzero)] == nonzero
    assert all(y % x == 0 for x, y in zip(nonzero, nonzero[1:]))
    assert len(nonzero) == a.rank()


@st.composite
def cyclotomic_elements(draw, order):
    coeffs = draw(st.lists(st.integers(min_value=-3, max_value=3), min_size=order, max_size=order))
    return Cyclotomic(order, coeffs)


@st.composite
def cyclotomic_triples(draw):
    order = draw(st.sampled_from([3, 4, 5, 7, 8, 12]))
    return tuple(draw(cyclotomic_elements(order)) for _ in range(3))


@hsettings(max_examples=100, deadline=None)
@given(cyclotomic_triples())
def test_cyclotomic_field_axioms(triple):
    x, y, z = triple
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y).normalized_trace() == x.normalized_trace() + y.normalized_trace()
    assert (x * y).galois(x.order - 1) == x.conjugate() * y.conjugate()
    if x != 0:
        assert x * x.inverse() == 1
