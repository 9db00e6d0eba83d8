from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from vanest_jets.linear import Q, Rational, SparseMatrix, rank, rank_and_kernel, solve_in_image


def small_matrices(max_dim=20):
    entry = st.integers(-3, 3).map(lambda x: x if abs(x) < 2 else 0) | st.fractions(max_denominator=4)
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rationals_are_reduced():
    x = Q("6/4")
    assert (x.numerator, x.denominator) == (3, 2)
    assert Q(Fraction(-2, -4)) == Rational(1, 2)
    assert Rational(3, -6).denominator > 0


def test_identity_has_full_rank_and_no_kernel():
    r, ker = rank_and_kernel(SparseMatrix.identity(3))
    assert r == 3 and ker == []


def test_zero_map_kernel_is_everything():
    r, ker = rank_and_kernel(SparseMatrix.zero(2, 4))
    assert r == 0 and len(ker) == 4


def test_rank_one_kernel():
    r, ker = rank_and_kernel(SparseMatrix.from_rows([[1, 2], [2, 4]]))
    assert r == 1 and len(ker) == 1
    k = ker[0]
    assert k[0] * -1 == 2 * k[1]  # proportional to (2, -1)


def test_solve_examples():
    assert solve_in_image(SparseMatrix.identity(3), [1, -2, Rational(1, 3)]) == [1, -2, Rational(1, 3)]
    assert solve_in_image(SparseMatrix.zero(2, 2), [0, 1]) is None
    assert solve_in_image(SparseMatrix.from_rows([[1], [2]]), [2, 4]) == [2]
    assert solve_in_image(SparseMatrix.from_rows([[1], [2]]), [2, 5]) is None


def test_solve_rejects_wrong_length():
    with pytest.raises(ValueError):
        solve_in_image(SparseMatrix.identity(2), [1, 2, 3])


def test_no_stored_zeros_and_bounds():
    m = SparseMatrix(2, 2, {(0, 0): 0, (1, 1): 5})
    assert m.entries == {(1, 1): 5}
    with pytest.raises(IndexError):
        SparseMatrix(2, 2, {(2, 0): 1})


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_kernel_contract(rows):
    m = SparseMatrix.from_rows(rows)
    r, ker = rank_and_kernel(m)
    assert r + len(ker) == m.cols
    for v in ker:
        assert all(x == 0 for x in m.apply(v))
    # independence: the kernel basis has full rank
    if ker:
        assert rank(SparseMatrix.from_rows(ker)) == len(ker)


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_rank_matches_sympy_and_transpose(rows):
    m = SparseMatrix.from_rows(rows)
    expected = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in map(Fraction, r)] for r in rows]).rank()
    assert rank(m) == expected == rank(m.transpose())


@settings(max_examples=60, deadline=None)
@given(small_matrices(8), st.data())
def test_solve_in_image_finds_preimages(rows, data):
    m = SparseMatrix.from_rows(rows)
    x = data.draw(st.lists(st.integers(-3, 3), min_size=m.cols, max_size=m.cols))
    b = m.apply(x)
    sol = solve_in_image(m, b)
    assert sol is not None and m.apply(sol) == b


def test_matrix_algebra():
    a = SparseMatrix.from_rows([[1, 2], [0, 1]])
    b = SparseMatrix.from_rows([[0, 1], [1, 0]])
    assert (a @ b).to_rows() == [[2, 1], [1, 0]]
    assert (a - a).is_zero()
    assert (a + b).scale(2) == SparseMatrix.from_rows([[2, 6], [2, 2]])
