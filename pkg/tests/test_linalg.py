from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from newtonosc import linalg

small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_det_known():
    assert linalg.det([[2, 0], [1, 3]]) == 6
    assert linalg.det([[1, 2], [2, 4]]) == 0
    # multiplicity of cone((1,0),(1,2)) is 2
    assert linalg.multiplicity([(1, 0), (1, 2)]) == 2


def test_solve_and_singular():
    assert linalg.solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(linalg.SingularMatrix):
        linalg.solve([[1, 2], [2, 4]], [1, 1])


def test_nullspace_and_rank():
    ns = linalg.nullspace([[1, 1, 0], [0, 1, 1]])
    assert len(ns) == 1
    assert all(sum(a * b for a, b in zip(row, ns[0])) == 0 for row in [[1, 1, 0], [0, 1, 1]])
    assert linalg.rank([(1, 2, 3), (2, 4, 6)]) == 1


def test_primitive():
    assert linalg.primitive((4, 6, 0)) == (2, 3, 0)
    with pytest.raises(linalg.ZeroVector):
        linalg.primitive((0, 0))


def test_smith_known():
    assert linalg.elementary_divisors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_is_simple_and_saturation():
    assert linalg.is_simple([(1, 0), (1, 1)])
    assert not linalg.is_simple([(1, 0), (1, 2)])
    B = linalg.saturation_basis([(2, 0, 0), (0, 2, 0)])
    assert linalg.multiplicity([tuple(b) for b in B] + [(0, 0, 1)]) == 1


@given(square(3))
def test_smith_invariants(M):
    U, D, V = linalg.smith_normal_form(M)
    assert linalg.matmul(linalg.matmul(U, M), V) == D
    assert abs(linalg.det(U)) == 1 and abs(linalg.det(V)) == 1
    diag = [D[i][i] for i in range(3)]
    assert all(D[i][j] == 0 for i in range(3) for j in range(3) if i != j)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(linalg.det(M)) == abs(linalg.det(D))


@given(square(3))
def test_inverse_roundtrip(M):
    if linalg.det(M) == 0:
        return
    I = linalg.matmul(M, linalg.inverse(M))
    assert I == [[int(i == j) for j in range(3)] for i in range(3)]
