from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from hypreg import intlinalg as il

small = st.integers(-6, 6)
mats = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


@given(mats)
def test_smith_factorisation(A):
    S = il.smith(A)
    assert il.matmul(il.matmul(S.U, A), S.V) == S.D
    for a, b in zip(S.diag, S.diag[1:]):
        assert b % a == 0
    assert il.matmul(S.U, S.Uinv) == il.identity(len(A))


@given(mats)
def test_rank_matches_numpy(A):
    assert il.rank(A, "Q") == np.linalg.matrix_rank(np.array(A, float))


@given(mats, st.lists(small, min_size=4, max_size=4))
def test_solve_consistent(A, x):
    n = len(A[0])
    b = il.matvec(A, x[:n])
    sol = il.solve(A, b, "Z")
    assert sol is not None and il.matvec(A, sol) == b
    solq = il.solve(A, [Fraction(v) for v in b], "Q")
    assert il.matvec(il.coerce(A, "Q"), solq) == b


@given(mats)
def test_kernel_is_kernel(A):
    K = il.kernel(A, "Z")
    for col in il.columns(K):
        assert all(v == 0 for v in il.matvec(A, col))
