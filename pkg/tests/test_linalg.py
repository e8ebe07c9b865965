from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyident.linalg import (
    DEFAULT_PRIME,
    LinalgError,
    RowModule,
    block_assemble,
    check_prime,
    dump_matrix_text,
    inv_fraction,
    inv_mod,
    nullspace_fraction,
    nullspace_mod,
    parse_matrix_text,
    rank_fraction,
    rank_mod,
    rref_fraction,
    rref_mod,
    sparsest_first_order,
)


def naive_rref(a, p):
    """Textbook Gauss-Jordan, no blocking.  Reference for rref_mod."""
    rows = [[x % p for x in row] for row in np.asarray(a, dtype=object)]
    pivots = []
    r = 0
    n = len(rows[0]) if rows else 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = inv_mod(rows[r][c], p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return np.array(rows[:r], dtype=np.int64).reshape(r, n), pivots


matrices = st.integers(1, 7).flatmap(
    lambda m: st.integers(1, 7).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-30, 30), min_size=n, max_size=n),
            min_size=m, max_size=m)))


@given(matrices)
def test_rref_matches_naive(mat):
    basis, piv = rref_mod(mat, DEFAULT_PRIME)
    ref_basis, ref_piv = naive_rref(mat, DEFAULT_PRIME)
    assert list(piv) == ref_piv
    assert np.array_equal(basis.astype(np.int64), ref_basis)


@given(matrices)
def test_rref_idempotent(mat):
    basis, piv = rref_mod(mat, DEFAULT_PRIME)
    again, piv2 = rref_mod(basis, DEFAULT_PRIME)
    assert np.array_equal(basis, again)
    assert np.array_equal(piv, piv2)


@given(matrices)
def test_nullspace_annihilates(mat):
    a = np.array(mat)
    ns = nullspace_mod(a, DEFAULT_PRIME)
    assert ns.shape[0] == a.shape[1] - rank_mod(a)
    prod = (a % DEFAULT_PRIME) @ ns.T.astype(np.int64)
    assert not (prod % DEFAULT_PRIME).any()


@given(matrices)
def test_rank_agrees_with_rationals(mat):
    r = rank_fraction(mat)
    ranks = [rank_mod(mat, p) for p in (101, 103, 107, 109, 113, 127, 131)]
    assert all(rk <= r for rk in ranks)
    # a nonzero r-by-r minor at these entry sizes has fewer than seven
    # prime factors >= 101, so at least one of the primes is generic
    assert max(ranks) == r


@given(matrices, st.randoms(use_true_random=False))
def test_module_insertion_order_independent(mat, rng):
    rows = [list(r) for r in mat]
    m1 = RowModule(len(rows[0]))
    m1.insert(rows)
    shuffled = rows[:]
    rng.shuffle(shuffled)
    m2 = RowModule(len(rows[0]))
    for row in shuffled:
        m2.insert([row])
    assert m1 == m2
    assert m1.rank == rank_mod(rows)


def test_rref_blocking_boundaries():
    rng = np.random.default_rng(7)
    a = rng.integers(0, DEFAULT_PRIME, size=(40, 37))
    blocked, pb = rref_mod(a, DEFAULT_PRIME, col_block=5)
    ref, pr = naive_rref(a, DEFAULT_PRIME)
    assert list(pb) == pr
    assert np.array_equal(blocked.astype(np.int64), ref)


def test_rref_wide_low_rank():
    rng = np.random.default_rng(3)
    left = rng.integers(0, DEFAULT_PRIME, size=(30, 4))
    right = rng.integers(0, DEFAULT_PRIME, size=(4, 600))
    a = left @ right
    basis, piv = rref_mod(a, DEFAULT_PRIME, col_block=64)
    assert len(piv) == 4
    ref, _ = naive_rref(a, DEFAULT_PRIME)
    assert np.array_equal(basis.astype(np.int64), ref)


def test_module_contains_and_residue():
    m = RowModule(4)
    m.insert([[1, 2, 3, 4], [0, 1, 1, 0]])
    assert m.contains([[1, 3, 4, 4]])
    assert not m.contains([[0, 0, 1, 0]])
    res = m.residue([[1, 2, 3, 4]])
    assert not res.any()


def test_module_batched_vs_single():
    rng = np.random.default_rng(11)
    rows = rng.integers(-5, 6, size=(50, 20))
    a = RowModule(20)
    a.insert(rows)
    b = RowModule(20)
    for i in range(0, 50, 7):
        b.insert(rows[i:i + 7])
    assert a == b


def test_check_prime():
    check_prime(101, degree=9)
    with pytest.raises(LinalgError):
        check_prime(91)
    with pytest.raises(LinalgError):
        check_prime(257)
    with pytest.raises(LinalgError):
        check_prime(7, degree=7)


def test_inv_fraction_round_trip():
    m = [[2, 1, 0], [1, 1, 1], [0, 3, 1]]
    inv = inv_fraction(m)
    n = len(m)
    prod = [[sum(Fraction(m[i][k]) * inv[k][j] for k in range(n))
             for j in range(n)] for i in range(n)]
    assert prod == [[Fraction(int(i == j)) for j in range(n)]
                    for i in range(n)]
    with pytest.raises(LinalgError):
        inv_fraction([[1, 2], [2, 4]])


def test_nullspace_fraction():
    ns = nullspace_fraction([[1, 2, 3], [2, 4, 6]])
    assert len(ns) == 2
    for v in ns:
        assert sum(Fraction(c) * x for c, x in zip([1, 2, 3], v)) == 0


def test_rref_fraction_canonical():
    rows, piv = rref_fraction([[0, 2, 4], [1, 1, 1]])
    assert piv == [0, 1]
    assert rows == [[Fraction(1), Fraction(0), Fraction(-1)],
                    [Fraction(0), Fraction(1), Fraction(2)]]


def test_sparsest_first_order():
    rows = np.array([
        [0, 2, 2, 0],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [3, 3, 3, 3],
    ], dtype=np.uint8)
    order = sparsest_first_order(rows)
    assert list(order) == [2, 1, 0, 3]


def test_dump_parse_round_trip():
    a = np.array([[1, 0, 5], [0, 100, 2]], dtype=np.uint8)
    text = dump_matrix_text(a, 101)
    back, p = parse_matrix_text(text)
    assert p == 101
    assert np.array_equal(back, a)


def test_parse_sparse_entries():
    text = "3 4 101\n(1, 1, 1)\n(2, 3, -1)\n(3, 4, 7)\n"
    m, p = parse_matrix_text(text)
    assert p == 101
    assert m[0, 0] == 1 and m[1, 2] == 100 and m[2, 3] == 7
    assert np.count_nonzero(m) == 3
    with pytest.raises(LinalgError):
        parse_matrix_text("2 2 101\n(3, 1, 1)\n")
    with pytest.raises(LinalgError):
        parse_matrix_text("bad header\n")


def test_block_assemble():
    a = np.ones((2, 2))
    b = np.zeros((2, 3))
    out = block_assemble([[a, b], [np.zeros((3, 2)), np.eye(3)]])
    assert out.shape == (5, 5)
    with pytest.raises(LinalgError):
        block_assemble([[a, b], [a]])
    with pytest.raises(LinalgError):
        block_assemble([[a, np.ones((3, 3))]])


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_inv_mod(x):
    p = 101
    if x % p == 0:
        with pytest.raises(ZeroDivisionError):
            inv_mod(x, p)
    else:
        assert x * inv_mod(x, p) % p == 1


def test_large_blocked_rank():
    rng = np.random.default_rng(19)
    left = rng.integers(0, 101, size=(700, 90))
    right = rng.integers(0, 101, size=(90, 1300))
    a = (left @ right) % 101
    assert rank_mod(a) == 90
    m = RowModule(1300)
    m.insert(a[:400])
    m.insert(a[400:])
    assert m.rank == 90
    assert m.contains(a[::13])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_rref_uint8_matches_float(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 12, size=2)
    a = rng.integers(0, 101, size=(m, n))
    b8, p8 = rref_mod(a.astype(np.uint8))
    b, p = rref_mod(a.astype(np.float64))
    assert np.array_equal(p8, p)
    assert np.array_equal(b8, b)
    assert np.array_equal(nullspace_mod(a.astype(np.uint8)),
                          nullspace_mod(a))


def test_rref_uint8_rejects_large_entries():
    bad = np.full((2, 2), 150, dtype=np.uint8)
    with pytest.raises(LinalgError):
        rref_mod(bad)
