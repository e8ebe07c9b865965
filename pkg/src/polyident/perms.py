"""Symmetric group machinery: partitions, tableaux, representation matrices.

Permutations are tuples of 0-based images, so a permutation and the
multilinear word it labels coincide: sigma corresponds to the word whose
k-th letter is variable sigma[k].  Composition is function composition,
(s * t)(x) = s(t(x)).

The irreducible representation attached to a partition is realized by
Clifton matrices: A(pi) has entry (i, j) equal to zero when two numbers
share a row of pi T_j and a column of T_i, and otherwise to the sign of
the column permutation aligning T_i row-wise with pi T_j.  A(identity)
need not be the identity matrix; the representing matrix of pi is
A(identity)^-1 A(pi).  Standard tableaux are ordered by their row
reading word.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations as _it_permutations

import numpy as np

from .linalg import inv_fraction

LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ---------------------------------------------------------------------------
# permutations

def all_perms(n: int) -> list[tuple[int, ...]]:
    """All of S_n in lexicographic order of one-line notation."""
    return list(_it_permutations(range(n)))


def compose(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(s[x] for x in t)


def inverse(s: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(s)
    for i, x in enumerate(s):
        out[x] = i
    return tuple(out)


def perm_sign(s) -> int:
    n = len(s)
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if s[i] > s[j]:
                sign = -sign
    return sign


def word_of_perm(s) -> str:
    return "".join(LETTERS[x] for x in s)


def perm_of_word(w: str) -> tuple[int, ...]:
    s = tuple(LETTERS.index(ch) for ch in w)
    if sorted(s) != list(range(len(s))):
        raise ValueError(f"not a multilinear word: {w!r}")
    return s


# ---------------------------------------------------------------------------
# partitions

def partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of n, decreasing lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(rest: int, biggest: int, acc: list[int]):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, biggest), 0, -1):
            acc.append(part)
            rec(rest - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return out


def partition_str(lam) -> str:
    return ",".join(str(x) for x in lam)


def parse_partition(text: str) -> tuple[int, ...]:
    parts = tuple(int(x) for x in text.replace(" ", "").split(","))
    if not parts or any(x < 1 for x in parts):
        raise ValueError(f"bad partition: {text!r}")
    if list(parts) != sorted(parts, reverse=True):
        raise ValueError(f"partition parts must be decreasing: {text!r}")
    return parts


def conjugate_partition(lam) -> tuple[int, ...]:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > c) for c in range(lam[0]))


def hook_dim(lam) -> int:
    """Number of standard tableaux, by the hook length formula."""
    n = sum(lam)
    conj = conjugate_partition(lam)
    prod = 1
    for r, row in enumerate(lam):
        for c in range(row):
            prod *= (row - c) + (conj[c] - r) - 1
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    assert fact % prod == 0
    return fact // prod


@lru_cache(maxsize=None)
def standard_tableaux(lam: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All standard tableaux of the given shape, entries 1..n, ordered by
    row reading word."""
    n = sum(lam)
    rows = len(lam)
    shape = list(lam)

    results = []

    def rec(filled: list[list[int]], counts: list[int], nxt: int):
        if nxt > n:
            results.append(tuple(tuple(r) for r in filled))
            return
        for r in range(rows):
            c = counts[r]
            if c < shape[r] and (r == 0 or counts[r - 1] > c):
                filled[r].append(nxt)
                counts[r] += 1
                rec(filled, counts, nxt + 1)
                filled[r].pop()
                counts[r] -= 1

    rec([[] for _ in range(rows)], [0] * rows, 1)
    results.sort(key=lambda t: tuple(x for row in t for x in row))
    assert len(results) == hook_dim(lam)
    return tuple(results)


# ---------------------------------------------------------------------------
# Clifton matrices

@lru_cache(maxsize=None)
def _tableau_data(lam: tuple[int, ...]):
    """Per tableau: row-of-entry lookup and column-major cell layout."""
    tabs = standard_tableaux(lam)
    n = sum(lam)
    row_of = []
    col_cells = []
    for t in tabs:
        rows = [0] * n
        cols: list[list[int]] = [[] for _ in range(lam[0])]
        for r, row in enumerate(t):
            for c, e in enumerate(row):
                rows[e - 1] = r
                cols[c].append(e - 1)
        row_of.append(tuple(rows))
        col_cells.append(tuple(tuple(c) for c in cols))
    return tabs, tuple(row_of), tuple(col_cells)


def clifton_matrix(lam, perm) -> np.ndarray:
    """A(perm) for the shape lam; entries in {-1, 0, 1}."""
    lam = tuple(lam)
    tabs, row_of, col_cells = _tableau_data(lam)
    d = len(tabs)
    n = sum(lam)
    out = np.zeros((d, d), dtype=np.int64)
    for j in range(d):
        # row in perm T_j of each number x: row_of[j] pushed through perm
        rs = [0] * n
        for e in range(n):
            rs[perm[e]] = row_of[j][e]
        for i in range(d):
            sign = 1
            for col in col_cells[i]:
                targets = [rs[x] for x in col]
                if len(set(targets)) != len(targets):
                    sign = 0
                    break
                assert sorted(targets) == list(range(len(targets)))
                for a in range(len(targets)):
                    for b in range(a + 1, len(targets)):
                        if targets[a] > targets[b]:
                            sign = -sign
            out[i, j] = sign
    return out


@lru_cache(maxsize=None)
def _batch_plan(lam: tuple[int, ...]):
    """Flattened column-major gather and comparison-pair indices."""
    tabs, row_of, col_cells = _tableau_data(lam)
    d = len(tabs)
    n = sum(lam)
    gather = np.zeros((d, n), dtype=np.int64)
    pair_a, pair_b = [], []
    maxpairs = 0
    for i in range(d):
        pos = 0
        pa, pb = [], []
        for col in col_cells[i]:
            for a in range(len(col)):
                for b in range(a + 1, len(col)):
                    pa.append(pos + a)
                    pb.append(pos + b)
            for x in col:
                gather[i, pos] = x
                pos += 1
        pair_a.append(pa)
        pair_b.append(pb)
        maxpairs = max(maxpairs, len(pa))
    maxpairs = max(maxpairs, 1)
    A = np.zeros((d, maxpairs), dtype=np.int64)
    B = np.zeros((d, maxpairs), dtype=np.int64)
    valid = np.zeros((d, maxpairs), dtype=bool)
    for i in range(d):
        k = len(pair_a[i])
        A[i, :k] = pair_a[i]
        B[i, :k] = pair_b[i]
        valid[i, :k] = True
    return gather, A, B, valid, tuple(row_of)


def clifton_batch(lam, perms) -> np.ndarray:
    """A(perm) for many perms at once; returns (len(perms), d, d) int8."""
    lam = tuple(lam)
    gather, A, B, valid, row_of = _batch_plan(lam)
    d = gather.shape[0]
    n = sum(lam)
    P = np.asarray(perms, dtype=np.int64)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    m = P.shape[0]
    rows_j = np.array(row_of, dtype=np.int64)
    out = np.zeros((m, d, d), dtype=np.int8)
    ar = np.arange(m)[:, None]
    for j in range(d):
        rs = np.empty((m, n), dtype=np.int64)
        rs[ar, P] = rows_j[j][None, :]
        targ = rs[:, gather]                      # (m, d, n) column-major
        ta = np.take_along_axis(targ, A[None, :, :], axis=2)
        tb = np.take_along_axis(targ, B[None, :, :], axis=2)
        dead = ((ta == tb) & valid[None, :, :]).any(axis=2)
        inv = ((ta > tb) & valid[None, :, :]).sum(axis=2)
        sign = np.where(dead, 0, 1 - 2 * (inv & 1)).astype(np.int8)
        out[:, :, j] = sign
    return out


@lru_cache(maxsize=None)
def clifton_identity_inverse(lam: tuple[int, ...]) -> np.ndarray:
    """A(identity)^-1, exact integer matrix (A(identity) is unimodular)."""
    a1 = clifton_matrix(lam, tuple(range(sum(lam))))
    inv = inv_fraction(a1.tolist())
    out = np.array([[int(x) for x in row] for row in inv], dtype=np.int64)
    assert all(x.denominator == 1 for row in inv for x in row)
    return out


def rep_matrix(lam, perm) -> np.ndarray:
    """The representing matrix A(1)^-1 A(perm); a homomorphism image."""
    return clifton_identity_inverse(tuple(lam)) @ clifton_matrix(lam, perm)


# ---------------------------------------------------------------------------
# matrix units in the group algebra

def matrix_units(n: int) -> dict[tuple[int, ...], list[list[list[Fraction]]]]:
    """Wedderburn matrix units of the rational group algebra of S_n.

    For each partition, units[i][j] is the group algebra element E_ij as
    coefficients over all_perms(n); E_ij has coefficient
    (dim / n!) * R(sigma)_ij at sigma.
    """
    perms = all_perms(n)
    fact = len(perms)
    out = {}
    for lam in partitions(n):
        d = hook_dim(lam)
        reps = [rep_matrix(lam, s) for s in perms]
        units = [[[Fraction(d * int(reps[k][i, j]), fact)
                   for k in range(fact)]
                  for j in range(d)]
                 for i in range(d)]
        out[lam] = units
    return out


def s3_change_of_basis():
    """Change of basis between the word basis of the S_3 group algebra and
    its Wedderburn components.

    Returns (M, Minv) over Fraction.  Column order: the symmetric unit,
    the four 2x2 matrix units E11, E12, E21, E22, the alternating unit.
    Rows follow the six words in lexicographic order.
    """
    units = matrix_units(3)
    cols = [units[(3,)][0][0]]
    two = units[(2, 1)]
    cols += [two[0][0], two[0][1], two[1][0], two[1][1]]
    cols.append(units[(1, 1, 1)][0][0])
    M = [[cols[c][r] for c in range(6)] for r in range(6)]
    return M, inv_fraction(M)
