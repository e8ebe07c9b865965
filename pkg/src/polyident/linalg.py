"""Exact dense linear algebra over F_p and over the rationals.

The mod-p routines are the performance core of the package.  All heavy
row reduction is organized so the bulk arithmetic happens inside float64
matrix products: with entries kept in [0, p) and p < 2^8, every inner
product used here stays far below 2^53 and is computed exactly by BLAS,
independent of summation order and thread count.  Long-lived state (the
row canonical form held by RowModule) is stored as uint8.

Row canonical form is unique for a given row space, so results are
deterministic and insertion-order independent by construction.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

DEFAULT_PRIME = 101

_ROW_CHUNK = 1024
_COL_CHUNK = 2048
# k * (p-1)^2 must stay below 2^40: exact float64 accumulation needs 2^53,
# and the reciprocal-multiply reduction needs quotients whose rounding error
# stays well under 1/p
_EXACT_INNER_LIMIT = 2**40 // (255 * 255)


class LinalgError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int, degree: int | None = None) -> None:
    """Validate a working prime: prime, uint8-storable, larger than degree."""
    if not is_prime(p):
        raise LinalgError(f"modulus {p} is not prime")
    if p >= 256:
        raise LinalgError(f"modulus {p} too large for uint8 storage")
    if degree is not None and p <= degree:
        raise LinalgError(f"prime {p} must exceed the working degree {degree}")


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("inverse of zero mod p")
    return pow(a, p - 2, p)


def _mod_inplace(a: np.ndarray, p: int) -> None:
    """Reduce a float64 array of exact integers into [0, p) in place.

    floor(x * (1/p)) equals the true quotient provided |x| < 2^40: the
    relative rounding error of the product is ~2^-52, so the computed
    quotient is off by less than 2^-12, far inside the 1/p gap between
    the true quotient and the nearest other integer.  Much faster than
    np.mod on large arrays.
    """
    inv = 1.0 / p
    if a.ndim == 1:
        q = a * inv
        np.floor(q, out=q)
        q *= p
        a -= q
        return
    rows_per = max(1, (1 << 22) // max(1, a.shape[1]))
    for i0 in range(0, a.shape[0], rows_per):
        seg = a[i0:i0 + rows_per]
        q = seg * inv
        np.floor(q, out=q)
        q *= p
        seg -= q


def _as_residues(a, p: int) -> np.ndarray:
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise LinalgError("expected a matrix")
    if m.size and np.abs(m).max() >= 2**40:
        raise LinalgError("entries too large for exact reduction")
    _mod_inplace(m, p)
    return m


def _float_block(a: np.ndarray) -> np.ndarray:
    if a.dtype == np.float64:
        return a
    return a.astype(np.float64)


def reduce_rows_inplace(rows: np.ndarray, basis: np.ndarray,
                        pivots: np.ndarray, p: int) -> None:
    """In place: rows -= rows[:, pivots] @ basis (mod p).

    basis must be in row canonical form on the given pivot columns, which
    makes the single pass a complete reduction.  rows must be float64
    residues; basis may be uint8 or float64.
    """
    if len(pivots) == 0 or rows.size == 0:
        return
    if basis.shape[0] > _EXACT_INNER_LIMIT:
        raise LinalgError("inner dimension too large for exact matmul")
    nc = rows.shape[1]
    for i0 in range(0, rows.shape[0], _ROW_CHUNK):
        i1 = min(i0 + _ROW_CHUNK, rows.shape[0])
        coeffs = np.ascontiguousarray(rows[i0:i1, pivots])
        if not coeffs.any():
            continue
        for j0 in range(0, nc, _COL_CHUNK):
            j1 = min(j0 + _COL_CHUNK, nc)
            seg = rows[i0:i1, j0:j1]
            seg -= coeffs @ _float_block(basis[:, j0:j1])
            _mod_inplace(seg, p)


def rref_mod(a, p: int = DEFAULT_PRIME, *, copy: bool = True,
             col_block: int = 512):
    """Row canonical form over F_p.

    Returns (basis, pivots): basis is a (rank x ncols) float64 array of
    residues with unit pivots and zeros above and below each pivot;
    pivots is the increasing int64 array of pivot columns.  Pivot choice
    is first nonzero column, topmost candidate row; the outcome is the
    canonical form of the row space either way.

    Works block-of-columns at a time: rows not yet chosen as pivots are
    held in their original form and re-reduced lazily against the current
    basis, so the bulk of the work is float64 matrix products.

    A uint8 array is taken to hold residues already and is used in place
    without the eightfold float64 copy; only the touched slabs are
    widened.  That keeps the big staged eliminations inside memory.
    """
    check_prime(p)
    if isinstance(a, np.ndarray) and a.dtype == np.uint8:
        if a.ndim != 2:
            raise LinalgError("expected a matrix")
        if a.size and int(a.max()) >= p:
            raise LinalgError("uint8 entries must already lie below p")
        A = a
    elif copy or not (isinstance(a, np.ndarray) and a.dtype == np.float64):
        A = _as_residues(a, p)
    else:
        A = a
    m, n = A.shape
    cap = min(m, n)
    basis = np.empty((cap, n), dtype=np.float64)
    gpiv: list[int] = []
    r = 0
    active = np.arange(m)

    for c0 in range(0, n, col_block):
        if active.size == 0 or r == cap:
            break
        c1 = min(c0 + col_block, n)
        w = c1 - c0
        k = active.size
        # lazily reduced slab of the still-active rows
        orig = A[active, c0:c1].astype(np.float64)
        if r:
            piv = np.array(gpiv)
            for i0 in range(0, k, _ROW_CHUNK):
                i1 = min(i0 + _ROW_CHUNK, k)
                coeffs = _float_block(A[np.ix_(active[i0:i1], piv)])
                seg = orig[i0:i1]
                seg -= coeffs @ basis[:r, c0:c1]
                _mod_inplace(seg, p)

        capb = min(w, k)
        slabpiv = np.empty((capb, w), dtype=np.float64)
        V = np.zeros((capb, capb), dtype=np.float64)
        Cbuf = np.empty((k, capb), dtype=np.float64)
        chosen: list[int] = []
        lp: list[int] = []
        is_piv = np.zeros(k, dtype=bool)
        t = 0
        for c in range(w):
            if t:
                colvals = orig[:, c] - Cbuf[:, :t] @ slabpiv[:t, c]
                _mod_inplace(colvals, p)
            else:
                colvals = orig[:, c]
            cand = np.flatnonzero((colvals != 0) & ~is_piv)
            if cand.size == 0:
                continue
            i = int(cand[0])
            if t:
                row = orig[i] - Cbuf[i, :t] @ slabpiv[:t]
                _mod_inplace(row, p)
                vrow = (-(Cbuf[i, :t] @ V[:t, :t])) % p
            else:
                row = orig[i].copy()
                vrow = np.zeros(0)
            alpha = inv_mod(int(row[c]), p)
            row *= alpha
            _mod_inplace(row, p)
            V[t, :t] = vrow * alpha % p
            V[t, t] = alpha
            if t:
                f = slabpiv[:t, c].copy()
                if f.any():
                    sp = slabpiv[:t]
                    sp -= np.outer(f, row)
                    _mod_inplace(sp, p)
                    vb = V[:t, : t + 1]
                    vb -= np.outer(f, V[t, : t + 1])
                    _mod_inplace(vb, p)
            slabpiv[t] = row
            Cbuf[:, t] = orig[:, c]
            chosen.append(i)
            lp.append(c)
            is_piv[i] = True
            t += 1
            if r + t == cap or t == capb:
                break
        if t == 0:
            continue
        # extend the new pivot rows to full width
        gidx = active[np.array(chosen)]
        full = A[gidx].astype(np.float64)
        if r:
            reduce_rows_inplace(full, basis[:r], np.array(gpiv), p)
        newrows = V[:t, :t] @ full
        _mod_inplace(newrows, p)
        newpiv = np.array(lp) + c0
        # back-reduce the existing basis against the new pivots
        if r:
            reduce_rows_inplace(basis[:r], newrows, newpiv, p)
        basis[r:r + t] = newrows
        gpiv.extend(newpiv.tolist())
        r += t
        keep = np.ones(k, dtype=bool)
        keep[np.array(chosen)] = False
        active = active[keep]

    if r == 0:
        return np.zeros((0, n), dtype=np.float64), np.zeros(0, dtype=np.int64)
    pivarr = np.array(gpiv, dtype=np.int64)
    order = np.argsort(pivarr)
    return np.ascontiguousarray(basis[:r][order]), pivarr[order]


def rank_mod(a, p: int = DEFAULT_PRIME) -> int:
    return len(rref_mod(a, p)[1])


def nullspace_from_rref(basis: np.ndarray, pivots: np.ndarray, ncols: int,
                        p: int) -> np.ndarray:
    """Canonical nullspace basis (one uint8 row per free column).

    Vector for free column f has a 1 at f and -basis[:, f] at the pivot
    columns; vectors are ordered by increasing free column.
    """
    mask = np.ones(ncols, dtype=bool)
    mask[pivots] = False
    free = np.flatnonzero(mask)
    out = np.zeros((free.size, ncols), dtype=np.uint8)
    if free.size == 0:
        return out
    out[np.arange(free.size), free] = 1
    if len(pivots):
        vals = (p - basis[:, free].T) % p
        out[:, pivots] = vals.astype(np.uint8)
    return out


def nullspace_mod(a, p: int = DEFAULT_PRIME) -> np.ndarray:
    if isinstance(a, np.ndarray) and a.dtype == np.uint8:
        arr = a
    else:
        arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    basis, piv = rref_mod(arr, p)
    return nullspace_from_rref(basis, piv, arr.shape[1], p)


def sparsest_first_order(rows: np.ndarray) -> np.ndarray:
    """Stable ordering: nonzero count ascending, byte-lex ascending on ties."""
    rows = np.ascontiguousarray(rows.astype(np.uint8, copy=False))
    counts = np.count_nonzero(rows, axis=1)
    void = rows.view([('b', np.uint8, rows.shape[1])]).ravel()
    lex = np.argsort(void, kind='stable')
    # among rows sorted lexicographically, order by count (stable)
    return lex[np.argsort(counts[lex], kind='stable')]


class RowModule:
    """Incrementally built row space over F_p, held in canonical form."""

    def __init__(self, ncols: int, p: int = DEFAULT_PRIME):
        check_prime(p)
        self.p = p
        self.ncols = ncols
        self._basis = np.zeros((0, ncols), dtype=np.uint8)
        self._pivots = np.zeros(0, dtype=np.int64)

    @property
    def rank(self) -> int:
        return self._basis.shape[0]

    def basis(self) -> np.ndarray:
        return self._basis.copy()

    @property
    def pivots(self) -> np.ndarray:
        return self._pivots.copy()

    def residue(self, rows) -> np.ndarray:
        """Rows reduced against the module (float64 residues)."""
        red = _as_residues(rows, self.p)
        if red.shape[1] != self.ncols:
            raise LinalgError("column count mismatch")
        reduce_rows_inplace(red, self._basis, self._pivots, self.p)
        return red

    def contains(self, rows) -> bool:
        return not self.residue(rows).any()

    def insert(self, rows) -> int:
        """Add rows to the span; returns the rank increase."""
        red = self.residue(rows)
        if not red.any():
            return 0
        new_basis, new_piv = rref_mod(red, self.p, copy=False)
        t = len(new_piv)
        if t == 0:
            return 0
        if self.rank:
            for i0 in range(0, self.rank, _ROW_CHUNK):
                i1 = min(i0 + _ROW_CHUNK, self.rank)
                seg = self._basis[i0:i1].astype(np.float64)
                reduce_rows_inplace(seg, new_basis, new_piv, self.p)
                self._basis[i0:i1] = seg.astype(np.uint8)
        merged = np.vstack([self._basis,
                            new_basis.astype(np.uint8)])
        pivs = np.concatenate([self._pivots, new_piv])
        order = np.argsort(pivs)
        self._basis = np.ascontiguousarray(merged[order])
        self._pivots = pivs[order]
        return t

    def copy(self) -> "RowModule":
        dup = RowModule(self.ncols, self.p)
        dup._basis = self._basis.copy()
        dup._pivots = self._pivots.copy()
        return dup

    def __eq__(self, other) -> bool:
        if not isinstance(other, RowModule):
            return NotImplemented
        return (self.p == other.p and self.ncols == other.ncols
                and np.array_equal(self._pivots, other._pivots)
                and np.array_equal(self._basis, other._basis))

    def __repr__(self) -> str:
        return f"RowModule(rank={self.rank}, ncols={self.ncols}, p={self.p})"


def block_assemble(grid) -> np.ndarray:
    """Assemble a block matrix from a 2-D layout of conformable blocks."""
    if not grid or any(len(row) != len(grid[0]) for row in grid):
        raise LinalgError("block layout must be a rectangular grid")
    try:
        return np.block([[np.asarray(b) for b in row] for row in grid])
    except ValueError as exc:
        raise LinalgError(f"blocks not conformable: {exc}") from None


# ---------------------------------------------------------------------------
# exact rational elimination (small matrices only)

def _frac_rows(mat) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in mat]


def rref_fraction(mat):
    """Row canonical form over Q.  Returns (rows, pivot columns)."""
    rows = _frac_rows(mat)
    if not rows:
        return [], []
    n = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank_fraction(mat) -> int:
    return len(rref_fraction(mat)[1])


def nullspace_fraction(mat) -> list[list[Fraction]]:
    """Canonical nullspace basis over Q, ordered by free column."""
    rows = _frac_rows(mat)
    if not rows:
        return []
    n = len(rows[0])
    basis, pivots = rref_fraction(rows)
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -basis[i][f]
        out.append(v)
    return out


def inv_fraction(mat) -> list[list[Fraction]]:
    rows = _frac_rows(mat)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise LinalgError("matrix not square")
    aug = [row + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    red, piv = rref_fraction(aug)
    if len(piv) < n or piv[:n] != list(range(n)):
        raise LinalgError("matrix is singular")
    return [row[n:] for row in red[:n]]


# ---------------------------------------------------------------------------
# matrix file format

def dump_matrix_text(a, p: int) -> str:
    """Dense dump: header 'rows cols p', then row-major entries."""
    arr = np.asarray(a)
    lines = [f"{arr.shape[0]} {arr.shape[1]} {p}"]
    for row in arr:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str):
    """Parse a matrix dump.  Returns (uint8 array, p).

    Accepts the dense row-major format and, after the same header, sparse
    entries written one per line as '(row, col, value)' with 1-based
    indices.
    """
    raw = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in raw if ln]
    if not lines:
        raise LinalgError("empty matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise LinalgError("matrix header must be 'rows cols p'")
    rows, cols, p = (int(x) for x in head)
    check_prime(p)
    body = lines[1:]
    out = np.zeros((rows, cols), dtype=np.int64)
    if any(ln.startswith("(") for ln in body):
        for ln in body:
            if not (ln.startswith("(") and ln.endswith(")")):
                raise LinalgError(f"bad sparse entry: {ln!r}")
            parts = [x.strip() for x in ln[1:-1].split(",")]
            if len(parts) != 3:
                raise LinalgError(f"bad sparse entry: {ln!r}")
            i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise LinalgError(f"sparse index out of range: {ln!r}")
            out[i - 1, j - 1] = v % p
    else:
        vals = [int(x) for ln in body for x in ln.split()]
        if len(vals) != rows * cols:
            raise LinalgError("matrix body does not match header dimensions")
        out = np.array(vals, dtype=np.int64).reshape(rows, cols) % p
    return out.astype(np.uint8), p
