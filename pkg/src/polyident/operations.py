"""Multilinear operations as group algebra elements.

An n-linear operation is a linear combination of permutations of
a_1...a_n.  Operations expand nonassociative monomials into associative
words; their hatted variants (one hatted variable per term) expand into
dialgebra normal-form monomials.  Trilinear operations are classified
up to generating the same left ideal in the degree-3 group algebra by a
triple [x, Y, z] with x, z in {0, 1} and Y a 2x2 matrix in row
canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from .linalg import rank_fraction, rref_fraction
from .monomials import Poly, StructureError, dialgebra_basis, \
    is_dialgebra_key, is_tree, parse_expression
from .perms import all_perms, compose, s3_change_of_basis

_s3_minv_cache = None


def _s3_minv():
    global _s3_minv_cache
    if _s3_minv_cache is None:
        _s3_minv_cache = s3_change_of_basis()[1]
    return _s3_minv_cache


@dataclass(frozen=True)
class MultilinearOperation:
    """Operation as a combination of plain words of the n arguments."""

    arity: int
    terms: Poly

    @classmethod
    def from_text(cls, text: str, arity: int | None = None):
        p = parse_expression(text)
        return cls.from_poly(p, arity)

    @classmethod
    def from_poly(cls, p: Poly, arity: int | None = None):
        for k in p.terms:
            if not (isinstance(k, tuple) and not is_dialgebra_key(k)
                    and not is_tree(k)):
                raise StructureError(f"not a word term: {k!r}")
            if arity is None:
                arity = len(k)
            if len(k) != arity or sorted(k) != list(range(arity)):
                raise StructureError(f"bad word for arity {arity}: {k!r}")
        if arity is None:
            raise StructureError("arity required for the zero operation")
        return cls(arity, p)

    def apply_args(self, rho) -> "MultilinearOperation":
        """The operation evaluated on arguments permuted by rho."""
        p = self.terms.map_keys(lambda w: compose(rho, w))
        return MultilinearOperation(self.arity, p)

    def vector(self) -> tuple[Fraction, ...]:
        perms = all_perms(self.arity)
        return tuple(Fraction(self.terms.terms.get(w, 0)) for w in perms)


@dataclass(frozen=True)
class HattedOperation:
    """Operation whose terms are words with one hatted (center) letter."""

    arity: int
    terms: Poly

    @classmethod
    def from_text(cls, text: str, arity: int | None = None):
        p = parse_expression(text)
        for k in p.terms:
            if not is_dialgebra_key(k):
                raise StructureError(f"not a hatted word term: {k!r}")
            if arity is None:
                arity = len(k[0])
            if len(k[0]) != arity or sorted(k[0]) != list(range(arity)):
                raise StructureError(f"bad word for arity {arity}: {k!r}")
        if arity is None:
            raise StructureError("arity required for the zero operation")
        return cls(arity, p)

    def unhat(self) -> MultilinearOperation:
        """Erase every hat, recovering the plain operation."""
        p = self.terms.map_keys(lambda k: k[0])
        return MultilinearOperation(self.arity, p)

    def apply_args(self, rho) -> "HattedOperation":
        p = self.terms.map_keys(lambda k: (compose(rho, k[0]), k[1]))
        return HattedOperation(self.arity, p)

    def vector(self) -> tuple[Fraction, ...]:
        basis = dialgebra_basis(self.arity)
        return tuple(Fraction(self.terms.terms.get(m, 0)) for m in basis)


def bso_transform(op: MultilinearOperation) -> list[HattedOperation]:
    """The n hatted operations obtained by centering each argument."""
    out = []
    for i in range(op.arity):
        p = op.terms.map_keys(lambda w, i=i: (w, w.index(i)))
        out.append(HattedOperation(op.arity, p))
    return out


# ---------------------------------------------------------------------------
# expansion of nonassociative monomials

def expand(m, ops, target: str = "algebra") -> Poly:
    """Expand a monomial tree through the operations, leaf inward.

    ops[k] interprets operation symbol k.  With target "algebra" the
    operations must be plain and the result is a word polynomial; with
    target "dialgebra" they must be hatted and the result ranges over
    normal-form dialgebra monomials.
    """
    if target not in ("algebra", "dialgebra"):
        raise StructureError(f"unknown target {target!r}")
    dial = target == "dialgebra"

    def rec(t) -> Poly:
        if not is_tree(t):
            return Poly([(((t,), 0) if dial else (t,), 1)])
        sym, kids = t[1], t[2:]
        if sym >= len(ops):
            raise StructureError(f"no operation for symbol {sym + 1}")
        op = ops[sym]
        if dial != isinstance(op, HattedOperation):
            raise StructureError(
                f"operation for symbol {sym + 1} does not match {target}")
        if op.arity != len(kids):
            raise StructureError(
                f"arity mismatch at symbol {sym + 1}: "
                f"{op.arity} != {len(kids)}")
        args = [rec(c) for c in kids]
        out = Poly()
        acc: dict = {}
        for key, c in op.terms.items():
            if dial:
                w, hat = key
            else:
                w, hat = key, -1
            for combo in product(*(args[w[t]].terms.items()
                                   for t in range(len(w)))):
                coeff = c
                word: tuple = ()
                center = -1
                for t, (k2, c2) in enumerate(combo):
                    if t == hat:
                        center = len(word) + k2[1]
                    word += k2[0] if dial else k2
                    coeff *= c2
                nk = (word, center) if dial else word
                nv = acc.get(nk, 0) + coeff
                if nv:
                    acc[nk] = nv
                else:
                    acc.pop(nk, None)
        out.terms = acc
        return out

    return rec(m)


# ---------------------------------------------------------------------------
# linear dependence among hatted operations

def _op_vectors(ops, perms):
    rows = []
    tags = []
    for k, op in enumerate(ops):
        for rho in perms:
            rows.append(op.apply_args(rho).vector())
            tags.append((k, rho))
    return rows, tags


def express_in_permuted_span(target, ops):
    """Write target as a combination of argument-permuted ops.

    Returns a list of ((op index, perm), coeff) or None when target is
    not in the span.  Small supports (one or two rows) are preferred.
    """
    if not ops:
        return None if target.terms else []
    perms = all_perms(target.arity)
    rows, tags = _op_vectors(ops, perms)
    v = target.vector()
    if not any(v):
        return []
    n = len(v)
    for i, r in enumerate(rows):
        j = next((t for t in range(n) if r[t]), None)
        if j is None:
            continue
        c = Fraction(v[j], r[j])
        if all(v[t] == c * r[t] for t in range(n)):
            return [(tags[i], c)]
    for i1, i2 in combinations(range(len(rows)), 2):
        r1, r2 = rows[i1], rows[i2]
        sol = _solve_pair(r1, r2, v)
        if sol is not None:
            c1, c2 = sol
            out = []
            if c1:
                out.append((tags[i1], c1))
            if c2:
                out.append((tags[i2], c2))
            return out
    return _solve_full(rows, tags, v)


def _solve_pair(r1, r2, v):
    n = len(v)
    j1 = next((t for t in range(n) if r1[t]), None)
    if j1 is None:
        return None
    piv = [t for t in range(n) if r2[t] * r1[j1] != r1[t] * r2[j1]]
    if not piv:
        return None
    j2 = piv[0]
    det = r1[j1] * r2[j2] - r1[j2] * r2[j1]
    c1 = Fraction(v[j1] * r2[j2] - v[j2] * r2[j1], det)
    c2 = Fraction(r1[j1] * v[j2] - r1[j2] * v[j1], det)
    if all(v[t] == c1 * r1[t] + c2 * r2[t] for t in range(n)):
        return c1, c2
    return None


def _solve_full(rows, tags, v):
    # row-reduce [rows^T | v^T]; consistency gives coefficients
    m = len(rows)
    n = len(v)
    aug = [[rows[i][t] for i in range(m)] + [v[t]] for t in range(n)]
    red, pivots = rref_fraction(aug)
    if m in pivots:
        return None
    out = []
    combo = [Fraction(0)] * m
    for r, p in zip(red, pivots):
        if r[m]:
            combo[p] = r[m]
            out.append((tags[p], r[m]))
    check = [sum(combo[i] * rows[i][t] for i in range(m)) for t in range(n)]
    assert tuple(check) == tuple(v)
    return out


def dependency_reduce(ops):
    """Drop operations expressible through permuted earlier ones.

    Returns (retained ops, rules); each rule is (index into ops, combo)
    with combo as produced by express_in_permuted_span over the
    retained list.
    """
    retained = []
    rules = []
    for idx, op in enumerate(ops):
        combo = express_in_permuted_span(op, retained)
        if combo is None:
            retained.append(op)
        else:
            rules.append((idx, combo))
    return retained, rules


# ---------------------------------------------------------------------------
# classification of trilinear operations

@dataclass(frozen=True)
class TrilinearClass:
    x: int
    y: tuple
    z: int

    def __str__(self) -> str:
        def cell(v):
            return str(v)
        rows = ",".join(
            "[" + ",".join(cell(v) for v in row) + "]" for row in self.y)
        return f"[{self.x}, [{rows}], {self.z}]"


def _canonical_2x2(a, b, c, d):
    vals = (a, b, c, d)
    if not any(vals):
        return ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))
    if a * d - b * c != 0:
        return ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    if not a and not b:
        a, b = c, d
    if a:
        return ((Fraction(1), Fraction(b, a)), (Fraction(0), Fraction(0)))
    return ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0)))


def classify_trilinear(op: MultilinearOperation) -> TrilinearClass:
    """Canonical [x, Y, z] triple of the left ideal generated by op."""
    if op.arity != 3:
        raise StructureError("classification requires a trilinear operation")
    minv = _s3_minv()
    v = op.vector()
    u = [sum(minv[i][j] * v[j] for j in range(6)) for i in range(6)]
    return TrilinearClass(
        int(u[0] != 0),
        _canonical_2x2(u[1], u[2], u[3], u[4]),
        int(u[5] != 0),
    )


def left_translates(op: MultilinearOperation):
    """Rows spanning the left ideal, one per left-translating perm."""
    perms = all_perms(op.arity)
    index = {w: i for i, w in enumerate(perms)}
    rows = []
    for s in perms:
        row = [Fraction(0)] * len(perms)
        for w, c in op.terms.items():
            row[index[compose(s, w)]] += c
        rows.append(row)
    return rows

def same_left_ideal(op1: MultilinearOperation,
                    op2: MultilinearOperation) -> bool:
    t1 = left_translates(op1)
    t2 = left_translates(op2)
    r1 = rank_fraction(t1)
    r2 = rank_fraction(t2)
    return r1 == r2 == rank_fraction(t1 + t2)


@lru_cache(maxsize=None)
def _search_table():
    """All 15625 small-coefficient candidates with their class triples."""
    perms = all_perms(3)
    out = []
    for vec in product((0, 1, -1, 2, -2), repeat=6):
        op = MultilinearOperation(3, Poly(list(zip(perms, vec))))
        out.append((classify_trilinear(op), vec))
    return out

def simplify_search(target) -> MultilinearOperation:
    """Smallest operation in the class among coefficients {0,±1,±2}.

    Smallest means least max |coefficient|, then fewest terms, then
    lexicographically least after flipping signs so the leading
    coefficient is positive.
    """
    if isinstance(target, MultilinearOperation):
        target = classify_trilinear(target)
    best = None
    key = None
    for cls, vec in _search_table():
        if cls != target:
            continue
        lead = next((c for c in vec if c), 0)
        if lead < 0:
            vec = tuple(-c for c in vec)
        k = (max(abs(c) for c in vec) if any(vec) else 0,
             sum(1 for c in vec if c), vec)
        if key is None or k < key:
            best, key = vec, k
    if best is None:
        raise StructureError(f"class {target} not found in the search space")
    return MultilinearOperation(3, Poly(list(zip(all_perms(3), best))))
