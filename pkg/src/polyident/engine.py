"""Identity pipelines built on expansion matrices and row modules.

An identity here is a Poly whose keys are operation trees on the
variables 0..d-1, each variable once.  A set of identities is closed
under consequences by inserting whole symmetric-group orbits of their
coefficient vectors into a RowModule; higher degrees are reached by
lifting.  Everything numeric runs either exactly over Q (small cases)
or over F_p with p > degree, where the module lattice is the same.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as _it_product
from math import lcm

import numpy as np

from .kp import identity_profile, kp_part1, kp_part2
from .linalg import (DEFAULT_PRIME, RowModule, check_prime, inv_mod,
                     nullspace_fraction, nullspace_mod, rank_fraction,
                     rank_mod, rref_fraction, rref_mod, sparsest_first_order)
from .monomials import (MonomialBasis, Poly, StructureError, dialgebra_basis,
                        is_tree, label_shape, node, parse_expression,
                        relabel_tree, substitute_leaf, tree_leaves,
                        tree_shape, typed_association_types)
from .operations import MultilinearOperation, bso_transform, expand
from .perms import all_perms, clifton_batch, hook_dim, partition_str, partitions

__all__ = [
    "ConjectureReport", "DegreeComparison", "DerivedOperation",
    "ExpansionMatrix", "Extraction", "IrrepRankReport", "JacobiBasis",
    "LiftingSpec", "RelativeResult", "conjecture_check", "expand_derived",
    "expansion_matrix", "extract_new", "find_identities", "follows_from",
    "format_irrep_records", "format_irrep_table", "identity_module",
    "irrep_pipeline", "lift", "lift_to_degree", "orbit_rows",
    "reduce_monomials_jacobi", "relative_identities", "vector_residues",
]


# ---------------------------------------------------------------------------
# coefficient vectors over a monomial basis

def _coeff_residue(c, p: int) -> int:
    c = Fraction(c)
    den = c.denominator % p
    if den == 0:
        raise StructureError(f"denominator divisible by {p}")
    return c.numerator % p * inv_mod(den, p) % p


def _project(f: Poly, basis) -> Poly:
    """Rewrite a polynomial so that every key is a basis monomial."""
    reducer = getattr(basis, "reduce_poly", None)
    if reducer is not None:
        return reducer(f)
    out = []
    for t, c in f.items():
        m = basis.canonical(t)
        if m not in basis.index:
            raise StructureError(f"monomial outside basis: {t!r}")
        out.append((m, c))
    return Poly(out)


def vector_residues(f: Poly, basis, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Coefficient vector over the basis as residues mod p (float64)."""
    row = np.zeros(len(basis), dtype=np.float64)
    for t, c in _project(f, basis).items():
        row[basis.index[t]] = _coeff_residue(c, p)
    return row


def _cleared_vector(f: Poly, basis) -> tuple[np.ndarray, int]:
    """Integer coefficient vector and the denominator it was scaled by."""
    g = _project(f, basis)
    den = 1
    for _, c in g.items():
        den = lcm(den, Fraction(c).denominator)
    row = np.zeros(len(basis), dtype=np.int64)
    for t, c in g.items():
        row[basis.index[t]] = int(c * den)
    return row, den


# ---------------------------------------------------------------------------
# symmetric group orbits

_ACTION_TABLES: dict[int, tuple] = {}


def _action_table(basis) -> np.ndarray:
    """Column permutation table: entry (k, i) is where monomial i goes
    under permutation k.  Cached per basis object."""
    hit = _ACTION_TABLES.get(id(basis))
    if hit is not None and hit[0] is basis:
        return hit[1]
    perms = all_perms(basis.degree)
    table = np.empty((len(perms), len(basis)), dtype=np.int64)
    for i, m in enumerate(basis.monomials):
        for k, s in enumerate(perms):
            table[k, i] = basis.index[basis.canonical(relabel_tree(m, s))]
    _ACTION_TABLES[id(basis)] = (basis, table)
    return table


def orbit_rows(f: Poly, basis, p: int = DEFAULT_PRIME) -> np.ndarray:
    """All variable relabelings of f as residue rows, one per permutation."""
    if hasattr(basis, "reduce_poly"):
        # reduction can mix types, so the orbit is taken at the Poly level
        base = basis.reduce_poly(f)
        perms = all_perms(basis.degree)
        rows = np.zeros((len(perms), len(basis)), dtype=np.float64)
        for k, s in enumerate(perms):
            g = basis.reduce_poly(base.map_keys(lambda t: relabel_tree(t, s)))
            for t, c in g.items():
                rows[k, basis.index[t]] = _coeff_residue(c, p)
        return rows
    vec = vector_residues(f, basis, p)
    table = _action_table(basis)
    rows = np.zeros(table.shape, dtype=np.float64)
    rows[np.arange(len(table))[:, None], table] = vec[np.newaxis, :]
    return rows


def identity_module(identities, basis, p: int = DEFAULT_PRIME) -> RowModule:
    """Smallest permutation-stable row module containing the identities."""
    mod = RowModule(len(basis), p)
    for f in identities:
        mod.insert(orbit_rows(f, basis, p))
    return mod


# ---------------------------------------------------------------------------
# expansion matrices

@dataclass(frozen=True)
class ExpansionMatrix:
    """Expansions of every basis monomial, one column per monomial.

    Rows are indexed by the expansion target's own basis: plain words
    for an associative algebra, normal-form monomials for a dialgebra.
    The kernel consists of the identities of the operations.
    """

    ops: tuple
    target: str
    basis: MonomialBasis
    rows: tuple
    matrix: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def residues(self, p: int = DEFAULT_PRIME) -> np.ndarray:
        check_prime(p, self.basis.degree)
        return (self.matrix % p).astype(np.uint8)

    def rank(self, field="fraction") -> int:
        if field == "fraction":
            return rank_fraction(self.matrix.tolist())
        return rank_mod(self.residues(field), field)

    def nullspace_rows(self, p: int = DEFAULT_PRIME) -> np.ndarray:
        """Canonical kernel basis as residue rows (uint8)."""
        return nullspace_mod(self.residues(p), p)

    def nullspace(self, field="fraction") -> list[Poly]:
        """Canonical kernel basis re-encoded as identities."""
        mons = self.basis.monomials
        if field == "fraction":
            return [Poly(zip(mons, v))
                    for v in nullspace_fraction(self.matrix.tolist())]
        half = field // 2
        return [Poly([(m, int(c) - field if c > half else int(c))
                      for m, c in zip(mons, r) if c])
                for r in self.nullspace_rows(field)]


def _cleared_operations(ops) -> list:
    """Scale operations to integer coefficients.

    Every monomial of fixed degree has the same node count, so scaling
    a single operation scales all expansion columns alike and the
    kernel is unchanged.  With several operations the powers would
    differ per column, so fractions are rejected there.
    """
    out = []
    for op in ops:
        den = 1
        for _, c in op.terms.items():
            den = lcm(den, c.denominator)
        if den == 1:
            out.append(op)
        elif len(ops) == 1:
            out.append(type(op)(op.arity, den * op.terms))
        else:
            raise StructureError(
                "fractional coefficients need a lone operation")
    return out


def expansion_matrix(ops, degree: int, target: str = "algebra",
                     basis=None) -> ExpansionMatrix:
    if isinstance(ops, (MultilinearOperation,)) or hasattr(ops, "arity"):
        ops = [ops]
    ops = _cleared_operations(list(ops))
    arities = {op.arity for op in ops}
    if len(arities) != 1:
        raise StructureError("operations must share one arity")
    arity = arities.pop()
    if basis is None:
        basis = MonomialBasis(arity, degree, len(ops))
    elif basis.degree != degree:
        raise StructureError(
            f"basis degree {basis.degree} does not match {degree}")
    if target == "algebra":
        rows = all_perms(degree)
    elif target == "dialgebra":
        rows = tuple(dialgebra_basis(degree))
    else:
        raise StructureError(f"unknown target: {target!r}")
    rindex = {r: i for i, r in enumerate(rows)}
    mat = np.zeros((len(rows), len(basis)), dtype=np.int64)
    for j, m in enumerate(basis.monomials):
        for key, c in expand(m, ops, target).items():
            mat[rindex[key], j] = int(c)
    return ExpansionMatrix(tuple(ops), target, basis, rows, mat)


def find_identities(ops, degree: int, target: str = "algebra",
                    field="fraction", basis=None) -> list[Poly]:
    """Identities of the operations in one degree (canonical kernel basis)."""
    return expansion_matrix(ops, degree, target, basis).nullspace(field)


# ---------------------------------------------------------------------------
# lifting identities to higher degree

@dataclass(frozen=True)
class LiftingSpec:
    """Consequences of one identity a single degree step up.

    An identity of degree d in operations of arity m yields, per
    operation symbol, d substitutions (a variable is replaced by the
    operation applied to it and fresh variables) and m multiplications
    (the identity becomes one argument of the operation), all of
    degree d + m - 1.
    """

    degree: int
    arity: int
    nsymbols: int = 1

    def __post_init__(self):
        if self.degree < 1 or self.arity < 2 or self.nsymbols < 1:
            raise StructureError("lifting needs degree >= 1 and arity >= 2")

    @property
    def output_degree(self) -> int:
        return self.degree + self.arity - 1

    def apply(self, f: Poly) -> list[Poly]:
        fresh = tuple(range(self.degree, self.output_degree))
        out = []
        for slot in range(self.degree):
            for sym in range(self.nsymbols):
                rep = node(sym, slot, *fresh)
                out.append(f.map_keys(
                    lambda t, v=slot, r=rep: substitute_leaf(t, v, r)))
        for pos in range(self.arity):
            for sym in range(self.nsymbols):
                pre, post = fresh[:pos], fresh[pos:]
                out.append(f.map_keys(
                    lambda t, a=pre, b=post, s=sym: node(s, *a, t, *b)))
        return out


def lift(identity: Poly, steps: int = 1,
         nsymbols: int | None = None) -> list[Poly]:
    """All consequences after the given number of lifting steps."""
    if steps < 0:
        raise StructureError("steps must be nonnegative")
    out = [identity]
    for _ in range(steps):
        nxt = []
        for f in out:
            d, m, ns = identity_profile(f)
            if m is None:
                raise StructureError("cannot lift without an operation")
            spec = LiftingSpec(d, m, nsymbols if nsymbols is not None
                               else max(ns, 1))
            nxt.extend(spec.apply(f))
        out = nxt
    return out


def lift_to_degree(identity: Poly, degree: int,
                   nsymbols: int | None = None) -> list[Poly]:
    """Lift until the target degree, which must be reachable exactly."""
    d, m, _ = identity_profile(identity)
    if m is None:
        raise StructureError("cannot lift without an operation")
    steps, rem = divmod(degree - d, m - 1)
    if rem or steps < 0:
        raise StructureError(
            f"degree {degree} unreachable from {d} with arity {m}")
    return lift(identity, steps, nsymbols)


# ---------------------------------------------------------------------------
# new-identity extraction and membership

@dataclass(frozen=True)
class Extraction:
    """One retained candidate with the module ranks around it."""

    index: int          # 1-based position in the sparsest-first order
    identity: Poly
    rank_before: int
    rank_after: int


def _residue_flags(rows: np.ndarray, mod: RowModule,
                   chunk: int = 2048) -> np.ndarray:
    out = np.zeros(len(rows), dtype=bool)
    for i0 in range(0, len(rows), chunk):
        out[i0:i0 + chunk] = mod.residue(rows[i0:i0 + chunk]).any(axis=1)
    return out


def extract_new(candidates, old, degree: int | None = None, *,
                basis=None, prime: int = DEFAULT_PRIME,
                stop_rank: int | None = None) -> list[Extraction]:
    """Candidates that enlarge the module generated by the old identities.

    Candidates are sorted by increasing number of nonzero coefficients,
    ties broken lexicographically on the coefficient vectors, and
    walked in that order; whenever one does not reduce to zero against
    the current module its whole orbit is inserted and the rest are
    retested.  Stops early once stop_rank is reached.
    """
    candidates = list(candidates)
    old = list(old)
    if basis is None:
        probe = candidates[0] if candidates else old[0]
        d, m, ns = identity_profile(probe)
        basis = MonomialBasis(m, degree if degree is not None else d,
                              max(ns, 1))
    if degree is not None and basis.degree != degree:
        raise StructureError(
            f"basis degree {basis.degree} does not match {degree}")
    mod = identity_module(old, basis, prime)
    if not candidates:
        return []
    rows = np.zeros((len(candidates), len(basis)), dtype=np.uint8)
    for i, f in enumerate(candidates):
        rows[i] = vector_residues(f, basis, prime)
    order = sparsest_first_order(rows)
    flags = _residue_flags(rows, mod)
    out = []
    for pos, ci in enumerate(order):
        if not flags[ci]:
            continue
        before = mod.rank
        mod.insert(orbit_rows(candidates[ci], basis, prime))
        out.append(Extraction(pos + 1, candidates[ci], before, mod.rank))
        if stop_rank is not None and mod.rank >= stop_rank:
            break
        flags = _residue_flags(rows, mod)
    return out


def follows_from(identity: Poly, generators, degree: int | None = None, *,
                 basis=None, prime: int = DEFAULT_PRIME) -> bool:
    """Is the identity a consequence of the generators?

    The generators are lifted to the identity's degree and closed under
    relabeling; membership of the single coefficient vector suffices
    because the module is permutation stable.
    """
    d, m, ns = identity_profile(identity)
    if degree is not None and degree != d:
        raise StructureError(f"identity has degree {d}, not {degree}")
    if m is None:
        return not identity
    if basis is None:
        basis = MonomialBasis(m, d, max(ns, 1))
    mod = RowModule(len(basis), prime)
    for g in generators:
        for h in lift_to_degree(g, d, getattr(basis, "nsymbols", 1)):
            mod.insert(orbit_rows(h, basis, prime))
    return mod.contains(vector_residues(identity, basis, prime)[np.newaxis])


# ---------------------------------------------------------------------------
# the reduced ternary monomial basis

def _shape_retained(shape) -> bool:
    if shape is None:
        return True
    x, _, z = shape[2:]
    if is_tree(x) and not is_tree(z):
        return False
    return all(_shape_retained(c) for c in shape[2:])


def _tree_retained(t) -> bool:
    if not is_tree(t):
        return True
    x, y, z = t[2:]
    if not (is_tree(x) or is_tree(y) or is_tree(z)):
        return not (x > y and x > z)
    return all(_tree_retained(c) for c in t[2:])


class JacobiBasis:
    """Multilinear ternary monomials reduced by the cyclic-sum identity.

    The cyclic sum (a,b,c) + (b,c,a) + (c,a,b) rewrites any node as
    minus the two cyclic shifts of its arguments.  That eliminates
    every association type embedding a node whose first argument is
    composite while its third is simple, and within a node with three
    simple arguments it forbids the largest one standing first.
    reduce_tree rewrites arbitrary monomials onto the survivors.
    """

    def __init__(self, degree: int):
        if degree < 3 or degree % 2 == 0:
            raise StructureError("ternary degrees are odd and at least 3")
        self.arity = 3
        self.degree = degree
        self.nsymbols = 1
        self.types = tuple(s for s in typed_association_types(3, degree)
                           if _shape_retained(s))
        mons = []
        for s in self.types:
            for w in all_perms(degree):
                t = label_shape(s, w)
                if _tree_retained(t):
                    mons.append(t)
        self.monomials = tuple(mons)
        self.index = {m: i for i, m in enumerate(mons)}
        self._cache: dict = {}

    def __len__(self) -> int:
        return len(self.monomials)

    def _node(self, x, y, z) -> dict:
        # arguments are already reduced
        leafy = not (is_tree(x) or is_tree(y) or is_tree(z))
        if (is_tree(x) and not is_tree(z)) or (leafy and x > y and x > z):
            out: dict = {}
            for a, b, c in ((y, z, x), (z, x, y)):
                for k, v in self._node(a, b, c).items():
                    w = out.get(k, 0) - v
                    if w:
                        out[k] = w
                    else:
                        del out[k]
            return out
        return {node(0, x, y, z): 1}

    def reduce_tree(self, t) -> dict:
        """Expansion of one monomial over the basis, as a dict."""
        if not is_tree(t):
            return {t: 1}
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        if t[1] != 0:
            raise StructureError("a single ternary operation is expected")
        parts = [self.reduce_tree(c) for c in t[2:]]
        acc: dict = {}
        for (x, cx), (y, cy), (z, cz) in _it_product(
                *(p.items() for p in parts)):
            c = cx * cy * cz
            for k, v in self._node(x, y, z).items():
                w = acc.get(k, 0) + c * v
                if w:
                    acc[k] = w
                else:
                    del acc[k]
        self._cache[t] = acc
        return acc

    def reduce_poly(self, f: Poly) -> Poly:
        out: dict = {}
        for t, c in f.items():
            for k, v in self.reduce_tree(t).items():
                w = out.get(k, 0) + c * v
                if w:
                    out[k] = w
                else:
                    del out[k]
        return Poly(out)

    def __repr__(self) -> str:
        return f"JacobiBasis(degree={self.degree}, size={len(self)})"


@lru_cache(maxsize=None)
def reduce_monomials_jacobi(degree: int) -> JacobiBasis:
    """Shared reduced basis per degree (17920 monomials at degree 7)."""
    return JacobiBasis(degree)


# ---------------------------------------------------------------------------
# operations derived from other operations

@dataclass(frozen=True)
class DerivedOperation:
    """Multilinear operation written as a tree polynomial over others."""

    arity: int
    terms: Poly

    @classmethod
    def from_text(cls, text: str, arity: int | None = None):
        return cls.from_poly(parse_expression(text), arity)

    @classmethod
    def from_poly(cls, p: Poly, arity: int | None = None):
        for t in p.terms:
            if not is_tree(t):
                raise StructureError(f"not an operation tree: {t!r}")
            leaves = tree_leaves(t)
            if arity is None:
                arity = len(leaves)
            if sorted(leaves) != list(range(arity)):
                raise StructureError(
                    f"term is not multilinear of arity {arity}: {t!r}")
        if arity is None:
            raise StructureError("arity required for the zero operation")
        return cls(arity, p)


def _graft(t, args):
    if not is_tree(t):
        return args[t]
    return t[:2] + tuple(_graft(c, args) for c in t[2:])


def expand_derived(m, ops) -> Poly:
    """Rewrite a monomial in derived operations over the underlying ones."""
    if not is_tree(m):
        return Poly.monomial(m)
    sym = m[1]
    if not 0 <= sym < len(ops):
        raise StructureError(f"no derived operation for symbol {sym}")
    op = ops[sym]
    if op.arity != len(m) - 2:
        raise StructureError(f"arity mismatch at symbol {sym}")
    parts = [expand_derived(c, ops) for c in m[2:]]
    acc: dict = {}
    for u, cu in op.terms.items():
        for combo in _it_product(*(p.items() for p in parts)):
            c = cu
            for _, ck in combo:
                c = c * ck
            k = _graft(u, tuple(t for t, _ in combo))
            w = acc.get(k, 0) + c
            if w:
                acc[k] = w
            else:
                del acc[k]
    return Poly(acc)


@dataclass(frozen=True)
class RelativeResult:
    """Identities of derived operations modulo given underlying ones."""

    shape: tuple[int, int]
    rank: int
    discarded: int
    identities: tuple[Poly, ...]
    residue: tuple[tuple, ...]
    derived_basis: MonomialBasis
    word_basis: MonomialBasis
    matrix: np.ndarray | None = field(default=None, repr=False)


def relative_identities(ops, given, degree: int, *, symmetries=(),
                        field="fraction",
                        keep_matrix: bool = False) -> RelativeResult:
    """Identities of derived operations relative to given identities.

    Builds the block matrix [R 0; X I]: R holds all permutations of
    the given identities' liftings to the degree, X the expansions of
    the derived-operation monomials, I a unit tag per such monomial.
    Row-reducing, the rows whose leading entry falls in the right block
    express identities of the derived operations that hold modulo the
    given ones; rows leading in the left block are discarded.
    """
    ops = list(ops)
    if not ops:
        raise StructureError("at least one derived operation is needed")
    arities = {op.arity for op in ops}
    if len(arities) != 1:
        raise StructureError("derived operations must share one arity")
    under_arity = None
    under_syms = 1
    for op in ops:
        for t, _ in op.terms.items():
            for nd in _iter_nodes(t):
                if under_arity is None:
                    under_arity = len(nd) - 2
                elif under_arity != len(nd) - 2:
                    raise StructureError("underlying arities are mixed")
                under_syms = max(under_syms, nd[1] + 1)
    if under_arity is None:
        raise StructureError("derived operations carry no operation nodes")
    for g in given:
        _, _, ns = identity_profile(g)
        under_syms = max(under_syms, ns)
    word_basis = MonomialBasis(under_arity, degree, under_syms)
    derived_basis = MonomialBasis(arities.pop(), degree, len(ops),
                                  tuple(symmetries))
    perms = all_perms(degree)
    upper = []
    for g in given:
        for h in lift_to_degree(g, degree, under_syms):
            for s in perms:
                row, _ = _cleared_vector(
                    h.map_keys(lambda t, q=s: relabel_tree(t, q)), word_basis)
                upper.append(row)
    n_upper, n_left = len(upper), len(word_basis)
    mat = np.zeros((n_upper + len(derived_basis),
                    n_left + len(derived_basis)), dtype=np.int64)
    if upper:
        mat[:n_upper, :n_left] = np.vstack(upper)
    for i, m in enumerate(derived_basis.monomials):
        row, den = _cleared_vector(expand_derived(m, ops), word_basis)
        mat[n_upper + i, :n_left] = row
        mat[n_upper + i, n_left + i] = den
    if field == "fraction":
        rows, piv = rref_fraction(mat.tolist())
        tail = [tuple(r[n_left:]) for r in rows]
    else:
        check_prime(field, degree)
        basis8, piv8 = rref_mod((mat % field).astype(np.uint8), field)
        half = field // 2
        piv = [int(c) for c in piv8]
        tail = [tuple(int(c) - field if c > half else int(c)
                      for c in r[n_left:]) for r in basis8]
    mons = derived_basis.monomials
    identities = []
    residue = []
    for k, c in enumerate(piv):
        if c >= n_left:
            residue.append(tail[k])
            identities.append(Poly([(m, v) for m, v in zip(mons, tail[k])
                                    if v]))
    return RelativeResult(
        shape=mat.shape, rank=len(piv), discarded=len(piv) - len(identities),
        identities=tuple(identities), residue=tuple(residue),
        derived_basis=derived_basis, word_basis=word_basis,
        matrix=mat if keep_matrix else None)


def _iter_nodes(t):
    if is_tree(t):
        yield t
        for c in t[2:]:
            yield from _iter_nodes(c)


# ---------------------------------------------------------------------------
# per-irreducible rank reports

@dataclass(frozen=True)
class IrrepRankReport:
    """Ranks of the lifted and expansion matrices in one isotypic block."""

    partition: tuple[int, ...]
    dim: int
    lifrank: int
    exprank: int
    toprank: int
    allrank: int


def _term_data(f: Poly, type_index: dict, p: int) -> list:
    out = []
    for t, c in f.items():
        out.append((type_index[tree_shape(t)], tree_leaves(t),
                    _coeff_residue(c, p)))
    return out


def _irrep_report(lam, lifted_terms, expansion_terms, words, p) -> IrrepRankReport:
    d = hook_dim(lam)
    ntypes = len(expansion_terms)
    reps = clifton_batch(lam, words)
    lifted = np.zeros((len(lifted_terms) * d, ntypes * d), dtype=np.uint8)
    for i, terms in enumerate(lifted_terms):
        acc = np.zeros((d, ntypes * d), dtype=np.int64)
        for ti, wi, c in terms:
            acc[:, ti * d:(ti + 1) * d] += c * reps[wi]
        lifted[i * d:(i + 1) * d] = acc % p
    lifrank = len(rref_mod(lifted, p)[1])
    del lifted
    expn = np.zeros((ntypes * d, (ntypes + 1) * d), dtype=np.uint8)
    for i, terms in enumerate(expansion_terms):
        acc = np.zeros((d, d), dtype=np.int64)
        for wi, c in terms:
            acc += c * reps[wi]
        expn[i * d:(i + 1) * d, :d] = acc % p
        expn[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = np.eye(d,
                                                                  dtype=np.uint8)
    _, piv = rref_mod(expn, p)
    exprank = len(piv)
    toprank = int((piv < d).sum())
    return IrrepRankReport(lam, d, lifrank, exprank, toprank,
                           exprank - toprank)


def irrep_pipeline(ops, generators, degree: int, *, parts=None,
                   max_dim: int | None = None, prime: int = DEFAULT_PRIME,
                   threads: int = 1) -> list[IrrepRankReport]:
    """Rank reports of the consequence and expansion matrices, split by
    irreducible representation of the symmetric group.

    For each partition of the degree, the generators' liftings become a
    stacked matrix of d x d representation blocks, one block column per
    association type (lifrank); the expansion matrix gets one leading
    block column for the word space plus a unit tag per type, and its
    row canonical form splits into rows leading in the word block
    (toprank) and the rest (allrank).  Identities of the operations
    exist in a partition exactly where allrank exceeds lifrank.
    """
    if hasattr(ops, "arity"):
        ops = [ops]
    ops = _cleared_operations(list(ops))
    if len(ops) != 1:
        raise StructureError("one operation per irrep run")
    op = ops[0]
    check_prime(prime, degree)
    types = typed_association_types(op.arity, degree)
    type_index = {t: i for i, t in enumerate(types)}
    lifted = [h for g in generators
              for h in lift_to_degree(g, degree, 1)]
    word_index: dict = {}
    lifted_terms = []
    for f in lifted:
        terms = []
        for t, c in f.items():
            w = tree_leaves(t)
            wi = word_index.setdefault(w, len(word_index))
            terms.append((type_index[tree_shape(t)], wi,
                          _coeff_residue(c, prime)))
        lifted_terms.append(terms)
    expansion_terms = []
    ident = tuple(range(degree))
    for s in types:
        terms = []
        for w, c in expand(label_shape(s, ident), ops).items():
            wi = word_index.setdefault(w, len(word_index))
            terms.append((wi, _coeff_residue(c, prime)))
        expansion_terms.append(terms)
    words = list(word_index)
    if parts is None:
        parts = partitions(degree)
    else:
        parts = [tuple(lam) for lam in parts]
    if max_dim is not None:
        parts = [lam for lam in parts if hook_dim(lam) <= max_dim]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {lam: pool.submit(_irrep_report, lam, lifted_terms,
                                     expansion_terms, words, prime)
                    for lam in parts}
            return [futs[lam].result() for lam in parts]
    return [_irrep_report(lam, lifted_terms, expansion_terms, words, prime)
            for lam in parts]


def format_irrep_table(reports) -> str:
    """Aligned text table, one row per partition."""
    head = ("#", "partition", "dim", "lifrank", "exprank", "toprank",
            "allrank")
    body = [(str(i + 1), partition_str(r.partition), str(r.dim),
             str(r.lifrank), str(r.exprank), str(r.toprank), str(r.allrank))
            for i, r in enumerate(reports)]
    widths = [max(len(row[c]) for row in [head] + body)
              for c in range(len(head))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths))
             for row in [head] + body]
    return "\n".join(lines)


def format_irrep_records(reports) -> str:
    """Machine-readable companion: one key=value record line per row."""
    lines = []
    for i, r in enumerate(reports):
        lines.append(" ".join((f"row={i + 1}",
                               f"partition={partition_str(r.partition)}",
                               f"dim={r.dim}", f"lifrank={r.lifrank}",
                               f"exprank={r.exprank}",
                               f"toprank={r.toprank}",
                               f"allrank={r.allrank}")))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# comparing the transformed identities with the hatted operations' own

@dataclass(frozen=True)
class DegreeComparison:
    degree: int
    kp_rank: int
    direct_rank: int
    equal: bool


@dataclass(frozen=True)
class ConjectureReport:
    """Degree-by-degree comparison of two identity modules."""

    arity: int
    degree: int
    comparisons: tuple[DegreeComparison, ...]

    @property
    def equal(self) -> bool:
        return all(c.equal for c in self.comparisons)

    def __bool__(self) -> bool:
        return self.equal


def conjecture_check(op: MultilinearOperation, degree: int, *,
                     prime: int = DEFAULT_PRIME) -> ConjectureReport:
    """Do the transformed identities of an operation generate all
    identities of its hatted counterparts?

    For each reachable degree up to the bound, the consequence module
    of the re-subscripted identities (central-variable images of the
    operation's own identities, plus the interchangeability identities
    at degree 2m - 1) is compared with the full kernel of the hatted
    operations' dialgebra expansion matrix.
    """
    m = op.arity
    if degree < m:
        raise StructureError(f"degree must be at least the arity {m}")
    check_prime(prime, degree)
    hatted = bso_transform(op)
    gens: list[tuple[int, Poly]] = []
    comps = []
    for e in range(m, degree + 1, m - 1):
        for f in find_identities([op], e, "algebra", field=prime):
            for g in kp_part1(f, m):
                gens.append((e, g))
        if e == 2 * m - 1:
            for g in kp_part2(m):
                gens.append((e, g))
        basis = MonomialBasis(m, e, m)
        direct = RowModule(len(basis), prime)
        direct.insert(
            expansion_matrix(hatted, e, "dialgebra", basis).nullspace_rows(
                prime))
        transformed = RowModule(len(basis), prime)
        for dg, g in gens:
            steps = (e - dg) // (m - 1)
            for h in lift(g, steps, m):
                transformed.insert(orbit_rows(h, basis, prime))
        comps.append(DegreeComparison(e, transformed.rank, direct.rank,
                                      transformed == direct))
    return ConjectureReport(m, degree, tuple(comps))
