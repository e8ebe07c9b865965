"""Conversion of algebra identities into dialgebra operation identities.

The Kolesnikov-Pozhidaev construction replaces one n-ary operation by n
indexed operations.  Part 1 re-subscripts every operation occurrence of
a monomial by where a chosen central variable sits relative to that
occurrence; Part 2 makes the indexed operations interchangeable in any
argument other than the one holding the central variable.  Relations of
degree n among the new operations are promoted to rewrite rules so that
superfluous operations can be eliminated again.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from .linalg import DEFAULT_PRIME, RowModule, rref_fraction
from .monomials import (
    MonomialBasis,
    Poly,
    StructureError,
    is_tree,
    relabel_tree,
    tree_leaves,
)
from .perms import all_perms

__all__ = [
    "IdentitySpan",
    "KPResult",
    "RewriteRule",
    "detect_rewrites",
    "eliminate_operations",
    "identity_profile",
    "kp_part1",
    "kp_part2",
    "kp_transform",
]


def _nodes(t):
    if is_tree(t):
        yield t
        for c in t[2:]:
            yield from _nodes(c)


def identity_profile(identity: Poly):
    """(degree, arity, nsymbols) of a multilinear identity.

    arity is None and nsymbols is 0 when no operation occurs at all.
    Raises for non-multilinear or mixed-degree input.
    """
    if not identity:
        raise StructureError("empty identity")
    degree = arity = None
    nsyms = 0
    for t in identity.terms:
        if not (is_tree(t) or isinstance(t, int)):
            raise StructureError(
                f"identity monomials must be operation trees: {t!r}")
        leaves = tree_leaves(t)
        if sorted(leaves) != list(range(len(leaves))):
            raise StructureError(f"monomial is not multilinear: {t!r}")
        if degree is None:
            degree = len(leaves)
        elif degree != len(leaves):
            raise StructureError("mixed degrees in one identity")
        for node in _nodes(t):
            n = len(node) - 2
            if arity is None:
                arity = n
            elif arity != n:
                raise StructureError("mixed operation arities")
            nsyms = max(nsyms, node[1] + 1)
    return degree, arity, nsyms


def _flood(t, sym: int):
    if not is_tree(t):
        return t
    return ("op", sym) + tuple(_flood(c, sym) for c in t[2:])


def _resubscript(t, v: int, n: int):
    if not is_tree(t):
        return t
    kids = t[2:]
    for j, c in enumerate(kids):
        if v in tree_leaves(c):
            new = []
            for i, k in enumerate(kids):
                if i == j:
                    new.append(_resubscript(k, v, n))
                else:
                    # a sibling subtree lies entirely on one side of the
                    # central variable: left of it means the variable is
                    # to the right of every operation inside
                    new.append(_flood(k, n - 1 if i < j else 0))
            return ("op", j) + tuple(new)
    raise StructureError("central variable missing from subtree")


def kp_part1(identity: Poly, arity: int | None = None) -> list[Poly]:
    """One re-subscripted identity per central variable, in variable order."""
    degree, ar, nsyms = identity_profile(identity)
    if nsyms > 1:
        raise StructureError("input identity must use a single operation")
    if ar is not None and arity is not None and ar != arity:
        raise StructureError(f"identity arity {ar} contradicts {arity}")
    n = ar if ar is not None else arity
    if n is None:
        raise StructureError("cannot infer the arity; pass arity=")
    return [identity.map_keys(lambda t: _resubscript(t, v, n))
            for v in range(degree)]


def _nest(outer: int, pos: int, inner: int, n: int):
    kids = []
    nxt = 0
    for slot in range(n):
        if slot == pos:
            kids.append(("op", inner) + tuple(range(nxt, nxt + n)))
            nxt += n
        else:
            kids.append(nxt)
            nxt += 1
    return ("op", outer) + tuple(kids)


def kp_part2(arity: int) -> list[Poly]:
    """Interchangeability identities for the indexed operations.

    For every operation j, argument position i != j, and index k >= 2,
    the first and the k-th operation agree inside argument i of
    operation j; these differences span all pairwise interchanges.
    n(n-1)^2 identities of degree 2n-1; empty for a unary operation.
    """
    n = arity
    if n < 1:
        raise StructureError("arity must be positive")
    out = []
    for jj in range(n):
        for ii in range(n):
            if ii == jj:
                continue
            for ell in range(1, n):
                out.append(Poly({_nest(jj, ii, 0, n): Fraction(1),
                                 _nest(jj, ii, ell, n): Fraction(-1)}))
    return out


@dataclass(frozen=True)
class RewriteRule:
    """Replace one operation symbol by an expression in other symbols.

    The replacement is a combination of single operations applied to
    the argument slots 0..n-1, each slot exactly once per monomial.
    """
    symbol: int
    replacement: Poly

    def __post_init__(self):
        arity = None
        for t in self.replacement.terms:
            if not (is_tree(t) and all(isinstance(c, int) for c in t[2:])):
                raise StructureError(
                    "replacement must combine single operations")
            n = len(t) - 2
            if sorted(t[2:]) != list(range(n)) or arity not in (None, n):
                raise StructureError(
                    "replacement arguments must permute the slots")
            arity = n
            if t[1] == self.symbol:
                raise StructureError("rule rewrites a symbol to itself")

    @property
    def arity(self) -> int:
        return len(next(iter(self.replacement.terms))) - 2


def detect_rewrites(identities) -> list[RewriteRule]:
    """Promote degree-n relations among single operations to rewrite rules.

    Scans the identities whose every monomial is one operation applied
    to bare variables, closes them under relabeling, and row-reduces
    with higher operation symbols eliminated first.  A pivot on the
    identity permutation of a symbol gives a rule expressing it through
    lower symbols; an unresolved relation (a mere symmetry, say) gives
    no rule.  Symbol 0 is always retained.
    """
    flat = []
    arity = None
    nsyms = 1
    for f in identities:
        if not f:
            continue
        _, ar, ns = identity_profile(f)
        if ar is None:
            continue
        if not all(is_tree(t) and all(isinstance(c, int) for c in t[2:])
                   for t in f.terms):
            continue
        if arity is None:
            arity = ar
        elif arity != ar:
            raise StructureError("mixed arities across identities")
        nsyms = max(nsyms, ns)
        flat.append(f)
    if not flat:
        return []
    n = arity
    perms = all_perms(n)
    colkeys = [(s, sigma) for s in range(nsyms - 1, -1, -1)
               for sigma in perms]
    col = {k: i for i, k in enumerate(colkeys)}
    rows = []
    for f in flat:
        for rho in perms:
            g = f.map_keys(lambda t: relabel_tree(t, rho))
            row = [Fraction(0)] * len(col)
            for t, c in g.items():
                row[col[(t[1], t[2:])]] = c
            rows.append(row)
    reduced, pivots = rref_fraction(rows)
    ident = tuple(range(n))
    rules = []
    for r, pc in zip(reduced, pivots):
        s, sigma = colkeys[pc]
        if sigma != ident or s == 0:
            continue
        if any(colkeys[j][0] == s and r[j] for j in range(len(r))
               if j != pc):
            continue
        repl = Poly()
        for j, c in enumerate(r):
            if j != pc and c:
                repl = repl + (-c) * Poly.monomial(
                    ("op", colkeys[j][0]) + colkeys[j][1])
        rules.append(RewriteRule(s, repl))
    return sorted(rules, key=lambda r: r.symbol)


def _apply_symbol(sym: int, kid_polys) -> Poly:
    out = Poly()
    for combo in product(*(kp.items() for kp in kid_polys)):
        coeff = Fraction(1)
        kids = []
        for k, c in combo:
            kids.append(k)
            coeff *= c
        out = out + coeff * Poly.monomial(("op", sym) + tuple(kids))
    return out


def _rewrite_tree(t, bysym) -> Poly:
    if not is_tree(t):
        return Poly.monomial(t)
    kid_polys = [_rewrite_tree(c, bysym) for c in t[2:]]
    repl = bysym.get(t[1])
    if repl is None:
        return _apply_symbol(t[1], kid_polys)
    out = Poly()
    for pat, c in repl.items():
        out = out + c * _apply_symbol(pat[1],
                                      [kid_polys[a] for a in pat[2:]])
    return out


def _rewrite_poly(f: Poly, bysym) -> Poly:
    if not bysym:
        return f
    return f.map_keys(lambda t: _rewrite_tree(t, bysym))


def eliminate_operations(identities, rules, deduplicate: bool = True,
                         prime: int = DEFAULT_PRIME) -> list[Poly]:
    """Rewrite away ruled symbols, then drop equivalent identities.

    Rules may chain but not cycle.  With deduplicate on, an identity is
    dropped when its relabelings lie in the span of those already kept;
    the comparison is per degree, so lower-degree identities never
    absorb higher-degree ones (lifting is a separate concern).
    """
    bysym = {}
    for r in rules:
        if r.symbol in bysym:
            raise StructureError(f"two rules for operation {r.symbol}")
        bysym[r.symbol] = r.replacement
    for _ in range(len(bysym)):
        pending = {s: repl for s, repl in bysym.items()
                   if any(t[1] in bysym for t in repl.terms)}
        if not pending:
            break
        for s, repl in pending.items():
            others = {k: v for k, v in bysym.items() if k != s}
            bysym[s] = _rewrite_poly(repl, others)
    if any(t[1] in bysym for repl in bysym.values() for t in repl.terms):
        raise StructureError("circular rewrite rules")

    out = []
    for f in identities:
        g = _rewrite_poly(f, bysym)
        if g:
            out.append(g)
    if not deduplicate or not out:
        return out
    arity = None
    nsyms = 1
    for g in out:
        _, ar, ns = identity_profile(g)
        if ar is not None:
            if arity is None:
                arity = ar
            elif arity != ar:
                raise StructureError("mixed arities across identities")
            nsyms = max(nsyms, ns)
    if arity is None:
        # no operations anywhere: every identity is a multiple of x
        return out[:1]
    spans: dict[int, IdentitySpan] = {}
    kept = []
    for g in out:
        d, _, _ = identity_profile(g)
        span = spans.get(d)
        if span is None:
            span = spans[d] = IdentitySpan(arity, d, nsyms, prime)
        if span.insert(g):
            kept.append(g)
    return kept


class IdentitySpan:
    """Row module spanned by all relabelings of the stored identities."""

    def __init__(self, arity: int, degree: int, nsymbols: int = 1,
                 prime: int = DEFAULT_PRIME):
        self.basis = MonomialBasis(arity, degree, nsymbols)
        self.module = RowModule(len(self.basis), prime)
        self._perms = all_perms(degree)

    def vector(self, identity: Poly) -> list[int]:
        """Integer coefficient row (denominators cleared)."""
        den = lcm(*(c.denominator for c in identity.terms.values())) \
            if identity else 1
        row = [0] * len(self.basis)
        for t, c in identity.items():
            try:
                row[self.basis.index[t]] = int(c * den)
            except KeyError:
                raise StructureError(
                    f"monomial outside the basis: {t!r}") from None
        return row

    def rows(self, identity: Poly) -> list[list[int]]:
        return [self.vector(identity.map_keys(
            lambda t: relabel_tree(t, rho))) for rho in self._perms]

    def insert(self, identity: Poly) -> int:
        """Rank increase from adding the identity's relabelings."""
        return self.module.insert(self.rows(identity))

    def contains(self, identity: Poly) -> bool:
        return self.module.contains(self.rows(identity))

    @property
    def rank(self) -> int:
        return self.module.rank

    def __eq__(self, other) -> bool:
        if not isinstance(other, IdentitySpan):
            return NotImplemented
        return self.basis == other.basis and self.module == other.module

    @classmethod
    def span(cls, identities, nsymbols: int | None = None,
             prime: int = DEFAULT_PRIME) -> "IdentitySpan":
        ids = list(identities)
        if not ids:
            raise StructureError("no identities to span")
        profiles = [identity_profile(f) for f in ids]
        degrees = {p[0] for p in profiles}
        arities = {p[1] for p in profiles if p[1] is not None}
        if len(degrees) != 1 or len(arities) != 1:
            raise StructureError("span needs one degree and one arity")
        ns = nsymbols if nsymbols is not None else max(p[2]
                                                       for p in profiles)
        out = cls(arities.pop(), degrees.pop(), ns, prime)
        for f in ids:
            out.insert(f)
        return out


@dataclass
class KPResult:
    arity: int
    part1: list[Poly]
    part2: list[Poly]
    rules: list[RewriteRule]
    identities: list[Poly]


def kp_transform(identities, arity: int | None = None,
                 auto_eliminate: bool = True,
                 prime: int = DEFAULT_PRIME) -> KPResult:
    """Run both parts, detect rewrite rules, and eliminate.

    `identities` are multilinear identities in a single operation; the
    result holds the raw per-part output, the detected rules, and the
    independent identities that survive elimination.
    """
    ids = list(identities)
    if not ids:
        raise StructureError("no input identities")
    n = arity
    for f in ids:
        _, ar, _ = identity_profile(f)
        if ar is not None:
            if n is None:
                n = ar
            elif n != ar:
                raise StructureError("mixed arities in input")
    if n is None:
        raise StructureError("cannot infer the arity; pass arity=")
    part1 = []
    for f in ids:
        part1.extend(kp_part1(f, n))
    part2 = kp_part2(n)
    rules = detect_rewrites(part1) if auto_eliminate else []
    final = eliminate_operations(part1 + part2, rules, prime=prime)
    return KPResult(n, part1, part2, rules, final)
