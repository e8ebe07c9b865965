"""Free nonassociative and dialgebra structures.

Trees: a leaf is an int variable index; an internal node is a tuple
("op", symbol, child, ..., child) with a 0-based operation symbol and
uniform arity.  The "op" head keeps tree keys disjoint from flat word
tuples.  Association types use the same structure with None leaves.

Type order follows the printed conventions: binary types list child
size tuples in decreasing lexicographic order, ternary types in
increasing order, recursing on children with the leftmost child varying
slowest.  Orders not fixed by a printed listing (arity >= 4, most
multi-symbol settings) fall back to shape-major, symbol-minor.

Dialgebra monomials are (word, center) pairs in normal form; the left
product keeps the left factor's center and the right product keeps the
right factor's center.  Text syntax: "ab^c" is the word abc with center
on b (a caret hats the letter before it); nonassociative monomials are
written "(a,(b,c,d)_2,e)_1" with 1-based operation subscripts, and
binary single-symbol monomials use juxtaposition like "((ab)c)d".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as _it_product
from math import comb, factorial

from .perms import LETTERS, all_perms

Tree = object  # int leaf or (symbol, child...) tuple


class StructureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# trees

def node(sym: int, *children) -> Tree:
    return ("op", sym) + children


def is_tree(key) -> bool:
    return isinstance(key, tuple) and bool(key) and key[0] == "op"


def tree_size(t: Tree) -> int:
    if not is_tree(t):
        return 1
    return sum(tree_size(c) for c in t[2:])


def tree_leaves(t: Tree) -> tuple[int, ...]:
    if not is_tree(t):
        return (t,)
    out: list[int] = []
    for c in t[2:]:
        out.extend(tree_leaves(c))
    return tuple(out)


def tree_shape(t: Tree) -> Tree:
    if not is_tree(t):
        return None
    return t[:2] + tuple(tree_shape(c) for c in t[2:])


def label_shape(shape: Tree, leaves) -> Tree:
    """Attach variables to a shape, consuming leaves left to right."""
    it = iter(leaves)

    def rec(s):
        if s is None:
            return next(it)
        return s[:2] + tuple(rec(c) for c in s[2:])

    out = rec(shape)
    try:
        next(it)
    except StopIteration:
        return out
    raise StructureError("too many leaves for shape")


def relabel_tree(t: Tree, perm) -> Tree:
    if not is_tree(t):
        return perm[t]
    return t[:2] + tuple(relabel_tree(c, perm) for c in t[2:])


def substitute_leaf(t: Tree, var: int, replacement: Tree) -> Tree:
    if not is_tree(t):
        return replacement if t == var else t
    return t[:2] + tuple(substitute_leaf(c, var, replacement) for c in t[2:])


def tree_sort_key(t: Tree):
    if not is_tree(t):
        return (0, t)
    return (1, t[1]) + tuple(tree_sort_key(c) for c in t[2:])


def is_dialgebra_key(key) -> bool:
    return (isinstance(key, tuple) and len(key) == 2
            and isinstance(key[0], tuple) and isinstance(key[1], int)
            and all(isinstance(x, int) for x in key[0]))


def term_sort_key(key):
    """Total order across variable, word, dialgebra, and tree keys."""
    if isinstance(key, int):
        return (0, (key,), ())
    if is_dialgebra_key(key):
        return (2, key[1], key[0])
    if is_tree(key):
        return (3, tree_sort_key(key), ())
    return (1, key, ())


# ---------------------------------------------------------------------------
# association types

def _check_degree(arity: int, degree: int) -> int:
    if arity < 2:
        raise StructureError("arity must be at least 2")
    if degree < 1 or (degree - 1) % (arity - 1) != 0:
        raise StructureError(
            f"degree {degree} incompatible with arity {arity}")
    return (degree - 1) // (arity - 1)


def count_association_types(arity: int, degree: int) -> int:
    k = _check_degree(arity, degree)
    return comb(arity * k, k) // ((arity - 1) * k + 1)


def _size_tuples(arity: int, degree: int) -> list[tuple[int, ...]]:
    step = arity - 1
    out: list[tuple[int, ...]] = []

    def rec(slots: int, rest: int, acc: list[int]):
        if slots == 0:
            if rest == 0:
                out.append(tuple(acc))
            return
        top = rest - (slots - 1)
        for s in range(1, top + 1, step):
            acc.append(s)
            rec(slots - 1, rest - s, acc)
            acc.pop()

    rec(arity, degree, [])
    out.sort(reverse=(arity == 2))
    return out


@lru_cache(maxsize=None)
def association_shapes(arity: int, degree: int) -> tuple[Tree, ...]:
    """Unlabeled shapes (leaves None, no symbols) in canonical order."""
    _check_degree(arity, degree)
    if degree == 1:
        return (None,)
    out = []
    for sizes in _size_tuples(arity, degree):
        child_lists = [association_shapes(arity, s) for s in sizes]
        for combo in _it_product(*child_lists):
            out.append(tuple(combo))
    assert len(out) == count_association_types(arity, degree)
    return tuple(out)


def _attach_symbols(shape: Tree, syms, it=None) -> Tree:
    if shape is None:
        return None
    if it is None:
        it = iter(syms)
    s = next(it)
    return ("op", s) + tuple(_attach_symbols(c, syms, it) for c in shape)


def _node_count(shape: Tree) -> int:
    if shape is None:
        return 0
    return 1 + sum(_node_count(c) for c in shape)


def _type_sort_key(t: Tree, pos=()) -> tuple:
    syms, poss = [t[1]], []
    for i, c in enumerate(t[2:]):
        if c is not None:
            s, p = _type_sort_key(c)
            syms.extend(s)
            poss.append(i)
            poss.extend(p)
    return tuple(syms), tuple(poss)


def typed_association_types(arity: int, degree: int,
                            nsymbols: int = 1) -> tuple[Tree, ...]:
    """Shapes with a symbol at every node, in canonical order.

    Single-symbol types keep the shape enumeration order.  Trilinear
    multi-symbol types sort on the symbol word read root first, then on
    the nesting positions, so types built on the same operations stay
    adjacent, inner argument position increasing.
    """
    shapes = association_shapes(arity, degree)
    if nsymbols == 1:
        return tuple(_attach_symbols(s, [0] * _node_count(s)) for s in shapes)
    typed = []
    for s in shapes:
        k = _node_count(s)
        for syms in _it_product(range(nsymbols), repeat=k):
            typed.append(_attach_symbols(s, syms))
    if arity == 3:
        typed.sort(key=_type_sort_key)
    return tuple(typed)


# ---------------------------------------------------------------------------
# monomial enumeration with symmetry canonicalization

def _closure(gens: tuple[tuple[int, ...], ...], arity: int):
    group = {tuple(range(arity))}
    frontier = [tuple(g) for g in gens]
    while frontier:
        g = frontier.pop()
        if g in group:
            continue
        group.add(g)
        for h in list(group):
            frontier.append(tuple(g[x] for x in h))
            frontier.append(tuple(h[x] for x in g))
    return sorted(group)


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered basis of multilinear nonassociative monomials.

    Order is association type major (typed_association_types order),
    permutation minor (lex).  With symmetry rules, only canonical orbit
    representatives appear; canonical means (type index, leaf word)
    minimal over the orbit.
    """
    arity: int
    degree: int
    nsymbols: int = 1
    symmetries: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...] = ()
    types: tuple[Tree, ...] = field(init=False, compare=False)
    monomials: tuple[Tree, ...] = field(init=False, compare=False)
    index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        types = typed_association_types(self.arity, self.degree,
                                        self.nsymbols)
        groups = {}
        for sym, gens in self.symmetries:
            groups[sym] = _closure(gens, self.arity)
        object.__setattr__(self, "_groups", groups)
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "_type_index",
                           {t: i for i, t in enumerate(types)})
        perms = all_perms(self.degree)
        mons = []
        for t in types:
            for s in perms:
                m = label_shape(t, s)
                if not groups or self.canonical(m) == m:
                    mons.append(m)
        object.__setattr__(self, "monomials", tuple(mons))
        object.__setattr__(self, "index",
                           {m: i for i, m in enumerate(mons)})

    def _orbit(self, t: Tree):
        if not is_tree(t):
            return [t]
        child_orbits = [self._orbit(c) for c in t[2:]]
        group = self._groups.get(t[1])
        out = []
        for kids in _it_product(*child_orbits):
            if group is None:
                out.append(t[:2] + tuple(kids))
            else:
                for g in group:
                    out.append(t[:2] + tuple(kids[g[i]]
                                             for i in range(self.arity)))
        return out

    def canonical(self, t: Tree) -> Tree:
        if not getattr(self, "_groups"):
            return t
        return min(self._orbit(t),
                   key=lambda m: (self._type_index[tree_shape(m)],
                                  tree_leaves(m)))

    def type_index(self, t: Tree) -> int:
        return self._type_index[tree_shape(t)]

    def __len__(self) -> int:
        return len(self.monomials)


# ---------------------------------------------------------------------------
# dialgebra monomials: (word, center), center 0-based

def dialgebra_product(x, y, side: str):
    """Product of normal-form monomials; side is 'left' or 'right'."""
    xw, xc = x
    yw, yc = y
    if side == "left":
        return (xw + yw, xc)
    if side == "right":
        return (xw + yw, len(xw) + yc)
    raise StructureError(f"side must be left or right, got {side!r}")


def dialgebra_basis(degree: int) -> list[tuple[tuple[int, ...], int]]:
    """Multilinear normal-form monomials: center major, word lex minor."""
    perms = all_perms(degree)
    return [(w, c) for c in range(degree) for w in perms]


# ---------------------------------------------------------------------------
# formal linear combinations

class Poly:
    """Formal linear combination of hashable monomial keys over Q."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, v in (terms.items() if isinstance(terms, dict) else terms):
                v = Fraction(v)
                if v:
                    nv = self.terms.get(k, 0) + v
                    if nv:
                        self.terms[k] = nv
                    else:
                        del self.terms[k]

    @classmethod
    def monomial(cls, key, coeff=1) -> "Poly":
        return cls([(key, coeff)])

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        p = Poly()
        p.terms = out
        return p

    def __neg__(self) -> "Poly":
        p = Poly()
        p.terms = {k: -v for k, v in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __rmul__(self, scalar) -> "Poly":
        scalar = Fraction(scalar)
        p = Poly()
        if scalar:
            p.terms = {k: scalar * v for k, v in self.terms.items()}
        return p

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def map_keys(self, fn) -> "Poly":
        """Linear extension of a map sending keys to keys or Polys."""
        out = Poly()
        for k, v in self.terms.items():
            img = fn(k)
            if isinstance(img, Poly):
                out = out + (v * img)
            else:
                out = out + Poly([(img, v)])
        return out

    def __repr__(self) -> str:
        return f"Poly({len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# text format

class _Scanner:
    def __init__(self, text: str):
        self.s = text.replace(" ", "").replace("−", "-")
        self.i = 0

    def peek(self) -> str:
        return self.s[self.i] if self.i < len(self.s) else ""

    def take(self) -> str:
        ch = self.peek()
        self.i += 1
        return ch

    def expect(self, ch: str):
        if self.take() != ch:
            raise StructureError(
                f"expected {ch!r} at position {self.i} in {self.s!r}")

    def number(self) -> int:
        j = self.i
        while self.peek().isdigit():
            self.i += 1
        if j == self.i:
            raise StructureError(f"expected digits at {j} in {self.s!r}")
        return int(self.s[j:self.i])


def _parse_word(sc: _Scanner):
    """Letters with optional per-letter caret; returns (word, center|None)."""
    word: list[int] = []
    center = None
    while sc.peek().isalpha():
        word.append(LETTERS.index(sc.take()))
        if sc.peek() == "^":
            sc.take()
            if center is not None:
                raise StructureError("more than one caret in a word")
            center = len(word) - 1
    return tuple(word), center


def _parse_factor(sc: _Scanner):
    ch = sc.peek()
    if ch == "(":
        sc.take()
        args = [_parse_monomial(sc)]
        commas = False
        while sc.peek() == ",":
            commas = True
            sc.take()
            args.append(_parse_monomial(sc))
        sc.expect(")")
        sym = 0
        if sc.peek() == "_":
            sc.take()
            sym = sc.number() - 1
        if commas:
            return ("op", sym) + tuple(args)
        inner = args[0]
        if sym == 0:
            return inner
        if is_tree(inner) and len(inner) == 4 and inner[1] == 0:
            return ("op", sym) + inner[2:]
        raise StructureError("operation subscript on a non-product group")
    if ch.isalpha():
        return LETTERS.index(sc.take())
    raise StructureError(f"unexpected {ch!r} at {sc.i} in {sc.s!r}")


def _parse_monomial(sc: _Scanner):
    """A factor, or a juxtaposition of factors (binary products)."""
    factors = [_parse_factor(sc)]
    while sc.peek() == "(" or sc.peek().isalpha():
        factors.append(_parse_factor(sc))
    m = factors[0]
    for f in factors[1:]:
        m = ("op", 0, m, f)
    return m


def _parse_coefficient(sc: _Scanner) -> Fraction:
    num = sc.number()
    den = 1
    if sc.peek() == "/":
        sc.take()
        den = sc.number()
    if sc.peek() == "*":
        sc.take()
    return Fraction(num, den)


def parse_expression(text: str) -> Poly:
    """Parse a signed combination of monomials.

    Monomial keys: int (single variable), tuple word, (word, center)
    dialgebra monomial, or a tree.  A flat multi-letter word parses as
    an associative word; with a caret it becomes a dialgebra monomial.
    """
    sc = _Scanner(text)
    if sc.s in ("", "0"):
        return Poly()
    out = Poly()
    first = True
    while sc.i < len(sc.s):
        sign = 1
        if sc.peek() == "+":
            sc.take()
        elif sc.peek() == "-":
            sign = -1
            sc.take()
        elif not first:
            raise StructureError(f"expected sign at {sc.i} in {sc.s!r}")
        first = False
        coeff = Fraction(sign)
        if sc.peek().isdigit():
            coeff *= _parse_coefficient(sc)
        if sc.peek().isalpha():
            save = sc.i
            word, center = _parse_word(sc)
            if sc.peek() in ("(",):
                sc.i = save  # juxtaposition like a(bc): re-parse as tree
                key = _parse_monomial(sc)
            elif center is not None:
                key = (word, center)
            elif len(word) == 1:
                key = word[0]
            else:
                key = word
        else:
            key = _parse_monomial(sc)
        out = out + Poly([(key, coeff)])
    return out


def parse_identity(line: str) -> Poly:
    """Parse 'lhs ≡ rhs', 'expr ≡ 0', or a bare expression."""
    for sep in ("≡", "="):
        if sep in line:
            lhs, rhs = line.split(sep, 1)
            return parse_expression(lhs) - parse_expression(rhs)
    return parse_expression(line)


def format_monomial(key, subscripts: bool = False) -> str:
    if isinstance(key, int):
        return LETTERS[key]
    if is_dialgebra_key(key):
        word, center = key
        return "".join(LETTERS[x] + ("^" if i == center else "")
                       for i, x in enumerate(word))
    if not is_tree(key):
        return "".join(LETTERS[x] for x in key)
    sym = key[1]
    kids = key[2:]
    if len(kids) == 2 and sym == 0 and not subscripts:
        parts = []
        for c in kids:
            s = format_monomial(c, subscripts)
            parts.append(s if isinstance(c, int) else f"({s})")
        return "".join(parts)
    inner = ",".join(format_monomial(c, subscripts) for c in kids)
    suffix = f"_{sym + 1}" if subscripts else ""
    return f"({inner}){suffix}"


def format_poly(poly: Poly, subscripts: bool = False,
                order=None) -> str:
    if not poly:
        return "0"
    keys = list(poly.terms)
    keys.sort(key=order if order is not None else term_sort_key)
    parts = []
    for i, k in enumerate(keys):
        c = poly.terms[k]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = format_monomial(k, subscripts)
        if mag != 1:
            body = f"{mag} {body}"
        if i == 0:
            parts.append(body if c > 0 else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def format_identity(poly: Poly, subscripts: bool = False, order=None) -> str:
    return format_poly(poly, subscripts, order) + " ≡ 0"
