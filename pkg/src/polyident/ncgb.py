"""Noncommutative Groebner bases in the free associative algebra.

Polynomials are Poly objects whose keys are plain words, tuples of
letter indices into LETTERS.  The monomial order is degree first and
then letter by letter with later alphabet letters greater, so cb leads
cb + bc - a^2.  Division removes the greatest reducible word at each
step, always with the greatest matching leading word at its leftmost
occurrence, which fixes the normal form during completion as well.

Completion follows the classical loop: self-reduce, adjoin the nonzero
normal forms of all compositions (overlap polynomials), and repeat
until every composition reduces to zero.  Termination is not
guaranteed in general, so round and size limits produce a partial
basis with a diagnostic instead of looping forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .monomials import Poly, StructureError
from .perms import LETTERS


def word_key(w: tuple) -> tuple:
    return (len(w), w)


def leading_word(f: Poly) -> tuple:
    if not f:
        raise StructureError("the zero polynomial has no leading word")
    return max(f.terms, key=word_key)


def monic(f: Poly) -> Poly:
    return (1 / Fraction(f.terms[leading_word(f)])) * f


def _find_factor(w: tuple, part: tuple) -> int:
    """Leftmost start of part inside w, or -1."""
    n, k = len(w), len(part)
    for i in range(n - k + 1):
        if w[i:i + k] == part:
            return i
    return -1


def normal_form(f: Poly, basis) -> Poly:
    """Remainder of f under division by a list of monic polynomials."""
    table = {}
    for g in basis:
        if g:
            table.setdefault(leading_word(g), g)
    out = Poly()
    rest = Poly(dict(f.terms))
    while rest:
        w = leading_word(rest)
        c = rest.terms[w]
        hit = None
        for lt in table:
            i = _find_factor(w, lt)
            if i >= 0 and (hit is None or word_key(lt) > word_key(hit[0])):
                hit = (lt, i)
        if hit is None:
            out = out + Poly([(w, c)])
            rest = rest - Poly([(w, c)])
            continue
        lt, i = hit
        left, right = w[:i], w[i + len(lt):]
        g = table[lt]
        lc = g.terms[lt]
        scale = c / lc
        rest = rest - scale * g.map_keys(lambda u: left + u + right)
    return out


def self_reduce(gens) -> list[Poly]:
    """Interreduce a generating set.

    Each polynomial is divided by all the others until nothing changes;
    zero remainders are dropped, duplicates collapse, and the survivors
    come back monic in decreasing leading-word order.
    """
    work = [monic(g) for g in gens if g]
    changed = True
    while changed:
        changed = False
        work.sort(key=lambda g: word_key(leading_word(g)), reverse=True)
        for i, g in enumerate(work):
            rest = work[:i] + work[i + 1:]
            h = normal_form(g, rest)
            if h != g:
                changed = True
                work = rest if not h else rest + [monic(h)]
                break
    seen, out = set(), []
    for g in sorted(work, key=lambda g: word_key(leading_word(g)),
                    reverse=True):
        key = tuple(sorted(g.terms.items()))
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


def compositions(gens, include_self: bool = False) -> list[tuple[Poly, Poly]]:
    """Overlap polynomials with their normal forms.

    For leading words u of g and v of h this takes every proper
    overlap, a nonempty proper suffix of u equal to a nonempty proper
    prefix of v, and every inclusion of v strictly inside u, over all
    ordered pairs of distinct generators.  Each composition cancels the
    shared leading word; identical composition polynomials are listed
    once and compositions that cancel to zero outright are dropped,
    which is the counting convention behind the 93 compositions of the
    C2 envelope ideal.  include_self adds each generator's overlaps
    with itself; completion needs those, the count convention does not.
    """
    gens = [monic(g) for g in gens if g]
    out = []
    seen = set()

    def record(comp):
        if not comp:
            return
        key = tuple(sorted(monic(comp).terms.items()))
        if key in seen:
            return
        seen.add(key)
        out.append((comp, normal_form(comp, gens)))

    for g in gens:
        u = leading_word(g)
        for h in gens:
            if g is h and not include_self:
                continue
            v = leading_word(h)
            for k in range(1, min(len(u), len(v))):
                if u[len(u) - k:] == v[:k]:
                    # w = u + v[k:] = u[:len(u)-k] + v
                    record(g.map_keys(lambda t: t + v[k:])
                           - h.map_keys(lambda t: u[:len(u) - k] + t))
            if g is not h and len(v) < len(u):
                start = 0
                while True:
                    i = _find_factor(u[start:], v)
                    if i < 0:
                        break
                    i += start
                    record(g - h.map_keys(
                        lambda t: u[:i] + t + u[i + len(v):]))
                    start = i + 1
    return out


def new_generators(comps) -> list[Poly]:
    """Distinct nonzero normal forms, decreasing leading-word order."""
    seen, out = set(), []
    for _, nf in comps:
        if not nf:
            continue
        g = monic(nf)
        key = tuple(sorted(g.terms.items()))
        if key not in seen:
            seen.add(key)
            out.append(g)
    out.sort(key=lambda g: word_key(leading_word(g)), reverse=True)
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    polys: tuple[Poly, ...]
    complete: bool
    rounds: int
    diagnostic: str | None = None

    def __iter__(self):
        return iter(self.polys)

    def __len__(self) -> int:
        return len(self.polys)


def groebner(gens, max_rounds: int = 50,
             max_size: int = 10000) -> GroebnerBasis:
    """Complete a generating set to a Groebner basis.

    Alternates self-reduction with adjoining the nonzero composition
    normal forms until every composition reduces to zero.  The limits
    guard against non-terminating ideals; exceeding one returns the
    partial basis with complete=False and a diagnostic.
    """
    work = self_reduce(gens)
    for round_no in range(1, max_rounds + 1):
        fresh = new_generators(compositions(work, include_self=True))
        if not fresh:
            return GroebnerBasis(tuple(work), True, round_no)
        work = self_reduce(work + fresh)
        if len(work) > max_size:
            return GroebnerBasis(tuple(work), False, round_no,
                                 f"basis grew past {max_size} elements")
    return GroebnerBasis(tuple(work), False, max_rounds,
                         f"no closure after {max_rounds} rounds")


# ---------------------------------------------------------------------------
# quotient algebras

def _prefix_automaton(leads):
    """States are proper prefixes of leading words; -1 is the dead state."""
    prefixes = {()}
    for lt in leads:
        for k in range(1, len(lt)):
            prefixes.add(lt[:k])
    states = sorted(prefixes, key=word_key)
    index = {s: i for i, s in enumerate(states)}
    lead_set = set(leads)

    def step(state: tuple, letter: int) -> int:
        t = state + (letter,)
        while t:
            if t in lead_set:
                return -1
            if t in index:
                return index[t]
            t = t[1:]
        return index[()]

    return states, index, step


@dataclass(frozen=True)
class QuotientAlgebra:
    """Free algebra on nletters modulo a Groebner basis.

    words is the ordered basis of normal words (degree first, then
    alphabetically); table[i][j] is the normal form of words[i]*words[j]
    as a Poly over the basis words.  An infinite-dimensional quotient
    keeps finite=False with an empty basis and no table.
    """

    nletters: int
    basis: GroebnerBasis
    finite: bool
    words: tuple[tuple, ...]
    table: tuple[tuple[Poly, ...], ...] | None

    @property
    def dim(self) -> int:
        return len(self.words)

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self.basis.polys)

    def multiply(self, f: Poly, g: Poly) -> Poly:
        out = Poly()
        for u, cu in f.items():
            for v, cv in g.items():
                out = out + (cu * cv) * self.table[self.index(u)][
                    self.index(v)]
        return out

    def index(self, word: tuple) -> int:
        try:
            return self.words.index(word)
        except ValueError:
            raise StructureError(f"not a basis word: {word!r}") from None

    def vector(self, f: Poly) -> list[Fraction]:
        row = [Fraction(0)] * self.dim
        for w, c in f.items():
            row[self.index(w)] += Fraction(c)
        return row

    def element(self, coeffs) -> Poly:
        return Poly(list(zip(self.words, coeffs)))


def quotient(gb: GroebnerBasis, nletters: int) -> QuotientAlgebra:
    """Basis of normal words and the multiplication table.

    Normal words avoid every leading word of the basis as a factor.
    They are finite in number exactly when the factor-avoiding
    automaton is acyclic; a reachable cycle means an infinite
    dimensional quotient, which is reported without a table.
    """
    leads = [leading_word(g) for g in gb.polys]
    if any(not lt for lt in leads):
        return QuotientAlgebra(nletters, gb, True, (), ())
    states, index, step = _prefix_automaton(leads)
    start = index[()]
    reach = {start}
    stack = [start]
    edges = {i: [] for i in range(len(states))}
    while stack:
        s = stack.pop()
        for letter in range(nletters):
            t = step(states[s], letter)
            if t < 0:
                continue
            edges[s].append(t)
            if t not in reach:
                reach.add(t)
                stack.append(t)
    color = {}

    def cyclic(s: int) -> bool:
        color[s] = 1
        for t in edges[s]:
            if color.get(t) == 1 or (color.get(t) is None and cyclic(t)):
                return True
        color[s] = 2
        return False

    if cyclic(start):
        return QuotientAlgebra(nletters, gb, False, (), None)
    words = []
    layer = [((), start)]
    while layer:
        words.extend(w for w, _ in layer)
        nxt = []
        for w, s in layer:
            for letter in range(nletters):
                t = step(states[s], letter)
                if t >= 0:
                    nxt.append((w + (letter,), t))
        layer = nxt
    words = tuple(sorted(words, key=word_key))
    table = tuple(
        tuple(normal_form(Poly([(u + v, 1)]), gb.polys) for v in words)
        for u in words)
    return QuotientAlgebra(nletters, gb, True, words, table)


# ---------------------------------------------------------------------------
# text form: words with powers, e.g. "c^2*b - b*c^2"

def parse_free(text: str) -> Poly:
    """Parse a combination of words written with letters, ^ and *."""
    s = text.replace(" ", "")
    i, n = 0, len(s)
    out = Poly()
    first = True
    while i < n:
        sign = 1
        if s[i] == "+":
            i += 1
        elif s[i] == "-":
            sign = -1
            i += 1
        elif not first:
            raise StructureError(f"expected sign at {i} in {text!r}")
        first = False
        coeff = Fraction(sign)
        j = i
        while j < n and (s[j].isdigit() or s[j] == "/"):
            j += 1
        if j > i:
            coeff *= Fraction(s[i:j])
            i = j
            if i < n and s[i] == "*":
                i += 1
        word = []
        while i < n and (s[i].isalpha() or s[i] == "*"):
            if s[i] == "*":
                i += 1
                continue
            letter = LETTERS.index(s[i])
            i += 1
            power = 1
            if i < n and s[i] == "^":
                i += 1
                j = i
                while j < n and s[j].isdigit():
                    j += 1
                if j == i:
                    raise StructureError(f"missing exponent in {text!r}")
                power = int(s[i:j])
                i = j
            word.extend([letter] * power)
        if not word and coeff == sign and s[i - 1] not in "0123456789":
            raise StructureError(f"empty term at {i} in {text!r}")
        out = out + Poly([(tuple(word), coeff)])
    return out


def format_word(w: tuple) -> str:
    if not w:
        return "1"
    runs = []
    for letter in w:
        if runs and runs[-1][0] == letter:
            runs[-1][1] += 1
        else:
            runs.append([letter, 1])
    return "*".join(LETTERS[x] + (f"^{k}" if k > 1 else "")
                    for x, k in runs)


def format_free(f: Poly) -> str:
    if not f:
        return "0"
    keys = sorted(f.terms, key=word_key, reverse=True)
    parts = []
    for i, w in enumerate(keys):
        c = f.terms[w]
        mag = abs(c)
        body = format_word(w)
        if mag != 1 or not w:
            body = f"{mag}" + ("" if not w else "*" + body)
        if i == 0:
            parts.append(body if c > 0 else f"- {body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


def dump_basis(gb) -> str:
    """One monic polynomial per line, decreasing leading-word order."""
    polys = sorted(gb, key=lambda g: word_key(leading_word(g)),
                   reverse=True)
    return "\n".join(format_free(g) for g in polys)
