"""Identity-pipeline fixtures.

Expected values below were worked out by hand before engine.py was
written: the liftings by applying the substitution and multiplication
rules term by term, the dialgebra expansion columns by hatting each
word of the triple products, the block matrix for the degree-3 run row
by row, and the reductions by running the cyclic-sum rewrite on paper.
Ranks and extraction traces are regression values cross-checked two
ways: over Q against F_101, and against the module generated by the
operation-splitting images of the defining identities.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyident.engine import (
    DerivedOperation,
    JacobiBasis,
    LiftingSpec,
    conjecture_check,
    expand_derived,
    expansion_matrix,
    extract_new,
    find_identities,
    follows_from,
    format_irrep_records,
    format_irrep_table,
    identity_module,
    irrep_pipeline,
    lift,
    lift_to_degree,
    orbit_rows,
    reduce_monomials_jacobi,
    relative_identities,
    vector_residues,
)
from polyident.kp import kp_transform
from polyident.linalg import RowModule
from polyident.monomials import (
    MonomialBasis,
    Poly,
    StructureError,
    label_shape,
    parse_expression as P,
    tree_leaves,
    tree_shape,
    typed_association_types,
)
from polyident.operations import HattedOperation, MultilinearOperation, expand

CYC = MultilinearOperation.from_text("abc - bca")
JACOBI = P("(a,b,c) + (b,c,a) + (c,a,b)")
DERIVATION = P("((a,b,c),d,e) - ((a,d,e),b,c)"
               " - (a,(b,d,e),c) - (a,b,(c,d,e))")
RIGHT_COMM = P("(a(bc)) - (a(cb))")

# the two triple diproducts of a dialgebra, hatted form
DIPROD1 = HattedOperation.from_text("a^bc + cba^")
DIPROD2 = HattedOperation.from_text("ab^c + cb^a")

# the same products written over the dialgebra bar operations
TRIPLE1 = DerivedOperation.from_text("((ab)c) - ((ac)b) + (a(bc))")
TRIPLE2 = DerivedOperation.from_text("((ba)c) + ((bc)a) - (b(ac))")

JTS3 = P("(a,b,c) - (c,b,a)")
JTS5 = P("(a,b,(c,d,e)) - ((a,b,c),d,e) + (c,(b,a,d),e) - (c,d,(a,b,e))")
JORDAN4 = P("(((ac)b)d) + (((ad)b)c) + (a(b(dc)))"
            " - ((ac)(bd)) - ((ad)(bc)) - ((ab)(dc))")
OSBORN4 = P("((b(ca))d) + ((b(da))c) + ((b(dc))a)"
            " - ((bd)(ca)) - ((bc)(da)) - ((ba)(dc))")
PAIR_SYMMETRY = ((1, ((2, 1, 0),)),)

RC_LIFTED = [
    "((ad)(bc)) - ((ad)(cb))",
    "(a((bd)c)) - (a(c(bd)))",
    "(a(b(cd))) - (a((cd)b))",
    "((a(bc))d) - ((a(cb))d)",
    "(d(a(bc))) - (d(a(cb)))",
]

JACOBI_LIFTED = [
    "((a,d,e),b,c) + (b,c,(a,d,e)) + (c,(a,d,e),b)",
    "(a,(b,d,e),c) + ((b,d,e),c,a) + (c,a,(b,d,e))",
    "(a,b,(c,d,e)) + (b,(c,d,e),a) + ((c,d,e),a,b)",
    "((a,b,c),d,e) + ((b,c,a),d,e) + ((c,a,b),d,e)",
    "(d,(a,b,c),e) + (d,(b,c,a),e) + (d,(c,a,b),e)",
    "(d,e,(a,b,c)) + (d,e,(b,c,a)) + (d,e,(c,a,b))",
]

# reductions of the six discarded types onto the retained ones
TYPE_REDUCTIONS = [
    ("(a,b,((c,d,e),f,g))",
     "- (a,b,(f,g,(c,d,e))) - (a,b,(g,(c,d,e),f))"),
    ("(a,((b,c,d),e,f),g)",
     "- (a,(e,f,(b,c,d)),g) - (a,(f,(b,c,d),e),g)"),
    ("((a,b,c),(d,e,f),g)",
     "- ((d,e,f),g,(a,b,c)) - (g,(a,b,c),(d,e,f))"),
    ("((a,b,(c,d,e)),f,g)",
     "- (f,g,(a,b,(c,d,e))) - (g,(a,b,(c,d,e)),f)"),
    ("((a,(b,c,d),e),f,g)",
     "- (f,g,(a,(b,c,d),e)) - (g,(a,(b,c,d),e),f)"),
    ("(((a,b,c),d,e),f,g)",
     "(f,g,(d,e,(a,b,c))) + (f,g,(e,(a,b,c),d))"
     " + (g,(d,e,(a,b,c)),f) + (g,(e,(a,b,c),d),f)"),
]

# reductions of in-type monomials whose leading simple argument is largest
PERM_REDUCTIONS = [
    ("(a,b,(c,d,(g,e,f)))",
     "- (a,b,(c,d,(e,f,g))) - (a,b,(c,d,(f,g,e)))"),
    ("(a,b,(c,(f,d,e),g))",
     "- (a,b,(c,(d,e,f),g)) - (a,b,(c,(e,f,d),g))"),
    ("(a,(d,b,c),(g,e,f))",
     "(a,(b,c,d),(e,f,g)) + (a,(b,c,d),(f,g,e))"
     " + (a,(c,d,b),(e,f,g)) + (a,(c,d,b),(f,g,e))"),
    ("(a,(b,c,(f,d,e)),g)",
     "- (a,(b,c,(d,e,f)),g) - (a,(b,c,(e,f,d)),g)"),
    ("(a,(b,(e,c,d),f),g)",
     "- (a,(b,(c,d,e),f),g) - (a,(b,(d,e,c),f),g)"),
    ("((c,a,b),d,(g,e,f))",
     "((a,b,c),d,(e,f,g)) + ((a,b,c),d,(f,g,e))"
     " + ((b,c,a),d,(e,f,g)) + ((b,c,a),d,(f,g,e))"),
]

# nonzero entries of the dialgebra expansion matrices of the triple
# diproducts, one (row, column) pair list per product, all entries +1
DIPROD1_CELLS = [(0, 0), (17, 0), (1, 1), (15, 1), (2, 2), (16, 2),
                 (3, 3), (13, 3), (4, 4), (14, 4), (5, 5), (12, 5)]
DIPROD2_CELLS = [(6, 0), (11, 0), (7, 1), (9, 1), (8, 2), (10, 2),
                 (9, 3), (7, 3), (10, 4), (8, 4), (11, 5), (6, 5)]


def assoc_expansion(f: Poly, ops=(CYC,)) -> Poly:
    out = Poly()
    for t, c in f.items():
        out = out + c * expand(t, list(ops), "algebra")
    return out


def test_lifting_spec():
    spec = LiftingSpec(3, 2)
    assert spec.output_degree == 4
    assert len(spec.apply(RIGHT_COMM)) == 5
    assert LiftingSpec(3, 3).output_degree == 5
    with pytest.raises(StructureError):
        LiftingSpec(0, 2)
    with pytest.raises(StructureError):
        LiftingSpec(3, 1)
    assert lift(RIGHT_COMM, 0) == [RIGHT_COMM]
    with pytest.raises(StructureError):
        lift(RIGHT_COMM, -1)


def test_lift_binary_one_step():
    assert lift(RIGHT_COMM) == [P(s) for s in RC_LIFTED]


def test_lift_ternary_one_step():
    assert lift(JACOBI) == [P(s) for s in JACOBI_LIFTED]


def test_lift_counts():
    assert [len(lift(RIGHT_COMM, k)) for k in (1, 2)] == [5, 30]
    assert [len(lift(JACOBI, k)) for k in (1, 2, 3)] == [6, 48, 480]
    assert [len(lift(DERIVATION, k)) for k in (1, 2)] == [8, 80]
    assert len(lift_to_degree(JACOBI, 7)) == 48
    assert len(lift_to_degree(DERIVATION, 9)) == 80
    assert lift_to_degree(JACOBI, 3) == [JACOBI]
    with pytest.raises(StructureError):
        lift_to_degree(JACOBI, 6)
    with pytest.raises(StructureError):
        lift_to_degree(JACOBI, 1)


def test_lifted_identities_still_hold():
    # the cyclic commutator satisfies the ternary Jacobi identity, so
    # every lifting must expand to zero in the free associative algebra
    assert not assoc_expansion(JACOBI)
    for f in lift(JACOBI, 2):
        assert not assoc_expansion(f)


def test_degree7_expansion():
    m = P("(a,b,(c,d,(e,f,g)))")
    expected = P("abcdefg - abcdfge - abdefgc + abdfgec"
                 " - bcdefga + bcdfgea + bdefgca - bdfgeca")
    assert assoc_expansion(m) == expected


def test_diproduct_expansion_columns():
    for op, cells in ((DIPROD1, DIPROD1_CELLS), (DIPROD2, DIPROD2_CELLS)):
        em = expansion_matrix(op, 3, "dialgebra")
        assert em.shape == (18, 6)
        expected = np.zeros((18, 6), dtype=np.int64)
        for r, c in cells:
            expected[r, c] = 1
        assert np.array_equal(em.matrix, expected)


def test_diproduct_identities():
    em1 = expansion_matrix(DIPROD1, 3, "dialgebra")
    assert em1.nullspace("fraction") == []
    assert em1.nullspace(101) == []
    em2 = expansion_matrix(DIPROD2, 3, "dialgebra")
    found = em2.nullspace("fraction")
    assert len(found) == 3
    for f in found:
        exp = Poly()
        for t, c in f.items():
            exp = exp + c * expand(t, [DIPROD2], "dialgebra")
        assert not exp
    direct = RowModule(6, 101)
    direct.insert(em2.nullspace_rows(101))
    sym = identity_module([P("(a,b,c) - (c,b,a)")], em2.basis, 101)
    assert direct == sym
    assert em1.rank("fraction") == em1.rank(101) == 6
    assert em2.rank("fraction") == em2.rank(101) == 3


def test_find_identities_cyclic_degree3():
    found = find_identities(CYC, 3)
    assert len(found) == 2
    for f in found:
        assert not assoc_expansion(f)
    basis = MonomialBasis(3, 3)
    assert identity_module(found, basis, 101) == \
        identity_module([JACOBI], basis, 101)
    assert orbit_rows(JACOBI, basis).shape == (6, 6)


def test_expansion_matrix_guards():
    with pytest.raises(StructureError):
        expansion_matrix(CYC, 3, "module")
    with pytest.raises(StructureError):
        expansion_matrix(CYC, 5, basis=MonomialBasis(3, 3))
    half = MultilinearOperation(2, Poly({(0, 1): "1/2", (1, 0): 1}))
    em = expansion_matrix(half, 2)
    assert em.matrix.dtype == np.int64
    assert em.rank() == em.rank(101) == 2
    with pytest.raises(StructureError):
        expansion_matrix([half, half], 2)
    with pytest.raises(StructureError):
        vector_residues(P("(ab)"), MonomialBasis(3, 3))


def test_jacobi_basis_sizes():
    assert [len(reduce_monomials_jacobi(d)) for d in (3, 5, 7)] == \
        [4, 160, 17920]
    with pytest.raises(StructureError):
        JacobiBasis(4)
    basis = reduce_monomials_jacobi(7)
    assert len(basis.types) == 6
    all_types = typed_association_types(3, 7)
    counts = [0] * len(all_types)
    index = {t: i for i, t in enumerate(all_types)}
    for m in basis.monomials:
        counts[index[tree_shape(m)]] += 1
    assert counts == [3360, 3360, 0, 2240, 3360, 3360, 0, 2240, 0, 0, 0, 0]


def test_reduce_discarded_types():
    basis = reduce_monomials_jacobi(7)
    for src, dst in TYPE_REDUCTIONS:
        assert basis.reduce_poly(P(src)) == P(dst)


def test_reduce_within_types():
    basis = reduce_monomials_jacobi(7)
    for src, dst in PERM_REDUCTIONS:
        assert basis.reduce_poly(P(src)) == P(dst)
        assert basis.reduce_poly(P(dst)) == P(dst)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 11), st.permutations(list(range(7))))
def test_reduce_preserves_expansion(ti, word):
    # the rewrite subtracts multiples of the Jacobi identity, which the
    # cyclic commutator kills, so expansions must be left unchanged
    basis = reduce_monomials_jacobi(7)
    t = label_shape(typed_association_types(3, 7)[ti], word)
    f = Poly.monomial(t)
    reduced = basis.reduce_poly(f)
    for m in reduced.terms:
        assert m in basis.index
    assert assoc_expansion(reduced) == assoc_expansion(f)


def test_follows_from():
    assert follows_from(JACOBI, [JACOBI])
    assert follows_from(lift(JACOBI)[0], [JACOBI])
    assert not follows_from(DERIVATION, [JACOBI])
    with pytest.raises(StructureError):
        follows_from(Poly(), [JACOBI])
    with pytest.raises(StructureError):
        follows_from(JACOBI, [JACOBI], degree=5)


def _degree5_candidates():
    basis = reduce_monomials_jacobi(5)
    em = expansion_matrix(CYC, 5, "algebra", basis)
    return basis, em, em.nullspace(101)


def test_degree5_cyclic_extraction():
    basis, em, cands = _degree5_candidates()
    assert em.shape == (120, 160)
    assert em.rank(101) == 88
    assert em.rank("fraction") == 88
    assert len(cands) == 72
    ext = extract_new(cands, [], basis=basis, prime=101)
    assert [(e.index, e.rank_before, e.rank_after) for e in ext] == \
        [(1, 0, 50), (13, 50, 72)]

    # the rewrite is the Jacobi identity at the root, so consequences
    # of Jacobi vanish on the reduced basis and the whole kernel is the
    # module of the ternary derivation identity
    for f in lift_to_degree(JACOBI, 5):
        assert not basis.reduce_poly(f)
    full = RowModule(len(basis), 101)
    full.insert(em.nullspace_rows(101))
    assert full.rank == 72
    assert identity_module([DERIVATION], basis, 101) == full
    assert identity_module([e.identity for e in ext], basis, 101) == full
    assert follows_from(ext[0].identity, [DERIVATION], basis=basis,
                        prime=101)
    assert not follows_from(DERIVATION, [ext[0].identity], basis=basis,
                            prime=101)


def test_extract_new_trivial_cases():
    basis, _, cands = _degree5_candidates()
    assert extract_new(cands, cands, basis=basis, prime=101) == []
    assert extract_new([], [JACOBI], degree=3) == []
    stopped = extract_new(cands, [], basis=basis, prime=101, stop_rank=50)
    assert len(stopped) == 1 and stopped[0].rank_after == 50


@settings(max_examples=10, deadline=None)
@given(st.randoms(use_true_random=False))
def test_extract_rank_is_order_independent(rnd):
    basis, _, cands = _degree5_candidates()
    shuffled = list(cands)
    rnd.shuffle(shuffled)
    ext = extract_new(shuffled, [], basis=basis, prime=101)
    assert ext[-1].rank_after == 72


def test_conjecture_reports():
    com = conjecture_check(MultilinearOperation.from_text("ab - ba"), 3)
    assert com and [(c.degree, c.kp_rank, c.direct_rank)
                    for c in com.comparisons] == [(2, 2, 2), (3, 42, 42)]
    aco = conjecture_check(MultilinearOperation.from_text("ab + ba"), 3)
    assert aco and [(c.degree, c.kp_rank, c.direct_rank)
                    for c in aco.comparisons] == [(2, 2, 2), (3, 39, 39)]
    jtp = conjecture_check(MultilinearOperation.from_text("abc + cba"), 3)
    assert jtp and [(c.degree, c.kp_rank, c.direct_rank)
                    for c in jtp.comparisons] == [(3, 9, 9)]
    zero = conjecture_check(
        MultilinearOperation.from_poly(P("ab - ab"), arity=2), 3)
    assert zero and [(c.degree, c.kp_rank, c.direct_rank)
                     for c in zero.comparisons] == [(2, 4, 4), (3, 48, 48)]
    with pytest.raises(StructureError):
        conjecture_check(CYC, 2)


def expected_degree3_block():
    mat = np.zeros((18, 24), dtype=np.int64)
    rc_pairs = [(6, 7), (7, 6), (8, 9), (9, 8), (10, 11), (11, 10)]
    for i, (pos, neg) in enumerate(rc_pairs):
        mat[i, pos], mat[i, neg] = 1, -1
    t1_rows = [(0, 1, 6), (1, 0, 7), (2, 3, 8), (3, 2, 9), (4, 5, 10),
               (5, 4, 11)]
    for i, (pos1, neg, pos2) in enumerate(t1_rows):
        r = 6 + i
        mat[r, pos1], mat[r, neg], mat[r, pos2] = 1, -1, 1
        mat[r, 12 + i] = 1
    t2_rows = [(2, 3, 8), (4, 5, 10), (0, 1, 6), (5, 4, 11), (1, 0, 7),
               (3, 2, 9)]
    for i, (pos1, pos2, neg) in enumerate(t2_rows):
        r = 12 + i
        mat[r, pos1], mat[r, pos2], mat[r, neg] = 1, 1, -1
        mat[r, 18 + i] = 1
    return mat


@pytest.mark.parametrize("field", ["fraction", 101])
def test_triple_products_degree3(field):
    res = relative_identities([TRIPLE1, TRIPLE2], [RIGHT_COMM], 3,
                              field=field, keep_matrix=True)
    assert res.shape == (18, 24)
    assert res.rank == 15
    assert res.discarded == 12
    assert np.array_equal(res.matrix, expected_degree3_block())
    assert list(res.identities) == [
        P("(a,b,c)_2 - (c,b,a)_2"),
        P("(a,c,b)_2 - (b,c,a)_2"),
        P("(b,a,c)_2 - (c,a,b)_2"),
    ]


def test_triple_products_degree5():
    res = relative_identities([TRIPLE1, TRIPLE2],
                              [RIGHT_COMM, JORDAN4, OSBORN4], 5,
                              symmetries=PAIR_SYMMETRY, field=101)
    assert res.shape == (5850, 2490)
    assert res.rank == 2215
    assert res.discarded == 1655
    assert len(res.identities) == 560

    ext = extract_new(res.identities, [], basis=res.derived_basis,
                      prime=101)
    assert [(e.index, e.rank_after) for e in ext] == [
        (1, 120), (121, 240), (241, 360), (301, 390),
        (331, 450), (342, 470), (451, 530), (454, 560)]

    split = kp_transform([JTS3, JTS5])
    assert len(split.identities) == 13
    degrees = sorted(len(tree_leaves(next(iter(f.terms))))
                     for f in split.identities)
    assert degrees == [3] + [5] * 12
    gens5 = []
    for f in split.identities:
        if len(tree_leaves(next(iter(f.terms)))) == 5:
            gens5.append(f)
        else:
            gens5.extend(lift(f, 1, nsymbols=2))
    from_split = identity_module(gens5, res.derived_basis, 101)
    extracted = identity_module([e.identity for e in ext],
                                res.derived_basis, 101)
    assert from_split.rank == extracted.rank == 560
    assert from_split == extracted


def test_derived_operation_guards():
    with pytest.raises(StructureError):
        DerivedOperation.from_text("(ab) + a")
    with pytest.raises(StructureError):
        DerivedOperation.from_text("(ab) + (ba)(cd)")
    with pytest.raises(StructureError):
        DerivedOperation.from_poly(Poly())
    zero = DerivedOperation.from_poly(Poly(), arity=2)
    assert not expand_derived(next(iter(P("(ab)").terms)), [zero])
    two = DerivedOperation.from_text("(ab) + 2 (ba)")
    assert expand_derived(next(iter(P("(ab)").terms)), [two]) == \
        P("(ab) + 2 (ba)")


def test_irrep_degree3():
    reports = irrep_pipeline(CYC, [JACOBI], 3)
    rows = [(r.partition, r.dim, r.lifrank, r.exprank, r.toprank, r.allrank)
            for r in reports]
    assert rows == [
        ((3,), 1, 1, 1, 0, 1),
        ((2, 1), 2, 0, 2, 2, 0),
        ((1, 1, 1), 1, 1, 1, 0, 1),
    ]
    table = format_irrep_table(reports)
    lines = table.splitlines()
    assert lines[0].split() == ["#", "partition", "dim", "lifrank",
                                "exprank", "toprank", "allrank"]
    assert lines[2].split() == ["2", "2,1", "2", "0", "2", "2", "0"]
    records = format_irrep_records(reports).splitlines()
    assert records[1] == ("row=2 partition=2,1 dim=2 lifrank=0"
                          " exprank=2 toprank=2 allrank=0")


@pytest.mark.parametrize("degree", [3, 5])
def test_irrep_matches_dense_nullity(degree):
    # summing allrank against the dimension of each irreducible must
    # reproduce the nullity of the dense expansion matrix
    reports = irrep_pipeline(CYC, [JACOBI], degree)
    em = expansion_matrix(CYC, degree)
    nullity = em.shape[1] - em.rank(101)
    assert sum(r.dim * r.allrank for r in reports) == nullity
    # and the same aggregation for lifrank against the lifted module
    basis = MonomialBasis(3, degree)
    lifted = identity_module(lift_to_degree(JACOBI, degree), basis, 101)
    assert sum(r.dim * r.lifrank for r in reports) == lifted.rank


def test_irrep_pipeline_options():
    reports = irrep_pipeline(CYC, [JACOBI], 5, parts=[(4, 1), (5,)])
    assert [r.partition for r in reports] == [(4, 1), (5,)]
    limited = irrep_pipeline(CYC, [JACOBI], 5, max_dim=1)
    assert [r.partition for r in limited] == [(5,), (1, 1, 1, 1, 1)]
    threaded = irrep_pipeline(CYC, [JACOBI], 5, threads=3)
    assert threaded == irrep_pipeline(CYC, [JACOBI], 5)
    with pytest.raises(StructureError):
        irrep_pipeline([CYC, CYC], [JACOBI], 3)
