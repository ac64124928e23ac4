import pytest

from piforge import pitest, polylib as pl
from piforge.coeffring import make_field
from piforge.errors import NotLinear, TooLarge, UnsupportedN, VariableAbsent
from piforge.freealg import NcPolynomial, format_poly, parse_poly, x
from piforge.matalg import Matrix
from piforge.quiver import Edge, QuiverSpec, Vertex, matrix_ring, realize

F2, F3 = make_field(2), make_field(3)


def P(text, F=F3):
    return parse_poly(text, F)


def test_capelli_and_standard():
    assert format_poly(pl.capelli(F3, 1)) == "x1.x2"
    # c_2 = x1 y1 x2 y2 - x2 y1 x1 y2 with y_j = x_{2+j}
    assert pl.capelli(F3, 2) == P("x1.x3.x2.x4 - x2.x3.x1.x4")
    assert pl.standard(F3, 2) == P("x1.x2 - x2.x1")
    assert pl.standard(F3, 1) == P("x1")
    s3 = pl.standard(F3, 3)
    assert len(s3) == 6 and s3.degree() == 3


def test_central_h():
    assert pl.central_h(F3, 1) == P("x1")
    assert pl.central_h(F3, 0) == NcPolynomial.one(F3)
    with pytest.raises(UnsupportedN):
        pl.central_h(F3, 3)
    assert pl.central_h(F3, 2).variables() == set(range(1, 13))


def test_frobenius_commutator():
    x1, x2 = x(F3, 1), x(F3, 2)
    assert pl.frobenius_commutator(x1, x2) == P("x1.x2 - x2.x1")
    assert pl.frobenius_commutator(x1, x2, 2) == P("x1.x2 - x2.x2.x1")
    assert pl.commutator(x1, NcPolynomial.one(F3)).is_zero()


def test_alternator():
    assert pl.alternator(P("x1.x2"), 1) == P("x1.x2 - x2.x1")
    assert pl.alternator(P("x1.x2 + x2.x1"), 1).is_zero()
    # t-alternating input -> (t+1)-alternating output
    f = pl.alternator(pl.standard(F3, 2) * x(F3, 3), 2)
    assert pl.is_t_alternating(f, 3)


def test_is_t_alternating():
    assert pl.is_t_alternating(pl.capelli(F3, 2), 2)
    assert not pl.is_t_alternating(P("x1.x2"), 2)
    assert pl.is_t_alternating(pl.standard(F3, 3), 3)
    with pytest.raises(NotLinear):
        pl.is_t_alternating(P("x1.x1.x2"), 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("F", [F2, F3])
def test_known_polys_are_k_alternating(k, F):
    assert pl.is_t_alternating(pl.capelli(F, k), k)
    assert pl.is_t_alternating(pl.standard(F, k), k)


def test_zubrilin_delta():
    f = P("x1.x2")
    assert pl.zubrilin_delta(f, 2, 0, 3) == f
    assert pl.zubrilin_delta(f, 2, 1, 3) == P("x3.x1.x2 + x1.x3.x2")
    assert pl.zubrilin_delta(f, 2, 2, 3) == P("x3.x1.x3.x2")


@pytest.mark.parametrize("n,k", [(1, 2), (1, 3)])
def test_capelli_vanishes_above_n_squared(n, k):
    rep = pitest.is_identity(pl.capelli(F2, k), matrix_ring(2, n), mode="exhaustive")
    assert rep.verdict == "identity" and rep.mode == "exhaustive-basis"


def test_capelli5_vanishes_on_m2():
    rep = pitest.is_identity(pl.capelli(F2, 5), matrix_ring(2, 2), mode="exhaustive", budget=4 ** 10)
    assert rep.verdict == "identity" and rep.trials == 4 ** 10


def test_capelli4_is_not_an_identity_of_m2():
    rep = pitest.is_identity(pl.capelli(F2, 4), matrix_ring(2, 2))
    assert rep.verdict == "non-identity"


@pytest.mark.parametrize("p", [2, 3])
def test_g_is_central_on_m2(p):
    rep = pitest.is_central(pl.multilinearized_commutator_square(make_field(p)), matrix_ring(p, 2))
    assert rep.verdict == "central" and rep.complete
    assert rep.nonidentity.verdict == "non-identity"


def test_hike_stage1_examples():
    f1, r1 = pl.hike_stage1(P("x1"), 1, 1)
    assert f1 == P("x1.x2 - x2.x1") and r1.verify()
    f2, r2 = pl.hike_stage1(f1, 1, 1)
    y1, y2 = r1.roles["h"][0], r2.roles["h"][0]
    # the fresh variable of the second hike lands innermost: [[x1, y2], y1]
    inner = pl.commutator(x(F3, 1), x(F3, y2))
    assert f2 == pl.commutator(inner, x(F3, y1)) and r2.verify()
    f3, r3 = pl.hike_stage1(P("x1.x2"), 2, 1)
    assert f3 == P("x1.x2.x3 - x1.x3.x2") and r3.verify()
    with pytest.raises(VariableAbsent):
        pl.hike_stage1(P("x1"), 2, 1)


def test_hike_stage3_examples():
    f, rec = pl.hike_stage3(P("x1"), 1, 1, 2)
    assert f == P("x2.x2.x1 - x2.x1") and rec.verify()
    # y1 -> lambda: (lambda^2 - lambda) kills F_2 scalars but not GF(4) \ F_2
    F4 = make_field(2, 2)
    g = parse_poly("x2.x2.x1 + x2.x1", F4)
    one = Matrix.identity(F4, 1)
    for lam, zero in ((0, True), (1, True), (2, False), (3, False)):
        val = pitest.evaluate(g, {1: one, 2: Matrix.scalar(F4, 1, lam)})
        assert val.is_zero() == zero


def test_hike_expand_examples():
    f, rec = pl.hike_expand(P("x1"), 1, 1, 1, 2)
    assert format_poly(f) == "x2.x1_1.x1_1.x3.x1" and rec.verify()
    # identity insertions in a unital context recover the original value
    u = P("x1").with_unital()
    g, rec = pl.hike_expand(u, 1, 1, 2)
    one = NcPolynomial.one(F3)
    spec = {v: one for v in rec.roles["h"] + rec.roles["h'"] + rec.roles["x"]}
    assert g.substitute(spec) == u


def test_hike_expand_radical_power_vanishes():
    alg = realize(_grassmann())
    f, rec = pl.hike_expand(P("x1"), 1, 1, 1, 4)
    A, B, E = alg.J
    one = Matrix.identity(alg.field, 4)
    a = {1: B, rec.roles["h"][0]: one, rec.roles["h'"][0]: one, rec.roles["x"][0]: A + B}
    assert alg.nilpotence_index < 4
    assert pitest.evaluate(f, a).is_zero()


def _grassmann():
    from piforge.quiver import grassmann_quiver
    return grassmann_quiver(3)


def _chain_1_2(p=2):
    return QuiverSpec(p, p, (Vertex("v1", 1), Vertex("v2", 2)), (Edge("v1", "v2"),))


def test_literal_h2_is_not_central():
    # c_4 * g is a scalar multiple of c_4 on M_2, and c_4 has non-scalar values
    rep = pitest.is_central(pl.central_h(F2, 2), matrix_ring(2, 2), mode="randomized", budget=5000, seed=1)
    assert rep.verdict == "non-central"
    assert not pitest.evaluate(pl.central_h(F2, 2), rep.witness).is_scalar()


def test_hike_stage2_term():
    f, rec = pl.hike_stage2_term(F2, 1, 2, central="g")
    assert rec.verify() and rec.roles["z"] == (1, 2)
    with pytest.raises(UnsupportedN):
        pl.hike_stage2_term(F2, 2, 2)
    # all substitutions inside M_2: H = g is central there and the terms cancel
    rep = pitest.is_identity(f, matrix_ring(2, 2), mode="exhaustive")
    assert rep.verdict == "identity" and rep.complete and rep.trials == 4 ** 8
    # with the literal h_2 = c_4 g the cancellation fails
    f_h, _ = pl.hike_stage2_term(F2, 1, 2)
    assert pitest.is_identity(f_h, matrix_ring(2, 2), mode="randomized", budget=3000, seed=3).verdict \
        == "non-identity"


def test_hike_stage2_term_witness_across_blocks():
    f, rec = pl.hike_stage2_term(F2, 1, 2, central="g")
    alg = realize(_chain_1_2())
    assert alg.N == 3
    K = alg.field
    # a nonzero (scalar) value of g on M_2(F_2), embedded in the 2-block
    g = pl.multilinearized_commutator_square(F2)
    found = pitest.is_identity(g, matrix_ring(2, 2), mode="exhaustive")
    assert found.verdict == "non-identity"

    def embed(m):
        rows = [[0] * 3 for _ in range(3)]
        for i in range(2):
            for j in range(2):
                rows[1 + i][1 + j] = m.rows[i][j]
        return Matrix.from_lists(K, rows)

    a = {v: embed(found.witness[k + 1]) for k, v in enumerate(rec.roles["H"])}
    e11 = Matrix.unit(K, 3, 0, 0)
    a.update({rec.roles["h_i"][0]: e11, rec.roles["y"][0]: Matrix.unit(K, 3, 0, 1),
              rec.roles["z"][0]: e11, rec.roles["z"][1]: Matrix.identity(K, 3)})
    assert not pitest.evaluate(f, a).is_zero()


def test_hike_stage4_term():
    f, rec = pl.hike_stage4_term(F3, 1, 1)
    assert rec.verify() and len(f) == 2
    # identical specialization of both sandwich groups collapses the commutator
    same = {a: x(F3, b) for a, b in zip(rec.roles["left_a"] + rec.roles["right_a"],
                                          rec.roles["left"] + rec.roles["right"])}
    assert f.substitute(same).is_zero()
    # scalars commute: identity on the 1x1 algebra over F_3
    rep = pitest.is_identity(f, matrix_ring(3, 1), mode="exhaustive")
    assert rep.verdict == "identity" and rep.complete


def test_every_hike_record_replays():
    base = P("x1.x2 + 2*x2.x1.x1")
    recs = [pl.hike_stage1(base, 1, 1)[1], pl.hike_stage1(base, 2, 2)[1],
            pl.hike_stage1(base, 1, 1, power=3)[1], pl.hike_stage3(base, 1, 1, 9)[1],
            pl.hike_expand(base, 2, 1, 3, 3)[1], pl.hike_stage2_term(F3, 1, 2, 2, 1, central="g")[1],
            pl.hike_stage4_term(F3, 1, 2)[1], pl.hike_stage2_term(F3, 0, 1)[1]]
    assert all(r.verify() for r in recs)


def test_oversized_expansion_is_refused():
    with pytest.raises(TooLarge):
        pl.hike_stage3(P("x1"), 1, 2, 9)


@pytest.mark.parametrize("word", [(1,), (1, 2), (2, 1, 2), (3, 2, 1)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_commutator_leibniz_identity(word, k):
    """f(.., [a, b1..bk], ..) = sum_j f(.., b1..[a, bj]..bk, ..) for monomial f."""
    f = NcPolynomial.monomial(F3, word)
    a = x(F3, 10)
    bs = [x(F3, 11 + j) for j in range(k)]
    prod = NcPolynomial.one(F3)
    for b in bs:
        prod = prod * b
    lhs = f.substitute({1: pl.commutator(a, prod)})
    rhs = NcPolynomial.zero(F3)
    for j in range(k):
        term = NcPolynomial.one(F3)
        for i, b in enumerate(bs):
            term = term * (pl.commutator(a, b) if i == j else b)
        rhs = rhs + f.substitute({1: term})
    assert lhs == rhs
