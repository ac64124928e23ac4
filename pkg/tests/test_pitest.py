import json
import random

import numpy as np
import pytest

from piforge import pitest, polylib as pl
from piforge.coeffring import make_field
from piforge.errors import BudgetExceeded, NotAlternating, UnknownPurity
from piforge.freealg import NcPolynomial, format_poly, pair, parse_poly, partial_linearization, x
from piforge.matalg import Matrix
from piforge.quiver import grassmann_quiver, matrix_ring, realize, single_vertex

import oracles

F2, F3 = make_field(2), make_field(3)


@pytest.fixture(scope="module")
def grass():
    return realize(grassmann_quiver(3))


def P(text, F=F3):
    return parse_poly(text, F)


def test_evaluate_examples():
    e11, e12 = Matrix.unit(F3, 2, 0, 0), Matrix.unit(F3, 2, 0, 1)
    assert pitest.evaluate(P("x1.x2 - x2.x1"), {1: e11, 2: e12}) == e12
    units = [Matrix.unit(F2, 2, i, j) for i in range(2) for j in range(2)]
    s4 = pl.standard(F2, 4)
    assert pitest.evaluate(s4, dict(zip(range(1, 5), units))).is_zero()
    assert pitest.evaluate(NcPolynomial.zero(F3), {}, n=2, field=F3).is_zero()


def test_batched_evaluation_matches_oracle():
    """eval_batch over GF(4) against list-of-lists evaluation with brute-force tables."""
    K = make_field(2, 2)
    R = oracles.Ring(2, 2)
    rng = random.Random(9)
    f = parse_poly("x1.x2 + x2.x1.x1 + g*x3.x1", K)
    rep = pitest.MatrixRep(K, 2)
    for _ in range(30):
        mats = {i: [[rng.randrange(4) for _ in range(2)] for _ in range(2)] for i in (1, 2, 3)}
        want = oracles.mat_eval(R, f.terms, mats, 2)
        arrays = {i: rep.to_array(Matrix.from_lists(K, m))[None] for i, m in mats.items()}
        got = rep.from_array(pitest.eval_batch(f, rep, arrays)[0])
        assert [list(r) for r in got.rows] == want


def test_grassmann_identity(grass):
    rep = pitest.is_identity(P("x1.x2.x3 - x2.x1.x3 - x3.x1.x2 + x3.x2.x1"), grass)
    assert rep.verdict == "identity" and rep.mode == "exhaustive-basis" and rep.complete


def test_grassmann_commutator_witness(grass):
    rep = pitest.is_identity(P("x1.x2 - x2.x1"), grass)
    A, B, E = grass.J
    assert rep.verdict == "non-identity"
    assert rep.witness == {1: A, 2: B}
    assert rep.value == E.scale(-2) == pitest.evaluate(P("x1.x2 - x2.x1"), rep.witness)


def test_capelli2_on_commutative_ring():
    assert pitest.is_identity(pl.capelli(F2, 2), matrix_ring(2, 1)).verdict == "identity"


def test_nonlinear_search_modes(grass):
    f = P("x1.x1")
    rep = pitest.is_identity(f, matrix_ring(2, 1))
    assert rep.verdict == "non-identity" and rep.mode == "exhaustive-all"
    # [x1 x1, x2] is not an identity: (1 + A)^2 = 1 + 2A does not commute with B
    assert pitest.is_identity(P("x1.x1.x2 - x2.x1.x1"), grass).verdict == "non-identity"
    # [[x1, x2], x1] is
    rep = pitest.is_identity(P("2*x1.x2.x1 - x2.x1.x1 - x1.x1.x2"), grass, mode="exhaustive-all")
    assert rep.verdict == "identity" and rep.trials == 81 ** 2


def test_quasi_linear():
    assert pitest.is_quasi_linear(P("x1.x2"), matrix_ring(2, 2), 1)[0] == "yes"
    f = parse_poly("x1.x1", F2)
    assert pitest.is_quasi_linear(f, matrix_ring(2, 1), 1)[0] == "yes"
    verdict, witness = pitest.is_quasi_linear(f, matrix_ring(2, 2), 1)
    assert verdict == "no"
    a, b = witness[1]
    assert not (a * b + b * a).is_zero()


def test_central():
    F2m2 = matrix_ring(2, 2)
    rep = pitest.is_central(parse_poly("x1", F2), F2m2)
    assert rep.verdict == "non-central" and not rep.witness[1].is_scalar()
    assert pitest.is_central(parse_poly("x1", F2), matrix_ring(2, 1)).verdict == "central"


def test_nilpotence_diagnostics(grass):
    A, B, E = grass.J
    I = grass.S[0]
    f = P("x1.x2.x3")
    out = pitest.nilpotence_diagnostics(f, grass, {1: A, 2: B, 3: A}, {1: "radical", 2: "radical", 3: "radical"})
    assert out["monomials"][0]["flagged"] and out["monomials"][0]["zero"]
    out = pitest.nilpotence_diagnostics(f, grass, {1: A, 2: I, 3: I}, {1: "radical", 2: "semisimple", 3: "semisimple"})
    assert not out["monomials"][0]["flagged"]
    out = pitest.nilpotence_diagnostics(f, grass, {1: I, 2: I, 3: I}, dict.fromkeys((1, 2, 3), "semisimple"))
    assert not out["monomials"][0]["flagged"]
    with pytest.raises(UnknownPurity):
        pitest.nilpotence_diagnostics(f, grass, {1: A, 2: A, 3: A}, {1: "radical", 2: "radical"})


def test_flagged_monomials_always_vanish(grass):
    rng = random.Random(4)
    A, B, E = grass.J
    rad = [A, B, E, A + B, B.scale(2) + E]
    f = P("x1.x2.x3 + x2.x3.x1.x2 + 2*x3.x1")
    for _ in range(30):
        assign = {i: rng.choice(rad) for i in (1, 2, 3)}
        out = pitest.nilpotence_diagnostics(f, grass, assign, dict.fromkeys((1, 2, 3), "radical"))
        for row in out["monomials"]:
            assert row["zero"] or not row["flagged"]


def test_admissible(grass):
    rep = pitest.is_admissible(P("x1"), realize(single_vertex(2, 2)))
    assert rep.verdict == "yes"
    rep = pitest.is_admissible(P("x1.x2 - x2.x1"), grass)
    A, B, E = grass.J
    assert rep.verdict == "yes" and set(rep.witness.values()) == {A, B}
    assert not pitest.evaluate(P("x1.x2 - x2.x1"), rep.witness).is_zero()
    assert rep.degree_vector.entries == (1, 1, 1)
    rep = pitest.is_admissible(P("x1 - x1"), grass)
    assert rep.verdict == "not-found" and rep.exhaustive


def test_absorption_n1():
    rep = pitest.absorption_check(pl.capelli(make_field(5), 1), 1, make_field(5), trials=100, seed=2)
    assert "signed" in rep["working"] and rep["telescope_vanishes"]
    with pytest.raises(NotAlternating):
        pitest.absorption_check(P("x1.x2"), 1, F3, t=2)


def test_induced_hc_identity():
    f = pitest.induced_hc_identity(P("x1"), 1)
    assert f == P("x1 - x2.x1")
    g = pitest.induced_hc_identity(P("x1.x2"), 2)
    assert len(g) == 4 and g == P("x1.x2 - x3.x1.x2 - x1.x3.x2 + x3.x1.x3.x2")


def test_tideal_boolean_example():
    res = pitest.tideal_member([parse_poly("x1.x1 + x1", F2)], parse_poly("x1.x2 + x2.x1", F2), 2)
    assert res.verdict == "member" and res.certificate.verify()
    json.dumps(res.to_json())


def test_tideal_delta_target():
    gen = P("x1.x1.x2")
    delta = partial_linearization(gen, 1).rename({pair(1, 1): 1, pair(1, 2): 3})
    res = pitest.tideal_member([gen], delta, 3)
    assert res.verdict == "member" and res.certificate.verify()


def test_tideal_budget():
    with pytest.raises(BudgetExceeded):
        pitest.tideal_member([P("x1")], P("x1.x2.x3"), 2)
    res = pitest.tideal_member([P("x1.x2 - x2.x1")], P("x1"), 2)
    assert res.verdict == "not-found"


def _multilinear_corpus(F, rng, count=12):
    out = []
    for _ in range(count):
        k = rng.randint(1, 3)
        terms = {}
        for _ in range(rng.randint(1, 4)):
            w = tuple(rng.sample(range(1, k + 1), k))
            terms[w] = F.add(terms.get(w, 0), rng.randrange(1, F.p))
        out.append(NcPolynomial(F, terms))
    return out


@pytest.mark.parametrize("which", ["m1f2", "m1f3", "grass"])
def test_multilinear_completeness(which, grass):
    alg = {"m1f2": lambda: matrix_ring(2, 1), "m1f3": lambda: matrix_ring(3, 1), "grass": lambda: grass}[which]()
    rng = random.Random(17)
    polys = _multilinear_corpus(alg.field, rng) + [P("x1.x2 - x2.x1", alg.field),
                                                     P("x1.x2.x3 - x2.x1.x3 - x3.x1.x2 + x3.x2.x1", alg.field)]
    for f in polys:
        basis = pitest.is_identity(f, alg, mode="exhaustive-basis")
        full = pitest.is_identity(f, alg, mode="exhaustive-all")
        assert basis.verdict == full.verdict


def test_pure_agrees_with_all_when_quasi_linear(grass):
    polys = [P("x1.x2 - x2.x1"), P("x1.x1.x1"), P("x1.x2.x1"), P("x1.x1 + x2"), P("x1.x2.x2 - x2.x2.x1")]
    for f in polys:
        pure = pitest.is_identity(f, grass, mode="exhaustive-pure")
        full = pitest.is_identity(f, grass, mode="exhaustive-all")
        if pure.complete:
            assert pure.verdict == full.verdict
        else:
            assert pure.verdict in ("inconclusive", full.verdict)


def test_quasi_linear_decomposition():
    """f(a + b) = f(a) + f(b) + Delta f(a, b) on random M_2(F_3) matrices."""
    f = P("x1.x1.x2 + 2*x2.x1.x1.x1 + x1")
    a1, a2 = pair(1, 1), pair(1, 2)
    step = NcPolynomial.var(F3, a1) + NcPolynomial.var(F3, a2)
    delta = f.substitute({1: step}) - f.substitute({1: x(F3, a1)}) - f.substitute({1: x(F3, a2)})
    rng = np.random.default_rng(8)
    for _ in range(200):
        m = [Matrix.from_lists(F3, rng.integers(0, 3, (2, 2)).tolist()) for _ in range(3)]
        lhs = pitest.evaluate(f, {1: m[0] + m[1], 2: m[2]})
        rhs = (pitest.evaluate(f, {1: m[0], 2: m[2]}) + pitest.evaluate(f, {1: m[1], 2: m[2]})
               + pitest.evaluate(delta, {a1: m[0], a2: m[1], 2: m[2]}))
        assert lhs == rhs


def test_randomized_report_independent_of_workers(monkeypatch):
    f = pl.standard(F2, 4)
    alg = matrix_ring(2, 3)
    reports = []
    for n in ("1", "3", "8"):
        monkeypatch.setenv("PIFORGE_THREADS", n)
        rep = pitest.is_identity(f, alg, mode="randomized", budget=5000, seed=11)
        reports.append(json.dumps(rep.to_json(), sort_keys=True))
    assert len(set(reports)) == 1
    assert json.loads(reports[0])["verdict"] == "non-identity"


def test_exhaustive_report_independent_of_workers(monkeypatch, grass):
    f = P("x1.x2.x3 - x3.x2.x1")
    reports = []
    for n in ("1", "2", "5"):
        monkeypatch.setenv("PIFORGE_THREADS", n)
        reports.append(json.dumps(pitest.is_identity(f, grass, mode="exhaustive-all").to_json(), sort_keys=True))
    assert len(set(reports)) == 1


def test_report_json_replays(grass):
    rep = pitest.is_identity(P("x1.x2 - x2.x1"), grass).to_json()
    witness = {int(k[1:]): Matrix.from_json(v) for k, v in rep["witness"].items()}
    assert pitest.evaluate(P("x1.x2 - x2.x1"), witness).to_json() == rep["value"]
    assert format_poly(P("x1")) == "x1"
