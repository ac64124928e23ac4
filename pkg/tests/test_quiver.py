import itertools

import numpy as np
import pytest

from piforge.errors import InvalidQuiver, InvalidStep, NotAPath, TooLarge
from piforge.matalg import Matrix
from piforge.quiver import (DegreeVector, Edge, QuiverSpec, ReductionStep, Vertex, apply_reduction,
                            chain_bound, compare_degree_vectors, enumerate_pure, grassmann_quiver,
                            legal_steps, path_degree_vector, random_quiver, realize,
                            reduction_chain, reduction_measure, single_vertex, validate)


def chain(p=2):
    return QuiverSpec(p, p, (Vertex("I", 1), Vertex("II", 2)), (Edge("I", "II"),))


def test_validate_examples():
    assert validate(single_vertex(2, 1)) == []
    both = QuiverSpec(2, 2, (Vertex("a", 1), Vertex("b", 1)), (Edge("a", "b"), Edge("b", "a")))
    assert any(v.startswith("cycle") for v in validate(both))
    mism = QuiverSpec(2, 2, (Vertex("a", 1, glue="c"), Vertex("b", 2, glue="c")))
    assert any(v.startswith("glue-mismatch") for v in validate(mism))
    assert validate(grassmann_quiver(3)) == []
    with pytest.raises(InvalidQuiver):
        realize(both)


def test_realize_single_vertex():
    alg = realize(single_vertex(2, 1))
    assert alg.N == 1 and alg.J == [] and alg.nilpotence_index == 1
    assert alg.S == [Matrix.identity(alg.field, 1)]


def test_realize_grassmann():
    alg = realize(grassmann_quiver(3))
    K = alg.field
    E = {(i, j): Matrix.unit(K, 4, i, j) for i in range(4) for j in range(4)}
    A = E[0, 1] + E[2, 3]
    B = E[0, 2] - E[1, 3]
    EE = E[0, 3]
    assert alg.N == 4 and alg.S == [Matrix.identity(K, 4)]
    assert alg.J == [A, B, EE]
    assert A * B == -EE and B * A == EE
    assert (A * A).is_zero() and (B * B).is_zero()
    assert alg.nilpotence_index == 3


def test_realize_chain():
    alg = realize(chain())
    assert alg.N == 3 and len(alg.S) == 5 and len(alg.J) == 2 and alg.nilpotence_index == 2
    K = alg.field
    assert set(alg.J) == {Matrix.unit(K, 3, 0, 1), Matrix.unit(K, 3, 0, 2)}


def test_realize_twisted_and_frobenius_glued():
    # two 1x1 vertices over GF(4) glued by Frobenius: diagonal (a, a^2)
    spec = QuiverSpec(2, 2, (Vertex("a", 1, 2, glue="c"), Vertex("b", 1, 2, glue="c", twist=1)))
    alg = realize(spec)
    K = alg.field
    for m in alg.S:
        a, b = m.rows[0][0], m.rows[1][1]
        assert b == K.frobenius(a, 1)


def test_realize_size_caps():
    with pytest.raises(TooLarge):
        realize(single_vertex(2, 13))


def test_realize_structure_invariants():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(25):
        spec = random_quiver(rng, 3)
        alg = realize(spec)
        t = alg.nilpotence_index
        if len(alg.J) ** t > 5000:
            continue
        checked += 1
        # products of index-many radical basis elements vanish
        for word in itertools.product(alg.J, repeat=t):
            prod = word[0]
            for m in word[1:]:
                prod = prod * m
            assert prod.is_zero()
    assert checked >= 10


def test_path_degree_vectors():
    assert path_degree_vector(single_vertex(2, 3), ["v1"]).entries == (3,)
    dv = path_degree_vector(grassmann_quiver(3), ["v1", "v2", "v4"])
    assert dv.entries == (1, 1, 1) and dv.glue == ((0, 1, 2),)
    assert path_degree_vector(chain(), ["I", "II"]).entries == (1, 2)
    with pytest.raises(NotAPath):
        path_degree_vector(grassmann_quiver(3), ["v1", "v4"])


def test_compare_degree_vectors():
    u = DegreeVector((3, 1, 3, 3))
    v = DegreeVector.glued((3, 2, 2, 3, 2, 3, 3), (4, 6, 7))
    assert compare_degree_vectors(u, v) == "greater"
    assert compare_degree_vectors(v, u) == "less"
    assert compare_degree_vectors(u, DegreeVector((3, 1, 3, 3))) == "equal"
    assert compare_degree_vectors(DegreeVector((2,)), DegreeVector((1, 1, 1))) == "greater"


def test_compare_is_total_preorder():
    rng = np.random.default_rng(3)
    vecs = []
    for _ in range(40):
        entries = tuple(int(x) for x in rng.integers(1, 4, size=rng.integers(1, 6)))
        pos = [i for i, d in enumerate(entries) if d == entries[0]]
        vecs.append(DegreeVector(entries, (tuple(pos),) if rng.random() < 0.5 else ()))
    rank = {"less": -1, "equal": 0, "greater": 1}
    for a, b in itertools.product(vecs, repeat=2):
        assert rank[compare_degree_vectors(a, b)] == -rank[compare_degree_vectors(b, a)]
    for a, b, c in itertools.product(vecs[:15], repeat=3):
        if compare_degree_vectors(a, b) != "less" and compare_degree_vectors(b, c) != "less":
            assert compare_degree_vectors(a, c) != "less"


def test_apply_reduction_examples():
    two = QuiverSpec(2, 2, (Vertex("a", 2), Vertex("b", 2)), (Edge("a", "b"),))
    glued = apply_reduction(two, ReductionStep("glue-vertices", ("a", "b")))
    assert len(glued.vertex_classes()) == 1
    lowered = apply_reduction(two, ReductionStep("lower-matrix-degree", ("a", 1)))
    assert lowered.vertex("a").n == 1
    dropped = apply_reduction(two, ReductionStep("drop-vertex", ("b",)))
    assert [v.id for v in dropped.vertices] == ["a"] and dropped.edges == ()
    for new in (glued, lowered, dropped):
        assert reduction_measure(new) < reduction_measure(two)
    assert reduction_measure(dropped)[1] < reduction_measure(two)[1]
    with pytest.raises(InvalidStep):
        apply_reduction(two, ReductionStep("lower-matrix-degree", ("a", 2)))
    with pytest.raises(InvalidStep):
        apply_reduction(two, ReductionStep("teleport", ("a",)))
    mid = QuiverSpec(2, 2, (Vertex("a", 1), Vertex("b", 1), Vertex("c", 1)), (Edge("a", "b"), Edge("b", "c")))
    with pytest.raises(InvalidStep):
        apply_reduction(mid, ReductionStep("drop-vertex", ("b",)))


def test_shrink_twist_and_relations():
    spec = QuiverSpec(2, 2, (Vertex("a", 1, 4), Vertex("b", 1, 1)))
    s2 = apply_reduction(spec, ReductionStep("shrink-twist", ("a", 2)))
    assert s2.vertex("a").t == 2 and reduction_measure(s2) < reduction_measure(spec)
    with pytest.raises(InvalidStep):
        apply_reduction(spec, ReductionStep("shrink-twist", ("a", 3)))
    r = apply_reduction(spec, ReductionStep("linear-relation", ("a", "b")))
    assert len(r.relation_blocks()) == 1 and reduction_measure(r) < reduction_measure(spec)


def test_enumerate_pure():
    alg = realize(grassmann_quiver(3))
    K = alg.field
    scalars = list(enumerate_pure(alg, "semisimple", budget=100))
    assert scalars == [Matrix.scalar(K, 4, c) for c in range(3)]
    assert len(list(enumerate_pure(alg, "radical", budget=100))) == 27
    first = list(enumerate_pure(alg, "radical", budget=10, seed=4))
    again = list(enumerate_pure(alg, "radical", budget=10, seed=4))
    assert len(first) == 10 and first == again


def test_json_roundtrip():
    spec = grassmann_quiver(3)
    assert QuiverSpec.from_json(spec.to_json()) == spec


def test_fuzzed_reduction_chains_terminate():
    rng = np.random.Generator(np.random.Philox(0))
    for _ in range(200):
        spec = random_quiver(rng, 6)
        bound = chain_bound(spec)
        steps, measures, final = reduction_chain(spec, rng)
        assert all(a > b for a, b in zip(measures, measures[1:]))
        assert len(steps) <= bound < 10000
        assert legal_steps(final) == []
