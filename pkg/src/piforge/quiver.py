"""Abstract full quivers, their block-form algebras, degree vectors and
reduction steps."""
from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field as dc_field, replace
from graphlib import CycleError, TopologicalSorter
from typing import Iterator

import numpy as np

from .coeffring import Field, is_prime, make_field, prime_factors
from .errors import InvalidQuiver, InvalidStep, NotAPath, TooLarge
from .linalg import SpanBasis
from .matalg import Matrix

MAX_AMBIENT = 12
MAX_FIELD = 2 ** 16
EDGE_KINDS = ("identical", "frobenius", "proportional")


@dataclass(frozen=True)
class Vertex:
    id: str
    n: int
    t: int = 1
    glue: str | None = None     # defaults to the vertex id
    twist: int = 0

    @property
    def cls(self) -> str:
        return self.id if self.glue is None else self.glue


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    glue: str | None = None
    kind: str = "identical"
    e: int = 0                  # Frobenius exponent for kind "frobenius"
    factor: str = "1"           # scalar in K for kind "proportional"

    @property
    def cls(self) -> str:
        return f"{self.src}->{self.dst}" if self.glue is None else self.glue


@dataclass(frozen=True)
class QuiverSpec:
    p: int
    q: int
    vertices: tuple
    edges: tuple = ()
    relations: tuple = ()       # blocks of vertex glue classes tied by linear relations
    provenance: tuple = ()

    @property
    def s(self) -> int:
        return round(math.log(self.q, self.p))

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def vertex_classes(self) -> dict:
        out: dict = {}
        for v in self.vertices:
            out.setdefault(v.cls, []).append(v)
        return out

    def edge_classes(self) -> dict:
        out: dict = {}
        for e in self.edges:
            out.setdefault(e.cls, []).append(e)
        return out

    def relation_blocks(self) -> list[frozenset]:
        """Partition of vertex glue classes; untouched classes are singletons."""
        classes = list(self.vertex_classes())
        seen, blocks = set(), []
        for block in self.relations:
            b = frozenset(c for c in block if c in classes)
            if b:
                blocks.append(b)
                seen |= b
        blocks += [frozenset([c]) for c in classes if c not in seen]
        return blocks

    def successors(self) -> dict:
        out = {v.id: [] for v in self.vertices}
        for e in self.edges:
            out.setdefault(e.src, []).append(e.dst)
        return out

    def predecessors(self) -> dict:
        out = {v.id: [] for v in self.vertices}
        for e in self.edges:
            out.setdefault(e.dst, []).append(e.src)
        return out

    # -- json -------------------------------------------------------------------
    def to_json(self) -> dict:
        verts = [{"id": v.id, "n": v.n, "t": v.t, "glue": v.cls, "twist": v.twist}
                 for v in self.vertices]
        edges = []
        for e in self.edges:
            d = {"from": e.src, "to": e.dst, "glue": e.cls, "kind": e.kind}
            if e.kind == "frobenius":
                d["e"] = e.e
            if e.kind == "proportional":
                d["factor"] = e.factor
            edges.append(d)
        out = {"base": {"p": self.p, "q": self.q}, "vertices": verts, "edges": edges}
        if self.relations:
            out["relations"] = [sorted(b) for b in self.relations]
        return out

    @classmethod
    def from_json(cls, data) -> "QuiverSpec":
        if isinstance(data, str):
            data = json.loads(data)
        base = data["base"]
        p, q = int(base["p"]), int(base.get("q", base["p"]))
        verts = tuple(Vertex(str(v["id"]), int(v["n"]), int(v.get("t", 1)),
                             v.get("glue"), int(v.get("twist", 0))) for v in data["vertices"])
        edges = tuple(Edge(str(e["from"]), str(e["to"]), e.get("glue"), e.get("kind", "identical"),
                           int(e.get("e", 0)), str(e.get("factor", "1")))
                      for e in data.get("edges", []))
        rels = tuple(frozenset(b) for b in data.get("relations", []))
        return cls(p, q, verts, edges, rels)


def single_vertex(p: int, n: int, q: int | None = None, t: int = 1) -> QuiverSpec:
    """The quiver of M_n(GF(q^t))."""
    return QuiverSpec(p, q or p, (Vertex("v1", n, t),))


def grassmann_quiver(p: int = 3) -> QuiverSpec:
    """Four identically glued (1,1) vertices; alpha edges glued, beta edges
    glued with factor -1 (the two-generator Grassmann algebra)."""
    verts = tuple(Vertex(f"v{k}", 1, 1, "I") for k in range(1, 5))
    edges = (Edge("v1", "v2", "alpha"), Edge("v3", "v4", "alpha"),
             Edge("v1", "v3", "beta"), Edge("v2", "v4", "beta", "proportional", factor="-1"))
    return QuiverSpec(p, p, verts, edges)


# -- validation -----------------------------------------------------------------

def validate(spec: QuiverSpec) -> list[str]:
    out = []
    if not is_prime(spec.p):
        out.append(f"base: p = {spec.p} is not prime")
    elif spec.q < spec.p or spec.p ** spec.s != spec.q:
        out.append(f"base: q = {spec.q} is not a power of {spec.p}")
    ids = [v.id for v in spec.vertices]
    for vid in sorted({i for i in ids if ids.count(i) > 1}):
        out.append(f"duplicate-vertex: {vid}")
    known = set(ids)
    for v in spec.vertices:
        if v.n < 1 or v.t < 1:
            out.append(f"bad-label: vertex {v.id} has (n, t) = ({v.n}, {v.t})")
        if v.twist < 0:
            out.append(f"bad-twist: vertex {v.id} twist {v.twist}")
    for name, members in spec.vertex_classes().items():
        labels = {(v.n, v.t) for v in members}
        if len(labels) > 1:
            out.append(f"glue-mismatch: class {name} has labels {sorted(labels)}")
    pairs = set()
    for e in spec.edges:
        if e.src not in known or e.dst not in known:
            out.append(f"unknown-vertex: edge {e.src}->{e.dst}")
        if e.src == e.dst:
            out.append(f"loop: edge {e.src}->{e.dst}")
        if (e.src, e.dst) in pairs:
            out.append(f"double-edge: {e.src}->{e.dst}")
        pairs.add((e.src, e.dst))
        if e.kind not in EDGE_KINDS:
            out.append(f"bad-kind: edge {e.src}->{e.dst} kind {e.kind!r}")
        if e.kind == "frobenius" and e.e < 0:
            out.append(f"bad-kind: edge {e.src}->{e.dst} exponent {e.e}")
        if e.kind == "proportional" and e.factor.strip() in ("0", "", "-0", "+0"):
            out.append(f"bad-factor: edge {e.src}->{e.dst} factor 0")
    vcls = {v.id: v.cls for v in spec.vertices}
    for name, members in spec.edge_classes().items():
        ends = {(vcls.get(e.src), vcls.get(e.dst)) for e in members}
        if len(ends) > 1:
            out.append(f"edge-glue-mismatch: class {name} joins {sorted(map(str, ends))}")
    graph = TopologicalSorter({i: [] for i in known})
    for e in spec.edges:
        if e.src != e.dst:
            graph.add(e.dst, e.src)
    try:
        graph.prepare()
    except CycleError as exc:
        out.append(f"cycle: {' -> '.join(map(str, exc.args[1]))}")
    return out


def topological_order(spec: QuiverSpec) -> list[str]:
    """Kahn's algorithm, ties broken by input order."""
    pos = {v.id: k for k, v in enumerate(spec.vertices)}
    indeg = {v.id: 0 for v in spec.vertices}
    succ = spec.successors()
    for e in spec.edges:
        indeg[e.dst] += 1
    heap = [(pos[v], v) for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (pos[w], w))
    if len(order) != len(spec.vertices):
        raise InvalidQuiver("graph has a cycle")
    return order


# -- realization ----------------------------------------------------------------

def primitive_element(K: Field) -> int:
    Q = K.order
    factors = prime_factors(Q - 1)
    for c in range(1, Q):
        if all(K.pow(c, (Q - 1) // r) != 1 for r in factors):
            return c
    raise AssertionError("no primitive element")  # pragma: no cover


def subfield_basis(K: Field, q: int, t: int) -> list[int]:
    """An F_q-basis 1, b, ..., b^(t-1) of GF(q^t) inside K."""
    Q = K.order
    if (Q - 1) % (q ** t - 1):
        raise ValueError(f"GF({q}^{t}) is not a subfield of {K.name}")
    b = K.pow(primitive_element(K), (Q - 1) // (q ** t - 1))
    return [K.pow(b, k) for k in range(t)]


def subfield_elements(K: Field, q: int) -> list[int]:
    """Elements of GF(q) inside K, in increasing encoding."""
    if q == K.order:
        return list(range(q))
    b = K.pow(primitive_element(K), (K.order - 1) // (q - 1))
    return sorted({0} | {K.pow(b, k) for k in range(q - 1)})


class _FqSpan:
    """Span over the subfield F_q, maintained as an F_p-span of expansions."""

    def __init__(self, K: Field, fq_basis: list[int]):
        self.K = K
        self.fq_basis = fq_basis
        self.span = SpanBasis(K.prime_field())
        self.basis: list[Matrix] = []

    def vector(self, m: Matrix) -> dict:
        K = self.K
        out = {}
        for i, row in enumerate(m.rows):
            for j, v in enumerate(row):
                if v:
                    for d, c in enumerate(K.digits(v)):
                        if c:
                            out[(i, j, d)] = c
        return out

    def contains(self, m: Matrix) -> bool:
        return self.span.contains(self.vector(m))

    def add(self, m: Matrix) -> bool:
        if m.is_zero() or self.contains(m):
            return False
        for c in self.fq_basis:
            self.span.add(self.vector(m.scale(c)))
        self.basis.append(m)
        return True

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class BlockAlgebra:
    spec: QuiverSpec
    field: Field                # K = GF(q^L)
    q: int
    N: int
    S: list
    J: list
    layout: dict                # vertex id -> (start, stop)
    order: list
    nilpotence_index: int
    scalars: list = dc_field(default_factory=list)     # GF(q) inside K
    s_labels: list = dc_field(default_factory=list)
    j_labels: list = dc_field(default_factory=list)

    @property
    def basis(self) -> list:
        return self.S + self.J

    @property
    def size(self) -> int:
        return self.q ** (len(self.S) + len(self.J))

    def block_of(self, index: int) -> str:
        for vid, (a, b) in self.layout.items():
            if a <= index < b:
                return vid
        raise IndexError(index)

    def summary(self) -> dict:
        K = self.field
        return {"field": K.name, "q": self.q, "N": self.N, "nilpotence_index": self.nilpotence_index,
                "layout": {k: list(v) for k, v in self.layout.items()},
                "S": [m.to_json()["rows"] for m in self.S],
                "J": [m.to_json()["rows"] for m in self.J]}


def _embed(K: Field, N: int, entries: dict) -> Matrix:
    rows = [[0] * N for _ in range(N)]
    for (i, j), v in entries.items():
        rows[i][j] = K.add(rows[i][j], v)
    return Matrix(K, tuple(tuple(r) for r in rows))


def realize(spec: QuiverSpec) -> BlockAlgebra:
    problems = validate(spec)
    if problems:
        raise InvalidQuiver("; ".join(problems))
    if spec.relations:
        raise InvalidQuiver("linear relations between vertices are not realizable")
    N = sum(v.n for v in spec.vertices)
    if N > MAX_AMBIENT:
        raise TooLarge(f"ambient size {N} > {MAX_AMBIENT}")
    L = math.lcm(*(v.t for v in spec.vertices)) if spec.vertices else 1
    if spec.q ** L > MAX_FIELD:
        raise TooLarge(f"field of order {spec.q}^{L} > {MAX_FIELD}")
    s = spec.s
    K = make_field(spec.p, s * L)
    order = topological_order(spec)
    layout, start = {}, 0
    for vid in order:
        n = spec.vertex(vid).n
        layout[vid] = (start, start + n)
        start += n
    fq_basis = subfield_basis(K, spec.p, s)

    S, s_labels = [], []
    for cls, members in spec.vertex_classes().items():
        n, t = members[0].n, members[0].t
        for u, v in itertools.product(range(n), repeat=2):
            for k, b in enumerate(subfield_basis(K, spec.q, t)):
                entries = {}
                for vert in members:
                    a = layout[vert.id][0]
                    entries[(a + u, a + v)] = K.frobenius(b, s * vert.twist)
                S.append(_embed(K, N, entries))
                s_labels.append((cls, u, v, k))

    k_basis = subfield_basis(K, spec.q, L)
    gens, j_labels = [], []
    for cls, members in spec.edge_classes().items():
        src0, dst0 = spec.vertex(members[0].src), spec.vertex(members[0].dst)
        for u, v in itertools.product(range(src0.n), range(dst0.n)):
            for k, b in enumerate(k_basis):
                entries = {}
                for e in members:
                    a, c = layout[e.src][0], layout[e.dst][0]
                    if e.kind == "frobenius":
                        val = K.frobenius(b, s * e.e)
                    elif e.kind == "proportional":
                        val = K.mul(K.parse(e.factor), b)
                    else:
                        val = b
                    entries[(a + u, c + v)] = val
                gens.append(_embed(K, N, entries))
                j_labels.append((cls, u, v, k))

    s_span = _FqSpan(K, fq_basis)
    for m in S:
        s_span.add(m)
    assert s_span.dim == len(S), "semisimple generators are dependent"

    j_span = _FqSpan(K, fq_basis)
    alg_scalars = set(subfield_elements(K, spec.q))
    labels = []
    for m, lab in zip(gens, j_labels):
        if j_span.add(m):
            labels.append(lab)
    frontier = list(j_span.basis)
    while frontier:
        new = []
        for x in frontier:
            products = [a * x for a in S] + [x * a for a in S]
            products += [x * y for y in j_span.basis] + [y * x for y in j_span.basis]
            for prod in products:
                prod = _monic(prod, alg_scalars)
                if j_span.add(prod):
                    labels.append(("closure",))
                    new.append(prod)
        frontier = new
    J = j_span.basis

    # Wedderburn form checks
    for m in J:
        for i in range(N):
            for j in range(N):
                if m.rows[i][j] and spec_block(layout, i) >= spec_block(layout, j):
                    raise AssertionError("radical element not strictly block upper triangular")
    both = _FqSpan(K, fq_basis)
    for m in S + J:
        both.add(m)
    assert both.dim == len(S) + len(J), "semisimple and radical spans intersect"
    for a in S:
        for b in S:
            assert both.contains(a * b), "semisimple part not closed"

    index = nilpotence_index(K, fq_basis, J, N)
    return BlockAlgebra(spec, K, spec.q, N, list(S), list(J), layout, order, index,
                        subfield_elements(K, spec.q), s_labels, labels)


def _monic(m: Matrix, scalars) -> Matrix:
    """Scale so the first nonzero entry is 1, when that entry lies in F_q."""
    for row in m.rows:
        for v in row:
            if v:
                return m.scale(m.field.inv(v)) if v in scalars else m
    return m


def spec_block(layout: dict, i: int) -> int:
    for k, (a, b) in enumerate(sorted(layout.values())):
        if a <= i < b:
            return k
    raise IndexError(i)


def nilpotence_index(K: Field, fq_basis, J: list, N: int) -> int:
    """Least t with (span J)^t = 0."""
    power = list(J)
    t = 1
    while power:
        span = _FqSpan(K, fq_basis)
        for a in power:
            for b in J:
                span.add(a * b)
        power = span.basis
        t += 1
        if t > N + 1:
            raise AssertionError("radical is not nilpotent")
    return t


def matrix_ring(p: int, n: int, q: int | None = None) -> BlockAlgebra:
    """M_n(F_q) as a one-vertex quiver algebra."""
    return realize(single_vertex(p, n, q))


def enumerate_pure(alg: BlockAlgebra, kind: str, budget: int, seed: int = 0) -> Iterator[Matrix]:
    """All of span(S) or span(J) in lexicographic coefficient order if it has
    at most ``budget`` elements, else ``budget`` seeded uniform samples."""
    basis = {"semisimple": alg.S, "radical": alg.J, "all": alg.basis}[kind]
    K, scal = alg.field, alg.scalars
    if alg.q ** len(basis) <= budget:
        coeffs = itertools.product(range(len(scal)), repeat=len(basis))
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        coeffs = (tuple(int(c) for c in rng.integers(0, len(scal), len(basis))) for _ in range(budget))
    zero = Matrix.zero(K, alg.N)
    for cs in coeffs:
        m = zero
        for c, b in zip(cs, basis):
            if c:
                m = m + b.scale(scal[c])
        yield m


# -- degree vectors ---------------------------------------------------------------

@dataclass(frozen=True)
class DegreeVector:
    entries: tuple
    glue: tuple = ()            # tuples of 0-based positions identified by gluing

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        groups = tuple(sorted(tuple(sorted(g)) for g in self.glue if len(g) > 1))
        for g in groups:
            if len({self.entries[i] for i in g}) > 1:
                raise ValueError(f"glued positions {g} carry different degrees")
        object.__setattr__(self, "glue", groups)

    @classmethod
    def glued(cls, entries, *groups, one_based: bool = True):
        off = 1 if one_based else 0
        return cls(tuple(entries), tuple(tuple(i - off for i in g) for g in groups))

    def representatives(self) -> list[int]:
        drop = {i for g in self.glue for i in g[1:]}
        return [d for i, d in enumerate(self.entries) if i not in drop]

    def counts(self) -> dict:
        out: dict = {}
        for d in self.representatives():
            out[d] = out.get(d, 0) + 1
        return out

    def key(self) -> tuple:
        """(k, d_k) pairs, largest k first; lexicographic order on keys is
        the degree-vector order."""
        return tuple(sorted(self.counts().items(), reverse=True))

    def to_json(self) -> dict:
        return {"entries": list(self.entries), "glue": [list(g) for g in self.glue]}


def compare_degree_vectors(u: DegreeVector, v: DegreeVector) -> str:
    cu, cv = u.counts(), v.counts()
    for k in sorted(set(cu) | set(cv), reverse=True):
        a, b = cu.get(k, 0), cv.get(k, 0)
        if a != b:
            return "greater" if a > b else "less"
    return "equal"


def path_degree_vector(spec: QuiverSpec, path) -> DegreeVector:
    path = list(path)
    if not path:
        raise NotAPath("empty path")
    ids = {v.id for v in spec.vertices}
    for vid in path:
        if vid not in ids:
            raise NotAPath(f"unknown vertex {vid}")
    arrows = {(e.src, e.dst) for e in spec.edges}
    for a, b in zip(path, path[1:]):
        if (a, b) not in arrows:
            raise NotAPath(f"no edge {a}->{b}")
    verts = [spec.vertex(vid) for vid in path]
    groups: dict = {}
    for pos, v in enumerate(verts):
        groups.setdefault(v.cls, []).append(pos)
    return DegreeVector(tuple(v.n for v in verts), tuple(tuple(g) for g in groups.values()))


def maximal_paths(spec: QuiverSpec) -> list[list[str]]:
    succ, pred = spec.successors(), spec.predecessors()
    out = []

    def walk(path):
        nxt = succ[path[-1]]
        if not nxt:
            out.append(list(path))
            return
        for w in nxt:
            walk(path + [w])

    for v in spec.vertices:
        if not pred[v.id]:
            walk([v.id])
    return out


# -- reductions -------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    kind: str
    payload: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": list(self.payload)}


def _rename_class(spec: QuiverSpec, old: str, new: str) -> tuple:
    return tuple(replace(v, glue=new) if v.cls == old else v for v in spec.vertices)


def apply_reduction(spec: QuiverSpec, step: ReductionStep) -> QuiverSpec:
    k, pl = step.kind, step.payload
    prov = spec.provenance + (step,)
    try:
        if k == "glue-vertices":
            a, b = spec.vertex(pl[0]), spec.vertex(pl[1])
            if a.cls == b.cls or (a.n, a.t) != (b.n, b.t):
                raise InvalidStep("vertices already glued or labels differ")
            verts = _rename_class(spec, b.cls, a.cls)
            rels = tuple(frozenset(a.cls if c == b.cls else c for c in blk) for blk in spec.relations)
            new = replace(spec, vertices=verts, relations=_merge_blocks(rels), provenance=prov)
        elif k == "glue-edges":
            e1, e2 = (_edge(spec, *pl[0]), _edge(spec, *pl[1]))
            cls = {v.id: v.cls for v in spec.vertices}
            if e1.cls == e2.cls or (cls[e1.src], cls[e1.dst]) != (cls[e2.src], cls[e2.dst]):
                raise InvalidStep("edges already glued or endpoints not glued positionally")
            old = e2.cls
            edges = tuple(replace(e, glue=e1.cls) if e.cls == old else e for e in spec.edges)
            new = replace(spec, edges=edges, provenance=prov)
        elif k == "linear-relation":
            classes = [spec.vertex(v).cls for v in pl]
            blocks = spec.relation_blocks()
            hit = {blk for blk in blocks for c in classes if c in blk}
            if len(hit) < 2:
                raise InvalidStep("relation adds nothing")
            merged = frozenset().union(*hit)
            rels = tuple(b for b in spec.relations if b not in hit and len(b) > 1) + (merged,)
            new = replace(spec, relations=rels, provenance=prov)
        elif k == "lower-matrix-degree":
            v, n = spec.vertex(pl[0]), int(pl[1])
            if not 1 <= n < v.n:
                raise InvalidStep(f"cannot lower {v.n} to {n}")
            verts = tuple(replace(w, n=n) if w.cls == v.cls else w for w in spec.vertices)
            new = replace(spec, vertices=verts, provenance=prov)
        elif k == "drop-vertex":
            v = spec.vertex(pl[0])
            if spec.successors()[v.id] and spec.predecessors()[v.id]:
                raise InvalidStep("only sources and sinks can be dropped")
            verts = tuple(w for w in spec.vertices if w.id != v.id)
            edges = tuple(e for e in spec.edges if v.id not in (e.src, e.dst))
            live = {w.cls for w in verts}
            rels = tuple(frozenset(c for c in b if c in live) for b in spec.relations)
            new = replace(spec, vertices=verts, edges=edges,
                          relations=tuple(b for b in rels if len(b) > 1), provenance=prov)
        elif k == "shrink-twist":
            v, t = spec.vertex(pl[0]), int(pl[1])
            if not 1 <= t < v.t or v.t % t:
                raise InvalidStep(f"cannot shrink t = {v.t} to {t}")
            verts = tuple(replace(w, t=t, twist=w.twist % t) if w.cls == v.cls else w
                          for w in spec.vertices)
            new = replace(spec, vertices=verts, provenance=prov)
        else:
            raise InvalidStep(f"unknown step kind {k!r}")
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidStep):
            raise
        raise InvalidStep(f"bad payload for {k}: {exc}") from exc
    problems = validate(new)
    if problems:
        raise InvalidStep("; ".join(problems))
    return new


def _edge(spec: QuiverSpec, src: str, dst: str) -> Edge:
    for e in spec.edges:
        if (e.src, e.dst) == (src, dst):
            return e
    raise KeyError(f"{src}->{dst}")


def _merge_blocks(blocks) -> tuple:
    blocks = [set(b) for b in blocks if b]
    merged = True
    while merged:
        merged = False
        for a, b in itertools.combinations(range(len(blocks)), 2):
            if blocks[a] & blocks[b]:
                blocks[a] |= blocks.pop(b)
                merged = True
                break
    return tuple(frozenset(b) for b in blocks if len(b) > 1)


def reduction_measure(spec: QuiverSpec) -> tuple:
    """(M1, M2, M3, M4), compared lexicographically."""
    keys = sorted((path_degree_vector(spec, p).key() for p in maximal_paths(spec)), reverse=True)
    classes = spec.vertex_classes()
    m2 = len(classes) + len(spec.vertices) + len(spec.relation_blocks())
    m3 = len(spec.edge_classes()) + len(spec.edges)
    m4 = sum(members[0].t for members in classes.values())
    return (tuple(keys), m2, m3, m4)


def chain_bound(spec: QuiverSpec) -> int:
    """A positive integer that every legal step lowers by at least one."""
    classes = spec.vertex_classes()
    return (sum(m[0].n + m[0].t for m in classes.values()) + len(classes) + len(spec.vertices)
            + len(spec.edge_classes()) + len(spec.edges) + len(spec.relation_blocks()))


def legal_steps(spec: QuiverSpec) -> list[ReductionStep]:
    out = []
    vs = spec.vertices
    for a, b in itertools.combinations(vs, 2):
        if a.cls != b.cls and (a.n, a.t) == (b.n, b.t):
            out.append(ReductionStep("glue-vertices", (a.id, b.id)))
    cls = {v.id: v.cls for v in vs}
    for e1, e2 in itertools.combinations(spec.edges, 2):
        if e1.cls != e2.cls and (cls[e1.src], cls[e1.dst]) == (cls[e2.src], cls[e2.dst]):
            out.append(ReductionStep("glue-edges", ((e1.src, e1.dst), (e2.src, e2.dst))))
    blocks = spec.relation_blocks()
    where = {c: k for k, b in enumerate(blocks) for c in b}
    for a, b in itertools.combinations(vs, 2):
        if where[a.cls] != where[b.cls]:
            out.append(ReductionStep("linear-relation", (a.id, b.id)))
    for v in vs:
        for n in range(1, v.n):
            out.append(ReductionStep("lower-matrix-degree", (v.id, n)))
        for t in range(1, v.t):
            if v.t % t == 0:
                out.append(ReductionStep("shrink-twist", (v.id, t)))
    succ, pred = spec.successors(), spec.predecessors()
    for v in vs:
        if not succ[v.id] or not pred[v.id]:
            out.append(ReductionStep("drop-vertex", (v.id,)))
    return out


def random_quiver(rng: np.random.Generator, max_vertices: int = 6, p: int = 2) -> QuiverSpec:
    nv = int(rng.integers(1, max_vertices + 1))
    labels = [(int(rng.integers(1, 4)), int(rng.choice([1, 2, 3, 4]))) for _ in range(nv)]
    verts = []
    classes: dict = {}
    for k, (n, t) in enumerate(labels):
        vid = f"v{k + 1}"
        pool = [c for c, lab in classes.items() if lab == (n, t)]
        if pool and rng.random() < 0.4:
            glue = pool[int(rng.integers(len(pool)))]
        else:
            glue = f"c{k + 1}"
            classes[glue] = (n, t)
        verts.append(Vertex(vid, n, t, glue, int(rng.integers(0, t))))
    edges = []
    for a, b in itertools.combinations(range(nv), 2):
        if rng.random() < 0.4:
            edges.append(Edge(verts[a].id, verts[b].id, f"e{a + 1}_{b + 1}"))
    cls = {v.id: v.cls for v in verts}
    for k in range(1, len(edges)):
        for j in range(k):
            same = (cls[edges[j].src], cls[edges[j].dst]) == (cls[edges[k].src], cls[edges[k].dst])
            if same and rng.random() < 0.5:
                kind = ["identical", "frobenius", "proportional"][int(rng.integers(3))]
                edges[k] = replace(edges[k], glue=edges[j].cls, kind=kind,
                                   e=int(rng.integers(1, 3)) if kind == "frobenius" else 0,
                                   factor="1" if kind != "proportional" else str(int(rng.integers(1, max(p, 2)))))
                break
    return QuiverSpec(p, p, tuple(verts), tuple(edges))


def reduction_chain(spec: QuiverSpec, rng: np.random.Generator, max_steps: int = 10000):
    """Apply random legal steps until none is left; returns (steps, measures)."""
    steps, measures = [], [reduction_measure(spec)]
    while len(steps) < max_steps:
        options = legal_steps(spec)
        if not options:
            break
        step = options[int(rng.integers(len(options)))]
        spec = apply_reduction(spec, step)
        steps.append(step)
        measures.append(reduction_measure(spec))
    return steps, measures, spec
