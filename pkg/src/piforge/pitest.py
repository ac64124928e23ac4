"""Evaluating noncommutative polynomials on matrix algebras; identity,
centrality and quasi-linearity tests; absorption and T-ideal membership.

Searches enumerate substitution tuples in a fixed lexicographic order and
report the first witness in that order, whatever the number of workers
(``PIFORGE_THREADS``).
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping

import numpy as np

from .coeffring import Field
from .errors import (BudgetExceeded, CapTooLarge, NotAField, NotAlternating, NotLinear,
                     NotMultilinear, UnassignedVariable, UnknownPurity)
from .freealg import (LinearizationStep, NcPolynomial, fresh_index, format_poly,
                      letter_name, parse_poly)
from .linalg import SpanBasis
from .matalg import Matrix, char_poly, left_regular
from .polylib import is_t_alternating
from .quiver import (BlockAlgebra, compare_degree_vectors, maximal_paths,
                     path_degree_vector, _FqSpan, subfield_basis)

CHUNK = 2048


def workers() -> int:
    env = os.environ.get("PIFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- array representation ---------------------------------------------------------

class MatrixRep:
    """N x N matrices over K as (N m) x (N m) integer arrays over F_p, each
    entry replaced by its multiplication matrix on the basis 1, g, ..., g^(m-1)."""

    def __init__(self, K: Field, N: int):
        self.K, self.N, self.m, self.p = K, N, K.m, K.p
        self.D = N * self.m
        self.dtype = object if self.p == 0 else np.int64
        self._blocks: dict = {}

    def block(self, a: int) -> np.ndarray:
        b = self._blocks.get(a)
        if b is None:
            K, m = self.K, self.m
            b = np.zeros((m, m), dtype=self.dtype)
            for k in range(m):
                b[:, k] = K.digits(K.mul(a, self.p ** k))
            self._blocks[a] = b
        return b

    def to_array(self, M: Matrix) -> np.ndarray:
        if self.m == 1:
            return np.array(M.rows, dtype=self.dtype).reshape(self.N, self.N)
        m = self.m
        out = np.zeros((self.D, self.D), dtype=self.dtype)
        for i, row in enumerate(M.rows):
            for j, v in enumerate(row):
                if v:
                    out[i * m:(i + 1) * m, j * m:(j + 1) * m] = self.block(v)
        return out

    def from_array(self, arr: np.ndarray) -> Matrix:
        K, m = self.K, self.m
        if m == 1:
            return Matrix(K, tuple(tuple(int(v) for v in row) for row in arr))
        rows = tuple(tuple(K.from_digits([int(v) for v in arr[i * m:(i + 1) * m, j * m]])
                           for j in range(self.N)) for i in range(self.N))
        return Matrix(K, rows)

    def identity(self) -> np.ndarray:
        return np.eye(self.D, dtype=self.dtype)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr % self.p if self.p else arr

    def scale(self, c: int, arr: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return self.reduce(arr * c)
        return self.reduce(np.kron(np.eye(self.N, dtype=self.dtype), self.block(c)) @ arr)


_END = object()


def _trie(f: NcPolynomial) -> dict:
    root: dict = {}
    for w, c in f.terms.items():
        node = root
        for letter in w:
            node = node.setdefault(letter, {})
        node[_END] = c
    return root


def eval_batch(f: NcPolynomial, rep: MatrixRep, values: Mapping[int, np.ndarray]) -> np.ndarray:
    """Evaluate f on a batch: values[i] has shape (B, D, D)."""
    missing = f.variables() - set(values)
    if missing:
        raise UnassignedVariable(f"x{min(missing)} is not assigned")
    B = next(iter(values.values())).shape[0] if values else 1
    out = np.zeros((B, rep.D, rep.D), dtype=rep.dtype)
    if f.is_zero():
        return out

    def walk(node, prod):
        nonlocal out
        c = node.get(_END)
        if c:
            base = prod if prod is not None else np.broadcast_to(rep.identity(), out.shape)
            out = out + rep.scale(c, base)
        for letter, child in node.items():
            if letter is _END:
                continue
            v = values[letter]
            walk(child, v if prod is None else rep.reduce(prod @ v))

    walk(_trie(f), None)
    return rep.reduce(out)


def evaluate(f: NcPolynomial, assignment: Mapping[int, Matrix], n: int | None = None,
             field: Field | None = None) -> Matrix:
    """Exact evaluation with Matrix arithmetic; the empty word maps to I."""
    missing = f.variables() - set(assignment)
    if missing:
        raise UnassignedVariable(f"x{min(missing)} is not assigned")
    if assignment:
        any_m = next(iter(assignment.values()))
        n, field = any_m.n, any_m.field
    if n is None:
        raise ValueError("matrix size unknown for an empty assignment")
    K = field or f.field
    total = Matrix.zero(K, n)
    ident = Matrix.identity(K, n)

    def walk(node, prod):
        nonlocal total
        c = node.get(_END)
        if c:
            total = total + (ident if prod is None else prod).scale(c)
        for letter, child in node.items():
            if letter is not _END:
                walk(child, assignment[letter] if prod is None else prod * assignment[letter])

    walk(_trie(f), None)
    return total


# -- element pools ------------------------------------------------------------------

class Pools:
    """Basis, pure and full element lists of a BlockAlgebra as arrays."""

    def __init__(self, alg: BlockAlgebra):
        self.alg = alg
        self.rep = MatrixRep(alg.field, alg.N)
        self.basis = alg.basis
        self.dim = len(self.basis)
        rep, scal = self.rep, alg.scalars
        self.table = np.zeros((self.dim, len(scal), rep.D, rep.D), dtype=rep.dtype)
        for i, b in enumerate(self.basis):
            for s, c in enumerate(scal):
                if c:
                    self.table[i, s] = rep.to_array(b.scale(c))
        self.basis_arrays = np.array([rep.to_array(b) for b in self.basis], dtype=rep.dtype) \
            if self.basis else np.zeros((0, rep.D, rep.D), dtype=rep.dtype)

    def from_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        """coeffs: (B, dim) scalar indices -> (B, D, D) arrays."""
        out = np.zeros((coeffs.shape[0], self.rep.D, self.rep.D), dtype=self.rep.dtype)
        for i in range(self.dim):
            out = out + self.table[i, coeffs[:, i]]
        return self.rep.reduce(out)

    def matrix(self, coeffs) -> Matrix:
        alg = self.alg
        m = Matrix.zero(alg.field, alg.N)
        for c, b in zip(coeffs, self.basis):
            if c:
                m = m + b.scale(alg.scalars[int(c)])
        return m

    def _all_coeffs(self, lo: int, hi: int) -> np.ndarray:
        q = len(self.alg.scalars)
        count = q ** (hi - lo)
        coeffs = np.zeros((count, self.dim), dtype=np.int64)
        if hi > lo:
            coeffs[:, lo:hi] = np.array(np.unravel_index(np.arange(count), (q,) * (hi - lo))).T
        return coeffs

    def pool(self, kind: str, with_zero: bool = False):
        """(coeffs, arrays) listing the pool in enumeration order."""
        nS = len(self.alg.S)
        if kind == "basis":
            coeffs = np.zeros((self.dim, self.dim), dtype=np.int64)
            one = self.alg.scalars.index(1)
            coeffs[np.arange(self.dim), np.arange(self.dim)] = one
            if with_zero:
                coeffs = np.vstack([np.zeros((1, self.dim), dtype=np.int64), coeffs])
        elif kind == "pure":
            s = self._all_coeffs(0, nS)
            j = self._all_coeffs(nS, self.dim)[1:]
            coeffs = np.vstack([s, j])
        elif kind == "all":
            coeffs = self._all_coeffs(0, self.dim)
        else:
            raise ValueError(kind)
        return coeffs, self.from_coeffs(coeffs)

    def pool_size(self, kind: str, with_zero: bool = False) -> int:
        q = len(self.alg.scalars)
        nS, nJ = len(self.alg.S), len(self.alg.J)
        return {"basis": self.dim + int(with_zero), "pure": q ** nS + q ** nJ - 1,
                "all": q ** self.dim}[kind]


# -- search engine --------------------------------------------------------------------

def _exhaustive(variables, pool_arrays, check: Callable, limit: int):
    """First tuple index in [0, limit) whose evaluation fails ``check``."""
    V = len(variables)
    P = pool_arrays.shape[0]
    sizes = (P,) * V

    def run(lo, hi):
        idx = np.arange(lo, hi)
        digits = np.unravel_index(idx, sizes) if V else ()
        values = {v: pool_arrays[d] for v, d in zip(variables, digits)}
        bad = check(values, hi - lo)
        hits = np.nonzero(bad)[0]
        return lo + int(hits[0]) if hits.size else None

    return _waves(run, limit)


def _waves(run, limit):
    W = workers()
    ranges = [(lo, min(lo + CHUNK, limit)) for lo in range(0, limit, CHUNK)]
    if not ranges:
        return None
    with ThreadPoolExecutor(max_workers=W) as ex:
        for k in range(0, len(ranges), W):
            hits = [h for h in ex.map(lambda r: run(*r), ranges[k:k + W]) if h is not None]
            if hits:
                return min(hits)
    return None


@dataclass
class IdentityReport:
    verdict: str                # identity | non-identity | inconclusive
    mode: str
    complete: bool
    trials: int
    seed: int
    budget: int
    witness: dict | None = None
    value: Matrix | None = None
    witness_index: int | None = None
    notes: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "mode": self.mode, "complete": self.complete,
                "trials": self.trials, "seed": self.seed, "budget": self.budget,
                "witness": None if self.witness is None else
                {letter_name(k): v.to_json() for k, v in sorted(self.witness.items())},
                "value": None if self.value is None else self.value.to_json(),
                "witness_index": self.witness_index, "notes": list(self.notes)}


def _is_linear(f: NcPolynomial) -> bool:
    return all(f.deg(i) <= 1 for i in f.variables())


def _blended(f: NcPolynomial) -> bool:
    return len(f.blended_components()) <= 1


def _nonzero_check(f, rep):
    def check(values, B):
        if not values:
            val = eval_batch(f, rep, values)
            return np.array([bool(val.any())])
        val = eval_batch(f, rep, values)
        return val.reshape(B, -1).any(axis=1)
    return check


def _noncentral_check(f, rep, basis_arrays):
    def check(values, B):
        val = eval_batch(f, rep, values)
        if basis_arrays.shape[0] == 0:
            return np.zeros(val.shape[0], dtype=bool)
        left = val[:, None] @ basis_arrays[None]
        right = basis_arrays[None] @ val[:, None]
        return rep.reduce(left - right).reshape(val.shape[0], -1).any(axis=1)
    return check


def _search(f: NcPolynomial, alg: BlockAlgebra, mode: str, budget: int, seed: int,
            make_check, pools: Pools | None = None):
    """Run one search; returns (found, complete, trials, witness, index)."""
    pools = pools or Pools(alg)
    variables = sorted(f.variables())
    check = make_check(pools)
    V = len(variables)
    if mode == "randomized":
        rng = np.random.Generator(np.random.Philox(seed))
        q = len(alg.scalars)
        batches = []
        for lo in range(0, budget, CHUNK):
            B = min(CHUNK, budget - lo)
            batches.append(rng.integers(0, q, size=(B, V, pools.dim)))

        def run(lo, hi):
            co = batches[lo // CHUNK]
            values = {v: pools.from_coeffs(co[:, k]) for k, v in enumerate(variables)}
            hits = np.nonzero(check(values, hi - lo))[0]
            return lo + int(hits[0]) if hits.size else None

        hit = _waves(run, budget) if V else None
        if hit is None:
            return False, False, budget, None, None
        co = batches[hit // CHUNK][hit % CHUNK]
        witness = {v: pools.matrix(co[k]) for k, v in enumerate(variables)}
        return True, False, hit + 1, witness, hit

    kind = {"exhaustive-basis": "basis", "exhaustive-pure": "pure", "exhaustive-all": "all"}[mode]
    with_zero = kind == "basis" and not _blended(f)
    coeffs, arrays = pools.pool(kind, with_zero)
    total = arrays.shape[0] ** V
    limit = min(total, budget)
    hit = _exhaustive(variables, arrays, check, limit)
    if hit is None:
        return False, limit == total, limit, None, None
    digits = np.unravel_index(hit, (arrays.shape[0],) * V) if V else ()
    witness = {v: pools.matrix(coeffs[d]) for v, d in zip(variables, digits)}
    return True, True, hit + 1, witness, hit


def _choose_mode(f, alg, budget, pools: Pools) -> str:
    V = len(f.variables())
    if _is_linear(f):
        return "exhaustive-basis"
    if pools.pool_size("all") ** V <= budget:
        return "exhaustive-all"
    if pools.pool_size("pure") ** V <= budget and _quasi_linear_all(f, alg, budget, pools):
        return "exhaustive-pure"
    return "randomized"


def _quasi_linear_all(f, alg, budget, pools) -> bool:
    return all(is_quasi_linear(f, alg, i, budget, 0, pools)[0] == "yes" for i in sorted(f.variables()))


def is_identity(f: NcPolynomial, alg: BlockAlgebra, mode: str = "auto", budget: int = 1_000_000,
                seed: int = 0) -> IdentityReport:
    pools = Pools(alg)
    notes = []
    if mode in ("auto", "exhaustive"):
        mode = _choose_mode(f, alg, budget, pools) if mode == "auto" else (
            "exhaustive-basis" if _is_linear(f) else "exhaustive-all")
    if mode == "exhaustive-basis" and not _is_linear(f):
        raise NotMultilinear("basis enumeration is only complete for multilinear polynomials")
    found, complete, trials, witness, index = _search(
        f, alg, mode, budget, seed, lambda P: _nonzero_check(f, P.rep), pools)
    if found:
        value = evaluate(f, witness, alg.N, alg.field)
        assert not value.is_zero(), "witness failed to replay"
        return IdentityReport("non-identity", mode, True, trials, seed, budget, witness, value, index)
    verdict = "identity" if complete else "inconclusive"
    if mode == "exhaustive-pure" and complete:
        if not _quasi_linear_all(f, alg, budget, pools):
            verdict = "inconclusive"
            notes.append("quasi-linearity not verified; pure substitutions do not decide")
    if not complete and mode != "randomized":
        notes.append("enumeration truncated by budget")
    return IdentityReport(verdict, mode, complete and verdict == "identity", trials, seed, budget,
                          notes=notes)


def is_quasi_linear(f: NcPolynomial, alg: BlockAlgebra, i: int, budget: int = 1_000_000,
                    seed: int = 0, pools: Pools | None = None):
    """('yes' | 'no' | 'inconclusive', witness) for additivity of f in x_i on alg.

    Decided as: f(x_i -> u + v) - f(x_i -> u) - f(x_i -> v) is an identity.
    The witness maps i to the pair (u, v) and other variables to their values.
    """
    if f.terms and all(w.count(i) == 1 for w in f.terms):
        return "yes", None
    if i not in f.variables():
        return ("yes", None) if f.is_zero() else ("no", None)
    base = max(fresh_index(f), 1)
    step = LinearizationStep(i, (base, base + 1))
    g = step.apply(f)
    pools = pools or Pools(alg)
    V = len(g.variables())
    mode = "exhaustive-all" if pools.pool_size("all") ** V <= budget else "randomized"
    found, complete, _, witness, _ = _search(g, alg, mode, budget, seed,
                                             lambda P: _nonzero_check(g, P.rep), pools)
    if found:
        w = {k: v for k, v in witness.items() if k not in step.fresh}
        w[i] = (witness[base], witness[base + 1])
        return "no", w
    return ("yes" if complete else "inconclusive"), None


@dataclass
class CentralReport:
    verdict: str                # central | non-central | inconclusive
    nonidentity: IdentityReport
    mode: str
    complete: bool
    trials: int
    seed: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "mode": self.mode, "complete": self.complete,
                "trials": self.trials, "seed": self.seed,
                "witness": None if self.witness is None else
                {letter_name(k): v.to_json() for k, v in sorted(self.witness.items())},
                "nonidentity": self.nonidentity.to_json()}


def is_central(f: NcPolynomial, alg: BlockAlgebra, mode: str = "auto", budget: int = 1_000_000,
               seed: int = 0) -> CentralReport:
    """Every value commutes with the algebra's basis (for M_n: is scalar)."""
    pools = Pools(alg)
    if mode in ("auto", "exhaustive"):
        mode = _choose_mode(f, alg, budget, pools) if mode == "auto" else (
            "exhaustive-basis" if _is_linear(f) else "exhaustive-all")
    found, complete, trials, witness, _ = _search(
        f, alg, mode, budget, seed, lambda P: _noncentral_check(f, P.rep, P.basis_arrays), pools)
    nonid = is_identity(f, alg, mode, budget, seed)
    if found:
        value = evaluate(f, witness, alg.N, alg.field)
        assert any(not (value * b == b * value) for b in alg.basis), "witness failed to replay"
        return CentralReport("non-central", nonid, mode, True, trials, seed, witness)
    if mode == "exhaustive-pure" and complete and not _quasi_linear_all(f, alg, budget, pools):
        complete = False
    return CentralReport("central" if complete else "inconclusive", nonid, mode, complete, trials, seed)


# -- radical diagnostics -------------------------------------------------------------

def purity_of(m: Matrix, alg: BlockAlgebra) -> str:
    fq = subfield_basis(alg.field, alg.spec.p, alg.spec.s)
    for name, basis in (("semisimple", alg.S), ("radical", alg.J)):
        span = _FqSpan(alg.field, fq)
        for b in basis:
            span.add(b)
        if span.contains(m):
            return name
    full = _FqSpan(alg.field, fq)
    for b in alg.basis:
        full.add(b)
    return "mixed" if full.contains(m) else "outside"


def nilpotence_diagnostics(f: NcPolynomial, alg: BlockAlgebra, assignment: Mapping[int, Matrix],
                           purity: Mapping[int, str]) -> dict:
    """Count radical substitutions per monomial; a monomial with at least
    nilpotence-index many is flagged and must evaluate to 0."""
    for i in sorted(f.variables()):
        tag = purity.get(i, "unknown")
        if tag not in ("semisimple", "radical", "mixed"):
            raise UnknownPurity(f"purity of x{i} is {tag!r}")
        actual = purity_of(assignment[i], alg)
        if tag != "mixed" and actual not in (tag, "semisimple" if assignment[i].is_zero() else tag):
            if not assignment[i].is_zero():
                raise UnknownPurity(f"x{i} tagged {tag} but its value is {actual}")
    rows = []
    for w, c in f.terms.items():
        count = sum(1 for i in w if purity[i] == "radical")
        flagged = count >= alg.nilpotence_index
        value = evaluate(NcPolynomial(f.field, {w: 1}, f.unital), assignment, alg.N, alg.field)
        if flagged:
            assert value.is_zero(), "radically annihilating monomial evaluated nonzero"
        rows.append({"monomial": ".".join(letter_name(i) for i in w), "radical": count,
                     "flagged": flagged, "zero": value.is_zero()})
    return {"nilpotence_index": alg.nilpotence_index, "monomials": rows,
            "annihilated": bool(rows) and all(r["flagged"] for r in rows)}


# -- admissibility ---------------------------------------------------------------------

def _visited_paths(f, assignment, alg: BlockAlgebra, r: int, c: int) -> set:
    """Vertex sequences of index chains r -> ... -> c through nonzero entries."""
    out = set()
    block = [alg.block_of(i) for i in range(alg.N)]
    for w in f.terms:
        states = {(r, (block[r],))}
        for letter in w:
            m = assignment[letter]
            nxt = set()
            for i, seq in states:
                for j in range(alg.N):
                    if m.rows[i][j]:
                        nseq = seq if seq[-1] == block[j] else seq + (block[j],)
                        nxt.add((j, nseq))
            states = nxt
        out |= {seq for j, seq in states if j == c}
    return out


def _dv(spec, seq):
    verts = [spec.vertex(v) for v in seq]
    groups: dict = {}
    for pos, v in enumerate(verts):
        groups.setdefault(v.cls, []).append(pos)
    from .quiver import DegreeVector
    return DegreeVector(tuple(v.n for v in verts), tuple(tuple(g) for g in groups.values()))


@dataclass
class AdmissibleReport:
    verdict: str                # yes | not-found
    exhaustive: bool
    trials: int
    seed: int
    witness: dict | None = None
    path: tuple | None = None
    degree_vector: object = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "exhaustive": self.exhaustive, "trials": self.trials,
                "seed": self.seed, "path": None if self.path is None else list(self.path),
                "degree_vector": None if self.degree_vector is None else self.degree_vector.to_json(),
                "witness": None if self.witness is None else
                {letter_name(k): v.to_json() for k, v in sorted(self.witness.items())}}


def is_admissible(f: NcPolynomial, alg: BlockAlgebra, budget: int = 100_000, seed: int = 0) -> AdmissibleReport:
    """Search pure substitutions with a nonzero value reached along a vertex
    sequence whose degree vector equals the maximal one of the quiver."""
    spec = alg.spec
    dvs = [path_degree_vector(spec, p) for p in maximal_paths(spec)]
    best = dvs[0]
    for d in dvs[1:]:
        if compare_degree_vectors(d, best) == "greater":
            best = d
    pools = Pools(alg)
    variables = sorted(f.variables())
    coeffs, arrays = pools.pool("pure")
    P, V = arrays.shape[0], len(variables)
    total = P ** V
    exhaustive = total <= budget
    if exhaustive:
        order = range(total)
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        order = (int(k) for k in rng.integers(0, total, size=budget))
    trials = 0
    rep = pools.rep
    for k in order:
        trials += 1
        digits = np.unravel_index(k, (P,) * V) if V else ()
        values = {v: arrays[d][None] for v, d in zip(variables, digits)}
        val = eval_batch(f, rep, values)[0]
        if not val.any():
            continue
        witness = {v: pools.matrix(coeffs[d]) for v, d in zip(variables, digits)}
        value = evaluate(f, witness, alg.N, alg.field)
        for r, c in itertools.product(range(alg.N), repeat=2):
            if not value.rows[r][c]:
                continue
            for seq in sorted(_visited_paths(f, witness, alg, r, c)):
                dv = _dv(spec, seq)
                if compare_degree_vectors(dv, best) == "equal":
                    return AdmissibleReport("yes", exhaustive, trials, seed, witness, seq, dv)
    return AdmissibleReport("not-found", exhaustive, trials, seed)


# -- absorption -------------------------------------------------------------------------

CONVENTIONS = ("section1", "complement", "signed")


def _alpha(cp, k: int, convention: str) -> int:
    F, t = cp.field, cp.n
    full = cp.full()
    if convention == "section1":
        return full[k]
    if convention == "complement":
        return full[t - k]
    return F.neg(full[t - k]) if k % 2 else full[t - k]


def absorption_check(f: NcPolynomial, n: int, field: Field, trials: int = 200, seed: int = 0,
                     t: int | None = None) -> dict:
    """Compare alpha_k(T) f(a; r) with sum_{|K| = k} f(T^K a; r), T acting on
    M_n by left multiplication (so alpha_k comes from left_regular(T))."""
    t = n * n if t is None else t
    try:
        ok = is_t_alternating(f, t)
    except NotLinear as exc:
        raise NotAlternating(str(exc)) from exc
    if not ok or not all(f.deg(i) == 1 for i in range(1, t + 1)):
        raise NotAlternating(f"f is not {t}-alternating and linear in x1..x{t}")
    F = field
    rep = MatrixRep(F, n)
    rng = np.random.Generator(np.random.Philox(seed))
    others = sorted(f.variables() - set(range(1, t + 1)))
    order = max(F.order, 1)

    def rand_matrix():
        return Matrix(F, tuple(tuple(int(v) for v in rng.integers(0, order, n)) for _ in range(n)))

    Ts, As, Rs, cps = [], [], [], []
    for _ in range(trials):
        T = rand_matrix()
        Ts.append(T)
        As.append([rand_matrix() for _ in range(t)])
        Rs.append({i: rand_matrix() for i in others})
        cps.append(char_poly(left_regular(T)))
    Tp = [[Matrix.identity(F, n)] for _ in range(trials)]
    for k in range(trials):
        for _ in range(t):
            Tp[k].append(Tp[k][-1] * Ts[k])
    arr = lambda ms: np.array([rep.to_array(m) for m in ms], dtype=rep.dtype)

    def subset_sum(first_power: int, level: int) -> np.ndarray:
        total = np.zeros((trials, rep.D, rep.D), dtype=rep.dtype)
        for K in itertools.combinations(range(t), level):
            values = {i: arr([Rs[k][i] for k in range(trials)]) for i in others}
            for pos in range(t):
                e = (1 if pos in K else 0) + (first_power if pos == 0 else 0)
                values[pos + 1] = arr([Tp[k][e] * As[k][pos] for k in range(trials)])
            total = rep.reduce(total + eval_batch(f, rep, values))
        return total

    base = subset_sum(0, 0)
    per_k = {}
    passes = {c: True for c in CONVENTIONS}
    for k in range(1, t + 1):
        rhs = subset_sum(0, k)
        res = {}
        for conv in CONVENTIONS:
            good = True
            for j in range(trials):
                lhs = rep.scale(_alpha(cps[j], k, conv), base[j])
                if not np.array_equal(lhs, rhs[j]):
                    good = False
                    break
            res[conv] = good
            passes[conv] &= good
        per_k[k] = res
    tele = np.zeros((trials, rep.D, rep.D), dtype=rep.dtype)
    for k in range(t + 1):
        term = subset_sum(t - k, k)
        tele = rep.reduce(tele + (term if k % 2 == 0 else -term))
    return {"n": n, "t": t, "field": F.name, "trials": trials, "seed": seed,
            "per_k": {str(k): v for k, v in per_k.items()},
            "conventions": passes, "working": [c for c in CONVENTIONS if passes[c]],
            "telescope_vanishes": not tele.any(),
            "nonzero_values": int(sum(1 for j in range(trials) if base[j].any()))}


def induced_hc_identity(f: NcPolynomial, t: int, T: int | None = None, signed: bool = True) -> NcPolynomial:
    """sum over K subset {1..t} of (-1)^|K| f(x_i -> T x_i for i in K), T fresh."""
    if t > 6:
        raise CapTooLarge(f"t = {t} > 6")
    for i in range(1, t + 1):
        if f.deg(i) != 1 or not f.is_multilinear([i]):
            raise NotMultilinear(f"f is not linear in x{i}")
    F = f.field
    T = fresh_index(f) if T is None else T
    tv = NcPolynomial.var(F, T)
    total = NcPolynomial.zero(F, f.unital)
    for K in itertools.product((0, 1), repeat=t):
        sigma = {i + 1: tv * NcPolynomial.var(F, i + 1) for i in range(t) if K[i]}
        term = f.substitute(sigma)
        total = total + (-term if signed and sum(K) % 2 else term)
    return total


# -- T-ideal membership ------------------------------------------------------------------

def _derive(node, gens):
    kind = node[0]
    if kind == "gen":
        return gens[node[1]]
    parent = _derive(node[1], gens)
    F = parent.field
    if kind == "subst":
        return parent.substitute({i: parse_poly(s, F) for i, s in node[2]})
    if kind == "mul":
        left = NcPolynomial.monomial(F, node[2]) if node[2] else None
        right = NcPolynomial.monomial(F, node[3]) if node[3] else None
        g = parent
        if left is not None:
            g = left * g
        if right is not None:
            g = g * right
        return g
    if kind == "delta":
        return _delta(parent, node[2], node[3])
    raise ValueError(kind)


def _delta(f: NcPolynomial, i: int, j: int) -> NcPolynomial:
    """f(x_i -> x_i + x_j) - f - f(x_i -> x_j)."""
    F = f.field
    xi, xj = NcPolynomial.var(F, i), NcPolynomial.var(F, j)
    return f.substitute({i: xi + xj}) - f - f.substitute({i: xj})


def _node_json(node):
    kind = node[0]
    if kind == "gen":
        return {"gen": node[1]}
    if kind == "subst":
        return {"subst": {letter_name(i): s for i, s in node[2]}, "of": _node_json(node[1])}
    if kind == "mul":
        return {"left": [letter_name(i) for i in node[2]], "right": [letter_name(i) for i in node[3]],
                "of": _node_json(node[1])}
    return {"delta": [letter_name(node[2]), letter_name(node[3])], "of": _node_json(node[1])}


@dataclass
class MembershipCertificate:
    gens: list
    target: NcPolynomial
    terms: list                 # (coefficient, derivation)

    def replay(self) -> NcPolynomial:
        F = self.target.field
        total = NcPolynomial.zero(F, self.target.unital)
        for c, node in self.terms:
            total = total + _derive(node, self.gens).scale(c)
        return total

    def verify(self) -> bool:
        return self.replay() == self.target

    def to_json(self) -> dict:
        F = self.target.field
        return {"gens": [format_poly(g) for g in self.gens], "target": format_poly(self.target),
                "terms": [{"coeff": F.format(c), "derivation": _node_json(n)} for c, n in self.terms]}


@dataclass
class MembershipResult:
    verdict: str                # member | not-found
    certificate: MembershipCertificate | None
    spanning: int
    truncated: bool

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "spanning_set": self.spanning, "truncated": self.truncated,
                "certificate": None if self.certificate is None else self.certificate.to_json()}


def _words(vars_: int, length: int):
    return itertools.product(range(1, vars_ + 1), repeat=length)


def tideal_member(gens, target: NcPolynomial, deg: int, vars: int = 3, budget: int = 20000,
                  rounds: int = 2) -> MembershipResult:
    """Sound (not complete) membership test of target in the T-ideal of gens,
    restricted to polynomials of degree <= deg in x1..x_vars."""
    gens = list(gens)
    F = target.field
    if not F.is_field:
        raise NotAField("membership is decided by elimination over a field")
    if deg > 8 or vars > 6:
        raise BudgetExceeded(f"deg <= 8 and vars <= 6 required (got {deg}, {vars})")
    if target.degree() > deg:
        raise BudgetExceeded(f"target degree {target.degree()} exceeds deg = {deg}")
    pool: list = []
    seen: set = set()
    span = SpanBasis(F, track=True)
    state = {"truncated": False}

    def add(poly, node) -> bool:
        if poly.is_zero() or poly.degree() > deg or poly in seen:
            return False
        if any(i > vars for i in poly.variables()):
            return False
        if len(pool) >= budget:
            state["truncated"] = True
            return False
        seen.add(poly)
        pool.append((poly, node))
        span.add(dict(poly.terms), label=len(pool) - 1)
        return True

    def result():
        res, combo = span.reduce(dict(target.terms))
        if res:
            return None
        terms = [(c, pool[k][1]) for k, c in sorted(combo.items()) if c]
        cert = MembershipCertificate(gens, target, terms)
        assert cert.verify(), "membership certificate failed to replay"
        return MembershipResult("member", cert, len(pool), state["truncated"])

    for k, g in enumerate(gens):
        add(g, ("gen", k))
    found = result()
    scalars = [c for c in F.elements() if c]
    for _ in range(rounds):
        if found or state["truncated"]:
            break
        snapshot = list(pool)
        for poly, node in snapshot:
            vs = sorted(poly.variables())
            # Delta_i with a new variable
            for i in vs:
                for j in range(1, vars + 1):
                    if j not in vs:
                        add(_delta(poly, i, j), ("delta", node, i, j))
                        break
            # monomial substitutions
            room = deg - poly.degree()
            for lengths in itertools.product(range(1, room + 2), repeat=len(vs)):
                ext = max(sum(lengths[vs.index(i)] - 1 for i in w) for w in poly.terms)
                if ext > room:
                    continue
                for words in itertools.product(*(list(_words(vars, e)) for e in lengths)):
                    sigma = {i: NcPolynomial.monomial(F, wd) for i, wd in zip(vs, words)}
                    if all(wd == (i,) for i, wd in zip(vs, words)):
                        continue
                    add(poly.substitute(sigma),
                        ("subst", node, tuple((i, format_poly(s)) for i, s in sigma.items())))
            # monomial multiples
            for a in range(room + 1):
                for b in range(room - a + 1):
                    if a + b == 0:
                        continue
                    for lw in _words(vars, a):
                        for rw in _words(vars, b):
                            g = poly
                            if lw:
                                g = NcPolynomial.monomial(F, lw) * g
                            if rw:
                                g = g * NcPolynomial.monomial(F, rw)
                            add(g, ("mul", node, tuple(lw), tuple(rw)))
            # two-term substitutions x_i -> m1 + c m2 (one variable at a time)
            for i in vs:
                monos = [w for e in range(1, room + 2) for w in _words(vars, e)]
                for m1, m2 in itertools.combinations(monos, 2):
                    if (len(m1) - 1 + len(m2) - 1) > 2 * room:
                        continue
                    for c in scalars:
                        img = NcPolynomial.monomial(F, m1) + NcPolynomial.monomial(F, m2).scale(c)
                        add(poly.substitute({i: img}), ("subst", node, ((i, format_poly(img)),)))
            found = result()
            if found or state["truncated"]:
                break
    return found or MembershipResult("not-found", None, len(pool), state["truncated"])
