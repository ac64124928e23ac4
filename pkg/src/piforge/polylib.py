"""Named polynomials (Capelli, standard, central) and hiking substitutions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .coeffring import Field
from .errors import CapTooLarge, NotLinear, NotMultilinear, UnsupportedN, VariableAbsent
from .freealg import NcPolynomial, _fresh_pairs, fresh_index, pair, partial_linearization


def _sign(perm) -> int:
    sign, seen = 1, set()
    for start in range(len(perm)):
        if start in seen:
            continue
        j, length = start, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _var(F: Field, i: int, unital=False) -> NcPolynomial:
    return NcPolynomial.var(F, i, unital)


def capelli(field: Field, k: int, xbase: int = 1, ybase: int | None = None) -> NcPolynomial:
    """c_k = sum_pi sgn(pi) x_pi(1) y_1 ... x_pi(k) y_k.

    x_j is index xbase + j - 1 and y_j is ybase + j - 1 (default right after the x's).
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > 6:
        raise CapTooLarge(f"capelli({k}) has {k}! terms; cap is 6")
    ybase = xbase + k if ybase is None else ybase
    terms = {}
    for perm in itertools.permutations(range(k)):
        word = tuple(v for j in range(k) for v in (xbase + perm[j], ybase + j))
        terms[word] = field.embed_int(_sign(perm))
    return NcPolynomial(field, terms)


def standard(field: Field, k: int, base: int = 1) -> NcPolynomial:
    """s_k = sum_pi sgn(pi) x_pi(1) ... x_pi(k)."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > 8:
        raise CapTooLarge(f"standard({k}) has {k}! terms; cap is 8")
    terms = {tuple(base + j for j in perm): field.embed_int(_sign(perm))
             for perm in itertools.permutations(range(k))}
    return NcPolynomial(field, terms)


def commutator(a: NcPolynomial, b: NcPolynomial) -> NcPolynomial:
    return a * b - b * a


def frobenius_commutator(a: NcPolynomial, b: NcPolynomial, power: int | None = None) -> NcPolynomial:
    """[a, b]_q = ab - b^q a; the plain commutator when ``power`` is None."""
    if power is None:
        return commutator(a, b)
    return a * b - (b ** power) * a


def multilinearized_commutator_square(field: Field, base: int = 1) -> NcPolynomial:
    """Full linearization of [y1, y2]^2 on the indices base..base+3.

    Takes only scalar values on 2 x 2 matrices.
    """
    y1, y2 = _var(field, 1), _var(field, 2)
    sq = commutator(y1, y2) ** 2
    lin = partial_linearization(partial_linearization(sq, 1), 2)
    order = [pair(1, 1), pair(1, 2), pair(2, 1), pair(2, 2)]
    return lin.rename({v: base + j for j, v in enumerate(order)})


H_ARITY = {0: 0, 1: 1, 2: 12}


def central_h(field: Field, n: int, base: int = 1) -> NcPolynomial:
    """h_0 = 1, h_1 = x_base, h_2 = c_4 g on 12 consecutive fresh indices."""
    if n == 0:
        return NcPolynomial.one(field)
    if n == 1:
        return _var(field, base)
    if n == 2:
        return capelli(field, 4, base) * multilinearized_commutator_square(field, base + 8)
    raise UnsupportedN(f"no explicit central polynomial for n = {n}")


def _central(field: Field, n: int, base: int, central: str) -> NcPolynomial:
    if central == "g" and n == 2:
        return multilinearized_commutator_square(field, base)
    if central not in ("h", "g"):
        raise ValueError(f"unknown central polynomial {central!r}")
    return central_h(field, n, base)


def _arity(n: int, central: str = "h") -> int:
    if n not in H_ARITY:
        raise UnsupportedN(f"no explicit central polynomial for n = {n}")
    return 4 if (central == "g" and n == 2) else H_ARITY[n]


def alternator(f: NcPolynomial, t: int) -> NcPolynomial:
    """sum_{i=1}^{t+1} (-1)^i f(x_1..x_{i-1}, x_{i+1}..x_{t+1}, x_i), signed so
    the identity arrangement has coefficient +1.

    If f is t-alternating in x_1..x_t the result is (t+1)-alternating.
    """
    missing = [i for i in range(1, t + 2) if i not in f.variables()]
    if missing:
        raise VariableAbsent(f"x{missing[0]} does not occur")
    F = f.field
    total = NcPolynomial.zero(F, f.unital)
    for i in range(1, t + 2):
        seq = [j for j in range(1, t + 2) if j != i] + [i]
        term = f.rename({pos: v for pos, v in enumerate(seq, start=1)})
        total = total + (term if (i - (t + 1)) % 2 == 0 else -term)
    return total


def is_t_alternating(f: NcPolynomial, t: int) -> bool:
    for i in range(1, t + 1):
        if f.deg(i) > 1:
            raise NotLinear(f"f is not linear in x{i}")
    for i, j in itertools.combinations(range(1, t + 1), 2):
        if not f.rename({j: i}).is_zero():
            return False
    return True


def zubrilin_delta(f: NcPolynomial, n: int, k: int, z: int) -> NcPolynomial:
    """z-degree-k part of f((z+1)x_1, ..., (z+1)x_n).

    (z+1)x is expanded as zx + x, so no unit is required.
    """
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} outside 0..{n}")
    if z in f.variables():
        raise ValueError(f"x{z} is not fresh")
    for i in range(1, n + 1):
        if f.deg(i) > 1:
            raise NotMultilinear(f"f is not linear in x{i}")
    F = f.field
    zv = _var(F, z)
    sigma = {i: zv * _var(F, i) + _var(F, i) for i in range(1, n + 1)}
    return f.substitute(sigma).component({z: k})


# -- hiking ---------------------------------------------------------------------

@dataclass(frozen=True)
class HikeRecord:
    """after = before with the substitution ``sigma``; ``roles`` names the
    fresh variables (role -> tuple of indices)."""

    stage: str
    variable: int
    params: Mapping
    sigma: Mapping
    before: NcPolynomial
    after: NcPolynomial
    roles: Mapping = dc_field(default_factory=dict)

    def replay(self) -> NcPolynomial:
        return self.before.substitute(self.sigma)

    def verify(self) -> bool:
        return self.replay() == self.after

    def to_json(self) -> dict:
        from .freealg import format_poly
        return {"stage": self.stage, "variable": self.variable, "params": dict(self.params),
                "sigma": {str(k): format_poly(v) for k, v in self.sigma.items()},
                "before": format_poly(self.before), "after": format_poly(self.after),
                "roles": {k: list(v) for k, v in self.roles.items()}}


def _record(stage, i, params, sigma, before, roles):
    after = before.substitute(sigma)
    return after, HikeRecord(stage, i, params, sigma, before, after, roles)


def hike_stage1(f: NcPolynomial, i: int, n: int, power: int | None = None,
                start: int | None = None, central: str = "h"):
    """x_i -> [x_i, h_n] (or the Frobenius commutator x_i h_n - h_n^power x_i)."""
    if i not in f.variables():
        raise VariableAbsent(f"x{i} does not occur")
    start = fresh_index(f) if start is None else start
    h = _central(f.field, n, start, central)
    xi = _var(f.field, i, f.unital)
    sigma = {i: frobenius_commutator(xi, h, power)}
    roles = {"h": tuple(range(start, start + _arity(n, central)))}
    return _record("1", i, {"n": n, "power": power, "central": central}, sigma, f, roles)


def hike_stage2_term(field: Field, n_i: int, n_j: int, q1: int = 1, q2: int = 1,
                     qbar: int = 1, interior=(), start: int = 1, central: str = "h",
                     variable: int | None = None):
    """z1 [h_{n_i}, y] z2 (interior) H^q1 - z1 H^q2 [h_{n_i}, y] z2 (interior),
    H = h_{n_j}^qbar.

    Returned as the substitution x_v -> term so the record replays; v defaults
    to the first index after the fresh block.
    """
    if not n_i < n_j <= 2:
        raise UnsupportedN(f"need n_i < n_j <= 2, got {n_i}, {n_j}")
    idx = itertools.count(start)
    z1, z2, y = (next(idx) for _ in range(3))
    hi = tuple(next(idx) for _ in range(_arity(n_i)))
    hj = tuple(next(idx) for _ in range(_arity(n_j, central)))
    v = next(idx) if variable is None else variable
    bracket = commutator(central_h(field, n_i, hi[0]) if hi else NcPolynomial.one(field),
                         _var(field, y))
    H = _central(field, n_j, hj[0], central) ** qbar
    mid = _var(field, z1) * bracket * _var(field, z2)
    for g in interior:
        mid = mid * g
    left = _var(field, z1) * (H ** q2) * bracket * _var(field, z2)
    for g in interior:
        left = left * g
    term = mid * (H ** q1) - left
    roles = {"z": (z1, z2), "y": (y,), "h_i": hi, "H": hj}
    params = {"n_i": n_i, "n_j": n_j, "q1": q1, "q2": q2, "qbar": qbar, "central": central}
    return _record("2", v, params, {v: term}, _var(field, v), roles)


def hike_stage3(f: NcPolynomial, i: int, n: int, t: int, start: int | None = None,
                central: str = "h"):
    """x_i -> (h_n^t - h_n) x_i."""
    if i not in f.variables():
        raise VariableAbsent(f"x{i} does not occur")
    start = fresh_index(f) if start is None else start
    h = _central(f.field, n, start, central)
    sigma = {i: (h ** t - h) * _var(f.field, i, f.unital)}
    roles = {"h": tuple(range(start, start + _arity(n, central)))}
    return _record("3", i, {"n": n, "t": t, "central": central}, sigma, f, roles)


def hike_stage4_term(field: Field, n_i: int, n_prime: int, start: int = 1,
                     variable: int | None = None):
    """P(y) Q(ay) - Q(ay) P(y) with P(y) = c~(y) x c(y) Capelli sandwiches.

    The four Capelli factors use disjoint fresh blocks; the "ay" blocks stand
    for coefficient-scaled arguments bound at evaluation time.
    """
    if not (1 <= n_i <= 2 and 1 <= n_prime <= 2):
        raise UnsupportedN(f"need n_i, n'_i in 1..2, got {n_i}, {n_prime}")
    k1, k2 = n_i ** 2, n_prime ** 2
    idx = start
    blocks = {}
    for name, k in (("left", k1), ("right", k2), ("left_a", k1), ("right_a", k2)):
        blocks[name] = tuple(range(idx, idx + 2 * k))
        idx += 2 * k
    v = idx if variable is None else variable
    xv = _var(field, v)
    cap = {name: capelli(field, len(b) // 2, b[0]) for name, b in blocks.items()}
    P = cap["left"] * xv * cap["right"]
    Q = cap["left_a"] * xv * cap["right_a"]
    term = P * Q - Q * P
    return _record("4", v, {"n_i": n_i, "n_prime": n_prime}, {v: term}, xv, blocks)


def hike_expand(f: NcPolynomial, i: int, n: int, t: int, qbar: int = 1,
                start: int | None = None, central: str = "h"):
    """x_i -> h x_{i,1}^qbar x_{i,2} ... x_{i,t} h' x_i with disjoint copies h, h' of h_n."""
    if t < 1:
        raise ValueError("t must be positive")
    if i not in f.variables():
        raise VariableAbsent(f"x{i} does not occur")
    F = f.field
    start = fresh_index(f) if start is None else start
    a = _arity(n, central)
    h1 = _central(F, n, start, central)
    h2 = _central(F, n, start + a, central)
    fresh = _fresh_pairs(f, i, t)
    mid = _var(F, fresh[0]) ** qbar
    for v in fresh[1:]:
        mid = mid * _var(F, v)
    sigma = {i: h1 * mid * h2 * _var(F, i, f.unital)}
    roles = {"h": tuple(range(start, start + a)), "h'": tuple(range(start + a, start + 2 * a)),
             "x": tuple(fresh)}
    return _record("expand", i, {"n": n, "t": t, "qbar": qbar, "central": central}, sigma, f, roles)
