"""The free noncommutative algebra C{x}.

Words are tuples of positive indeterminate indices. The fresh variable
``x_{i,j}`` produced by linearizing ``x_i`` gets index ``i * BASE + j``;
nested linearizations nest the pairing, and printing undoes it
(``x1_2``, ``x1_2_1``).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping

from .coeffring import Field, make_field
from .errors import (BinomialVanishes, CharacteristicZero, MixedFields,
                     NotUnital, ParseError, TooLarge, VariableAbsent)

BASE = 2 ** 20
# products with more term pairs than this are refused instead of exhausting memory
MAX_PRODUCT_TERMS = 4_000_000

Word = tuple


def pair(i: int, j: int) -> int:
    """Index of the fresh variable x_{i,j}."""
    return i * BASE + j


def root(i: int) -> int:
    while i >= BASE:
        i //= BASE
    return i


def letter_name(i: int) -> str:
    tail = []
    while i >= BASE:
        i, j = divmod(i, BASE)
        tail.append(str(j))
    return "x" + "_".join([str(i)] + tail[::-1])


def parse_letter(text: str) -> int:
    m = re.fullmatch(r"x(\d+(?:_\d+)*)", text)
    if not m:
        raise ParseError(f"bad letter {text!r}")
    parts = [int(t) for t in m.group(1).split("_")]
    idx = parts[0]
    if idx <= 0 or idx >= BASE:
        raise ParseError(f"letter index out of range in {text!r}")
    for j in parts[1:]:
        if not 0 < j < BASE:
            raise ParseError(f"bad second-level index in {text!r}")
        idx = pair(idx, j)
    return idx


def word_key(w: Word):
    """Canonical order: total degree (= length), then lexicographic."""
    return (len(w), w)


def is_p_power(d: int, p: int) -> bool:
    while d > 1 and d % p == 0:
        d //= p
    return d == 1


@dataclass(frozen=True, eq=False)
class NcPolynomial:
    """Finitely supported map from words to nonzero scalars.

    ``unital`` marks a context in which the empty word (the unit) is legal.
    """

    field: Field
    terms: Mapping[Word, int] = dc_field(default_factory=dict)
    unital: bool = False

    def __post_init__(self):
        clean = {}
        for w, c in self.terms.items():
            w = tuple(w)
            if not w and not self.unital:
                raise NotUnital("empty word in a non-unital context")
            if c:
                clean[w] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda t: word_key(t[0]))))

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, field: Field, unital=False):
        return cls(field, {}, unital)

    @classmethod
    def one(cls, field: Field):
        return cls(field, {(): 1}, True)

    @classmethod
    def var(cls, field: Field, i: int, unital=False):
        return cls(field, {(i,): 1}, unital)

    @classmethod
    def monomial(cls, field: Field, word: Iterable[int], coeff: int = 1, unital=False):
        c = field.embed_int(coeff) if field.m == 1 else field.check(coeff)
        return cls(field, {tuple(word): c}, unital)

    # -- basic structure ------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, tuple(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def is_zero(self):
        return not self.terms

    def variables(self) -> set[int]:
        return {i for w in self.terms for i in w}

    def max_index(self) -> int:
        return max((i for w in self.terms for i in w), default=0)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def deg(self, i: int) -> int:
        """deg_i: maximal degree of x_i over the monomials."""
        return max((w.count(i) for w in self.terms), default=0)

    def leading_part(self, i: int) -> "NcPolynomial":
        d = self.deg(i)
        return self._filter(lambda w: w.count(i) == d)

    def multidegree(self, w: Word) -> tuple:
        return tuple(sorted((i, w.count(i)) for i in set(w)))

    def is_multilinear(self, variables: Iterable[int] | None = None) -> bool:
        """Every listed variable (default: all) has degree exactly 1 in every monomial."""
        vs = self.variables() if variables is None else set(variables)
        return bool(self.terms) and all(w.count(i) == 1 for w in self.terms for i in vs)

    def is_homogeneous(self) -> bool:
        return len({self.multidegree(w) for w in self.terms}) <= 1

    def _filter(self, pred) -> "NcPolynomial":
        return NcPolynomial(self.field, {w: c for w, c in self.terms.items() if pred(w)}, self.unital)

    def _check(self, other: "NcPolynomial"):
        if other.field != self.field:
            raise MixedFields(f"{self.field.name} vs {other.field.name}")

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, NcPolynomial):
            self._check(other)
            return other
        if isinstance(other, int):
            if other == 0:
                return NcPolynomial.zero(self.field, self.unital)
            return NcPolynomial(self.field, {(): self.field.embed_int(other)}, True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = F.add(out.get(w, 0), c)
        return NcPolynomial(F, out, self.unital or other.unital)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return NcPolynomial(F, {w: F.neg(c) for w, c in self.terms.items()}, self.unital)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "NcPolynomial":
        F = self.field
        return NcPolynomial(F, {w: F.mul(c, v) for w, v in self.terms.items()}, self.unital)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.embed_int(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self) * len(other) > MAX_PRODUCT_TERMS:
            raise TooLarge(f"product of {len(self)} and {len(other)} terms exceeds {MAX_PRODUCT_TERMS}")
        F = self.field
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = F.add(out.get(w, 0), F.mul(c1, c2))
        return NcPolynomial(F, out, self.unital or other.unital)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.embed_int(other))
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        if e == 0:
            return NcPolynomial.one(self.field)
        result, base = None, self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def with_unital(self, flag=True):
        return NcPolynomial(self.field, self.terms, flag)

    # -- substitution ---------------------------------------------------------
    def substitute(self, sigma: Mapping[int, "NcPolynomial"]) -> "NcPolynomial":
        """Apply the endomorphism x_i -> sigma[i] (unmapped letters fixed)."""
        F = self.field
        unital = self.unital or any(g.unital for g in sigma.values())
        for g in sigma.values():
            self._check(g)
        images = {i: list(g.terms.items()) for i, g in sigma.items()}
        out: dict = {}
        for w, c in self.terms.items():
            partial = {(): c}
            for letter in w:
                img = images.get(letter)
                nxt: dict = {}
                if img is None:
                    for pw, pc in partial.items():
                        key = pw + (letter,)
                        nxt[key] = F.add(nxt.get(key, 0), pc)
                else:
                    for pw, pc in partial.items():
                        for iw, ic in img:
                            key = pw + iw
                            nxt[key] = F.add(nxt.get(key, 0), F.mul(pc, ic))
                partial = {k: v for k, v in nxt.items() if v}
                if not partial:
                    break
            for k, v in partial.items():
                out[k] = F.add(out.get(k, 0), v)
        return NcPolynomial(F, out, unital)

    def rename(self, mapping: Mapping[int, int]) -> "NcPolynomial":
        F = self.field
        out: dict = {}
        for w, c in self.terms.items():
            key = tuple(mapping.get(i, i) for i in w)
            out[key] = F.add(out.get(key, 0), c)
        return NcPolynomial(F, out, self.unital)

    # -- decompositions -------------------------------------------------------
    def blended_components(self) -> list["NcPolynomial"]:
        groups: dict = {}
        for w, c in self.terms.items():
            groups.setdefault(frozenset(w), {})[w] = c
        keys = sorted(groups, key=lambda s: (len(s), sorted(s)))
        return [NcPolynomial(self.field, groups[k], self.unital) for k in keys]

    def homogeneous_components(self) -> list["NcPolynomial"]:
        groups: dict = {}
        for w, c in self.terms.items():
            groups.setdefault(self.multidegree(w), {})[w] = c
        keys = sorted(groups, key=lambda md: (sum(d for _, d in md), md))
        return [NcPolynomial(self.field, groups[k], self.unital) for k in keys]

    def component(self, degrees: Mapping[int, int]) -> "NcPolynomial":
        """Monomials whose degree in each listed variable is as given."""
        return self._filter(lambda w: all(w.count(i) == d for i, d in degrees.items()))

    # -- text -----------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"NcPolynomial({self.field.name}: {format_poly(self)})"


def poly(field: Field, text: str, unital: bool | None = None) -> NcPolynomial:
    return parse_poly(text, field, unital)


def x(field: Field, i: int) -> NcPolynomial:
    return NcPolynomial.var(field, i)


def _format_coeff(F: Field, c: int) -> tuple[str, str]:
    """(sign, magnitude text) with '1' meaning an omittable unit."""
    if F.p == 0 and c < 0:
        return "-", str(-c)
    s = F.format(c)
    if "+" in s:
        s = f"({s})"
    return "+", s


def format_poly(f: NcPolynomial) -> str:
    if not f.terms:
        return "0"
    out = []
    for k, (w, c) in enumerate(f.terms.items()):
        sign, mag = _format_coeff(f.field, c)
        body = ".".join(letter_name(i) for i in w)
        if not body:
            text = mag
        elif mag == "1":
            text = body
        else:
            text = f"{mag}*{body}"
        if k == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def _split_top(s: str):
    """Split at top-level + and -, keeping signs."""
    terms, depth, cur, sign = [], 0, "", "+"
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur and not cur.endswith("*") and not cur.endswith("^"):
            terms.append((sign, cur))
            sign, cur = ch, ""
            continue
        if depth == 0 and ch in "+-" and not cur:
            sign = "-" if (sign == "-") != (ch == "-") else "+"
            continue
        cur += ch
    if cur:
        terms.append((sign, cur))
    return terms


def parse_poly(text: str, field: Field, unital: bool | None = None) -> NcPolynomial:
    """Parse the ``2*x1.x2 - x2.x1.x1 + g*x3`` text format."""
    s = text.replace(" ", "").strip()
    if not s:
        raise ParseError("empty polynomial text")
    F = field
    out: dict = {}
    saw_unit = False
    if s == "0":
        return NcPolynomial.zero(F, bool(unital))
    for sign, term in _split_top(s):
        depth, star = 0, -1
        for k, ch in enumerate(term):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "*" and depth == 0 and term[k + 1:k + 2] == "x":
                star = k
                break
        if star >= 0:
            coeff, word_text = F.parse(term[:star]), term[star + 1:]
        elif term.startswith("x"):
            coeff, word_text = 1, term
        else:
            coeff, word_text = F.parse(term), ""
        word = tuple(parse_letter(t) for t in word_text.split(".")) if word_text else ()
        if not word:
            saw_unit = True
        if sign == "-":
            coeff = F.neg(coeff)
        out[word] = F.add(out.get(word, 0), coeff)
    if unital is None:
        unital = saw_unit
    if saw_unit and not unital:
        raise NotUnital("constant term in a non-unital context")
    return NcPolynomial(F, out, unital)


# -- linearization calculus -----------------------------------------------------

def _fresh_pairs(f: NcPolynomial, i: int, count: int) -> list[int]:
    fresh = [pair(i, j) for j in range(1, count + 1)]
    clash = f.variables() & set(fresh)
    if clash:
        raise ValueError(f"fresh variables {sorted(clash)} already occur in f")
    return fresh


def fresh_index(*polys: NcPolynomial) -> int:
    """Smallest plain index above every root index in use."""
    return 1 + max((root(i) for f in polys for i in f.variables()), default=0)


def partial_linearization(f: NcPolynomial, i: int, parts: int | None = None) -> NcPolynomial:
    """Delta_i f over fresh variables x_{i,1..d_i}.

    With ``parts=2`` only two fresh variables are used, i.e. the full
    linearization with x_{i,j} -> 0 for j > 2.
    """
    d = f.deg(i)
    if d == 0:
        raise VariableAbsent(f"x{i} does not occur")
    k = d if parts is None else parts
    fresh = _fresh_pairs(f, i, k)
    F = f.field
    total = NcPolynomial(F, {(v,): 1 for v in fresh}, f.unital)
    result = f.substitute({i: total})
    for v in fresh:
        result = result - f.substitute({i: NcPolynomial.var(F, v, f.unital)})
    for v in fresh:
        assert result.deg(v) < d, "linearization must lower the degree"
    return result


@dataclass(frozen=True)
class LinearizationStep:
    """One step f -> f(x_i -> a + b) - f(x_i -> a) - f(x_i -> b)."""

    variable: int
    fresh: tuple

    def apply(self, f: NcPolynomial) -> NcPolynomial:
        F = f.field
        a, b = (NcPolynomial.var(F, v, f.unital) for v in self.fresh)
        return f.substitute({self.variable: a + b}) - f.substitute({self.variable: a}) \
            - f.substitute({self.variable: b})


@dataclass(frozen=True)
class QuasiLinearization:
    source: NcPolynomial
    steps: tuple
    result: NcPolynomial

    def replay(self) -> NcPolynomial:
        g = self.source
        for step in self.steps:
            g = step.apply(g)
        return g

    def verify(self) -> bool:
        return self.replay() == self.result


def quasi_linearize(f: NcPolynomial, trace: bool = False):
    """Linearize until every variable degree is a power of p.

    Each round replaces a variable x_i of non-p-power degree by two fresh
    variables via f(a + b) - f(a) - f(b), an element of the T-ideal of f.
    Returns the polynomial, or a :class:`QuasiLinearization` if ``trace``.
    """
    p = f.field.p
    if p == 0:
        raise CharacteristicZero("quasi-linearization is characteristic-p machinery")
    steps = []
    g = f
    while True:
        bad = sorted(i for i in g.variables() if not is_p_power(g.deg(i), p))
        if not bad or g.is_zero():
            break
        i = bad[0]
        step = LinearizationStep(i, tuple(_fresh_pairs(g, i, 2)))
        g = step.apply(g)
        steps.append(step)
    if trace:
        return QuasiLinearization(f, tuple(steps), g)
    return g


def recover_leading(f: NcPolynomial, i: int, k: int, literal: bool = False) -> NcPolynomial:
    """Recover binom(d_i, k) times the leading i-part of f from Delta_i f.

    Takes the component of Delta_i f of degree k in x_{i,1} and d_i - k in
    x_{i,2} (all other x_{i,j} set to 0) and identifies x_{i,1}, x_{i,2}
    with x_i. ``literal=True`` instead sends x_{i,2} to 1, which needs a
    unital context and returns binom(d_i, k) * x_i^k-type data.
    """
    d = f.deg(i)
    if d == 0:
        raise VariableAbsent(f"x{i} does not occur")
    p = f.field.p
    b = math.comb(d, k)
    if not 0 < k < d or (p and b % p == 0) or b == 0:
        raise BinomialVanishes(f"binom({d},{k}) vanishes mod {p}")
    if literal and not f.unital:
        raise NotUnital("the specialization x_{i,2} -> 1 needs a unit")
    delta = partial_linearization(f, i)
    fresh = [pair(i, j) for j in range(1, d + 1)]
    comp = delta.component({fresh[0]: k, fresh[1]: d - k, **{v: 0 for v in fresh[2:]}})
    F = f.field
    xi = NcPolynomial.var(F, i, f.unital)
    second = NcPolynomial.one(F) if literal else xi
    return comp.substitute({fresh[0]: xi, fresh[1]: second})


@dataclass(frozen=True)
class ClosureCertificate:
    """How a closure member arises from an element of the input set.

    ``steps`` holds ("component", multidegree) and ("linearize", i, fresh)
    entries applied left to right starting from ``origin``.
    """

    origin: NcPolynomial
    steps: tuple
    result: NcPolynomial

    def replay(self) -> NcPolynomial:
        g = self.origin
        for step in self.steps:
            if step[0] == "component":
                md = dict(step[1])
                g = g._filter(lambda w, md=md: g.multidegree(w) == tuple(sorted(md.items())))
            else:
                g = LinearizationStep(step[1], step[2]).apply(g)
        return g

    def verify(self) -> bool:
        return self.replay() == self.result


def ultra_homogeneous_closure(polys: Iterable[NcPolynomial], certificates: bool = False):
    """Smallest set containing ``polys`` closed under homogeneous components
    and homogeneous components of partial linearizations.

    Linearization here is the two-variable f(a + b) - f(a) - f(b), applied to
    every variable of degree at least 2. Every new member has strictly
    smaller degree in the variables it splits, so the loop terminates.
    """
    polys = list(polys)
    if any(f.field.p == 0 for f in polys):
        raise CharacteristicZero("ultra-homogeneous closure is characteristic-p machinery")
    certs: dict = {}
    queue = []
    for f in polys:
        if f.is_zero():
            continue
        if f not in certs:
            certs[f] = ClosureCertificate(f, (), f)
            queue.append(f)
    while queue:
        g = queue.pop()
        cert = certs[g]
        derived = []
        for comp in g.homogeneous_components():
            md = comp.multidegree(next(iter(comp.terms)))
            derived.append((comp, (("component", md),)))
        for i in sorted(g.variables()):
            if g.deg(i) < 2:
                continue
            step = LinearizationStep(i, tuple(_fresh_pairs(g, i, 2)))
            lin = step.apply(g)
            for comp in lin.homogeneous_components():
                md = comp.multidegree(next(iter(comp.terms)))
                derived.append((comp, (("linearize", i, step.fresh), ("component", md))))
        for h, extra in derived:
            if h.is_zero() or h in certs:
                continue
            certs[h] = ClosureCertificate(cert.origin, cert.steps + extra, h)
            queue.append(h)
    members = sorted(certs, key=_poly_sort_key)
    if certificates:
        return members, [certs[h] for h in members]
    return members


def _poly_sort_key(f: NcPolynomial):
    return (f.degree(), [word_key(w) for w in f.terms], list(f.terms.values()))


def blended_components(f: NcPolynomial) -> list[NcPolynomial]:
    return f.blended_components()


def homogeneous_components(f: NcPolynomial) -> list[NcPolynomial]:
    return f.homogeneous_components()


def substitute(f: NcPolynomial, sigma: Mapping[int, NcPolynomial]) -> NcPolynomial:
    return f.substitute(sigma)


def poly_arith(op: str, f: NcPolynomial, g=None) -> NcPolynomial:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g if isinstance(g, int) else g.value)
    if op == "power":
        return f ** int(g)
    raise ValueError(f"unknown polynomial operation {op!r}")


__all__ = [
    "BASE", "NcPolynomial", "ClosureCertificate", "LinearizationStep", "QuasiLinearization",
    "blended_components", "format_poly", "fresh_index", "homogeneous_components",
    "is_p_power", "letter_name", "make_field", "pair", "parse_letter", "parse_poly",
    "partial_linearization", "poly", "poly_arith", "quasi_linearize", "recover_leading",
    "root", "substitute", "ultra_homogeneous_closure", "x",
]
