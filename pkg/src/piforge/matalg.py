"""Exact square matrices over Z, F_p and GF(p^m), and their characteristic
coefficients.

Characteristic polynomials are computed with Berkowitz's division-free
recursion, so the same code is valid over Z and in characteristic p.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

from .coeffring import Field, FieldScalar, parse_field
from .errors import (CharacteristicZero, MixedFields, MixedSizes, NotAField,
                     NotPPower, SizeTooLarge)
from .freealg import is_p_power


@dataclass(frozen=True)
class Matrix:
    """An n x n matrix whose entries are encoded elements of ``field``."""

    field: Field
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    # -- constructors -----------------------------------------------------------
    @classmethod
    def from_lists(cls, field: Field, rows):
        return cls(field, tuple(tuple(field.embed_int(v) if field.m == 1 else v for v in r) for r in rows))

    @classmethod
    def zero(cls, field: Field, n: int):
        return cls(field, ((0,) * n,) * n)

    @classmethod
    def identity(cls, field: Field, n: int):
        return cls(field, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def unit(cls, field: Field, n: int, i: int, j: int, value: int = 1):
        """value * e_{ij}, zero-based indices."""
        return cls(field, tuple(tuple(value if (r, c) == (i, j) else 0 for c in range(n)) for r in range(n)))

    @classmethod
    def scalar(cls, field: Field, n: int, value: int):
        return cls(field, tuple(tuple(value if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, field: Field, values: Sequence[int]):
        n = len(values)
        return cls(field, tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    # -- structure --------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entry(self, i: int, j: int) -> FieldScalar:
        return FieldScalar(self.field, self.rows[i][j])

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other: "Matrix"):
        if other.field != self.field:
            raise MixedFields(f"{self.field.name} vs {other.field.name}")
        if other.n != self.n:
            raise MixedSizes(f"{self.n} vs {other.n}")

    def map(self, fn) -> "Matrix":
        return Matrix(self.field, tuple(tuple(fn(v) for v in r) for r in self.rows))

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        add = self.field.add
        return Matrix(self.field, tuple(tuple(add(a, b) for a, b in zip(r, s))
                                        for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "Matrix":
        return self.map(self.field.neg)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c: int) -> "Matrix":
        mul = self.field.mul
        return self.map(lambda v: mul(c, v))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.embed_int(other))
        self._check(other)
        F = self.field
        n = self.n
        cols = list(zip(*other.rows))
        if F.m == 1:
            p = F.p
            if p:
                return Matrix(F, tuple(tuple(sum(a * b for a, b in zip(r, c)) % p for c in cols)
                                       for r in self.rows))
            return Matrix(F, tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                                   for r in self.rows))
        add, mul = F.add, F.mul
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = 0
                for k in range(n):
                    if r[k] and c[k]:
                        acc = add(acc, mul(r[k], c[k]))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(F, tuple(out))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.embed_int(other))
        return NotImplemented

    def __pow__(self, e: int) -> "Matrix":
        if e < 0:
            raise ValueError("negative matrix power")
        result = Matrix.identity(self.field, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frobenius(self, e: int) -> "Matrix":
        F = self.field
        return self.map(lambda v: F.frobenius(v, e))

    def trace(self) -> int:
        acc = 0
        for i in range(self.n):
            acc = self.field.add(acc, self.rows[i][i])
        return acc

    def commutes_with(self, other: "Matrix") -> bool:
        return self * other == other * self

    def is_scalar(self) -> bool:
        c = self.rows[0][0] if self.n else 0
        return self == Matrix.scalar(self.field, self.n, c)

    # -- text / json ------------------------------------------------------------
    def to_json(self) -> dict:
        F = self.field
        return {"n": self.n, "field": F.name,
                "rows": [[F.format(v) for v in r] for r in self.rows]}

    @classmethod
    def from_json(cls, data) -> "Matrix":
        if isinstance(data, str):
            data = json.loads(data)
        F = parse_field(data["field"])
        rows = [[F.parse(str(v)) for v in r] for r in data["rows"]]
        if len(rows) != data.get("n", len(rows)):
            raise ValueError("declared size does not match rows")
        return cls(F, tuple(tuple(r) for r in rows))

    def __str__(self):
        F = self.field
        return "[" + "; ".join(" ".join(F.format(v) for v in r) for r in self.rows) + "]"


# -- univariate polynomials in lambda, coefficient lists low degree first -------

def upoly_mul(F: Field, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def upoly_add(F: Field, a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [F.add(x, y) for x, y in zip(a, b)]


def upoly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def upoly_divmod(F: Field, a, b):
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = F.inv(b[-1])
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bc))
        a = upoly_trim(a)
    return q, a


def upoly_gcd(F: Field, a, b):
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        _, r = upoly_divmod(F, a, b)
        a, b = b, r
    if a:
        inv = F.inv(a[-1])
        a = [F.mul(inv, c) for c in a]
    return a


def upoly_derivative(F: Field, a):
    return [F.mul(F.embed_int(i), c) for i, c in enumerate(a)][1:]


@dataclass(frozen=True)
class CharPoly:
    """f(lambda) = lambda^n + sum_{k<n} coeffs[k] lambda^k."""

    field: Field
    coeffs: tuple

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def full(self) -> list[int]:
        """All n+1 coefficients, low degree first, leading 1 included."""
        return list(self.coeffs) + [1]

    def signed(self, k: int) -> int:
        """Level-k coefficient (-1)^k * coeff of lambda^(n-k): the k-th
        elementary symmetric function of the eigenvalues (trace at k = 1)."""
        if not 0 <= k <= self.n:
            raise ValueError(f"level {k} outside 0..{self.n}")
        c = self.full()[self.n - k]
        return self.field.neg(c) if k % 2 else c

    def evaluate(self, a: Matrix) -> Matrix:
        """f_a evaluated at a matrix by Horner's rule."""
        F = self.field
        acc = Matrix.zero(F, a.n)
        for c in reversed(self.full()):
            acc = acc * a + Matrix.scalar(F, a.n, c)
        return acc

    def power(self, e: int) -> "CharPoly":
        F = self.field
        acc = [1]
        for _ in range(e):
            acc = upoly_mul(F, acc, self.full())
        return CharPoly(F, tuple(acc[:-1]))

    def __str__(self):
        F = self.field
        parts = []
        for k, c in reversed(list(enumerate(self.full()))):
            if c:
                mono = "1" if k == 0 else ("L" if k == 1 else f"L^{k}")
                parts.append(mono if c == 1 and k else f"{F.format(c)}*{mono}" if k else F.format(c))
        return " + ".join(parts)


MAX_CHARPOLY = 16


def char_poly(a: Matrix) -> CharPoly:
    """Berkowitz's recursion: det(lambda I - a) with ring operations only."""
    n = a.n
    if n > MAX_CHARPOLY:
        raise SizeTooLarge(f"n = {n} > {MAX_CHARPOLY}")
    F = a.field
    add, mul, neg = F.add, F.mul, F.neg
    A = a.rows
    # vector holds coefficients from the leading one downwards
    vec = [1]
    for r in range(n):
        # leading principal (r+1)x(r+1) block; new row/column index r
        M = [row[:r] for row in A[:r]]
        R = A[r][:r]
        S = [A[i][r] for i in range(r)]
        col = [1, neg(A[r][r])]
        power_s = S
        for _ in range(r):
            val = 0
            for x_, y_ in zip(R, power_s):
                if x_ and y_:
                    val = add(val, mul(x_, y_))
            col.append(neg(val))
            power_s = [_dot(F, M[i], power_s) for i in range(r)]
        # Toeplitz (r+2) x (r+1) lower triangular with first column ``col``
        new = []
        for i in range(r + 2):
            acc = 0
            for j in range(min(i + 1, len(vec))):
                c = col[i - j] if i - j < len(col) else 0
                if c and vec[j]:
                    acc = add(acc, mul(c, vec[j]))
            new.append(acc)
        vec = new
    return CharPoly(F, tuple(reversed(vec[1:])))


def _dot(F: Field, u, v):
    acc = 0
    for x_, y_ in zip(u, v):
        if x_ and y_:
            acc = F.add(acc, F.mul(x_, y_))
    return acc


def q_char_coeffs(a: Matrix, qbar: int) -> CharPoly:
    """The qbar-th powers of the characteristic coefficients of a.

    Cross-checked against the characteristic polynomial of a^qbar.
    """
    F = a.field
    if F.p == 0:
        raise CharacteristicZero("qbar-characteristic coefficients need characteristic p")
    if qbar < 1 or not is_p_power(qbar, F.p):
        raise NotPPower(f"{qbar} is not a power of {F.p}")
    powered = CharPoly(F, tuple(F.pow(c, qbar) for c in char_poly(a).coeffs))
    assert powered == char_poly(a ** qbar), "Frobenius law violated"
    return powered


def left_regular(a: Matrix) -> Matrix:
    """Matrix of X -> aX on M_n in the row-major basis e_11, e_12, ..., e_nn."""
    n = a.n
    if n > 4:
        raise SizeTooLarge(f"n = {n} > 4")
    F = a.field
    rows = []
    for i in range(n):
        for j in range(n):
            rows.append(tuple(a.rows[i][k] if l == j else 0 for k in range(n) for l in range(n)))
    out = Matrix(F, tuple(rows))
    return out


def matrix_char_coeff(a: Matrix, k: int) -> Matrix:
    """sum_j sum_{i_1..i_k} e_{j,i1} a e_{i2,i2} a ... a e_{ik,ik} a e_{i1,j},
    summed literally; k = 1 is the matrix trace sum_{i,j} e_ij a e_ji."""
    n = a.n
    if n > 3:
        raise SizeTooLarge(f"n = {n} > 3")
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    F = a.field
    E = {(i, j): Matrix.unit(F, n, i, j) for i in range(n) for j in range(n)}
    total = Matrix.zero(F, n)
    for j in range(n):
        for idx in itertools.product(range(n), repeat=k):
            term = E[(j, idx[0])] * a
            for i in idx[1:]:
                term = term * E[(i, i)] * a
            term = term * E[(idx[0], j)]
            total = total + term
    return total


def symmetrized_char_coeffs(mats: Sequence[Matrix], t: int, j: int) -> int:
    """j-th elementary symmetric function of the level-t coefficients."""
    if not mats:
        raise ValueError("need at least one matrix")
    F, n = mats[0].field, mats[0].n
    for m in mats:
        if m.n != n or m.field != F:
            raise MixedSizes("matrices differ in size or field")
    if not 1 <= j <= len(mats):
        raise ValueError(f"j = {j} outside 1..{len(mats)}")
    vals = [char_poly(m).signed(t) for m in mats]
    # e_j via the generating product prod (1 + v X)
    e = [1] + [0] * len(vals)
    for v in vals:
        for d in range(len(vals), 0, -1):
            e[d] = F.add(e[d], F.mul(v, e[d - 1]))
    return e[j]


def minimal_polynomial(a: Matrix) -> list[int]:
    """Monic minimal polynomial, low degree first (fields only)."""
    F = a.field
    if not F.is_field:
        raise NotAField("minimal polynomial needs field coefficients")
    from .linalg import SpanBasis
    n = a.n
    span = SpanBasis(F, track=True)
    power = Matrix.identity(F, n)
    for d in range(n + 1):
        vec = {(i, j): v for i, r in enumerate(power.rows) for j, v in enumerate(r) if v}
        residual, combo = span.reduce(vec)
        if not residual:
            # power = sum combo[k] * a^k
            poly = [F.neg(combo.get(k, 0)) for k in range(d)] + [1]
            return poly
        span.add(vec, label=d)
        power = power * a
    raise AssertionError("Cayley-Hamilton bound exceeded")  # pragma: no cover


def is_semisimple(a: Matrix) -> bool:
    """True iff the minimal polynomial is squarefree."""
    F = a.field
    if not F.is_field:
        raise NotAField("semisimplicity is tested over fields")
    m = minimal_polynomial(a)
    dm = upoly_trim(upoly_derivative(F, m))
    if not dm:
        return len(m) == 1
    return len(upoly_gcd(F, m, dm)) == 1
