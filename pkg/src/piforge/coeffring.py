"""Exact coefficient arithmetic over Z, F_p and GF(p^m).

Elements are stored as plain Python ints. For GF(p^m) the int encodes the
coefficient vector of a polynomial in ``g`` of degree < m, base p, low degree
first: ``c_0 + c_1 p + ... + c_{m-1} p^{m-1}``. Element-level code passes
these ints through the owning :class:`Field`; :class:`FieldScalar` is a thin
operator-overloading wrapper for user-facing work.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import (CharacteristicZero, DivisionByZero, ExtensionTooLarge,
                     MixedFields, NonPrimeCharacteristic, NotAField, ParseError)

MAX_ORDER = 2 ** 20
_TABLE_ORDER = 4096     # log/exp tables below this order
_ADD_TABLE_ORDER = 256
_SCALAR_TERM = re.compile(r"([+-]?)(?:(\d+)(?:\*(g)(?:\^(\d+))?)?|(g)(?:\^(\d+))?)")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over F_p, coefficient lists low degree first ----------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    """Remainder of a modulo monic b over F_p."""
    a = list(a)
    db = len(b) - 1
    while len(_trim(a)) - 1 >= db:
        c = a[-1]
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
    return a


def _is_irreducible(modulus, p) -> bool:
    m = len(modulus) - 1
    if m == 1:
        return True
    # exhaustive factor search: any reducible polynomial has a monic factor
    # of degree <= m // 2
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _trim(_poly_mod(modulus, list(low) + [1], p)):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m, low-first."""
    for low in itertools.product(range(p), repeat=m):
        cand = list(low) + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class Field:
    """A coefficient ring: Z (p = 0), F_p (m = 1) or GF(p^m)."""

    p: int
    m: int = 1
    modulus: tuple[int, ...] | None = None

    # -- identity -----------------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.p > 0

    @property
    def order(self) -> int:
        """Number of elements; 0 stands for the infinite ring Z."""
        return self.p ** self.m if self.p else 0

    @property
    def name(self) -> str:
        if self.p == 0:
            return "Z"
        if self.m == 1:
            return f"F{self.p}"
        return f"GF({self.p},{self.m})"

    def __repr__(self) -> str:
        return self.name

    def prime_field(self) -> "Field":
        return make_field(self.p, 1)

    def elements(self):
        if not self.p:
            raise NotAField("Z has infinitely many elements")
        return range(self.order)

    # -- encoding helpers ---------------------------------------------------
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        v = 0
        for d in reversed(list(ds)):
            v = v * self.p + d % self.p
        return v

    def embed_int(self, n: int) -> int:
        """Image of the integer n under Z -> this ring."""
        return n % self.p if self.p else n

    @property
    def generator(self) -> int:
        """The class of ``g`` in GF(p^m)."""
        if self.m == 1:
            raise ValueError(f"{self.name} has no extension generator")
        return self.p

    def check(self, a: int) -> int:
        if self.p and not 0 <= a < self.order:
            raise ValueError(f"{a} is not a reduced element of {self.name}")
        return a

    # -- arithmetic ---------------------------------------------------------
    @cached_property
    def _add_table(self):
        q = self.order
        return [[self._slow_add(a, b) for b in range(q)] for a in range(q)]

    def _slow_add(self, a, b):
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def add(self, a: int, b: int) -> int:
        if self.p == 0:
            return a + b
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self.order <= _ADD_TABLE_ORDER:
            return self._add_table[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        if self.p == 0:
            return -a
        if self.m == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.from_digits(-d for d in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _slow_mul(self, a, b):
        p, m = self.p, self.m
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_digits(_poly_mod(prod, self.modulus, p)[:m])

    @cached_property
    def _log_tables(self):
        q = self.order
        prim = None
        factors = prime_factors(q - 1)
        for cand in range(2, q):
            if all(self._slow_pow(cand, (q - 1) // r) != 1 for r in factors):
                prim = cand
                break
        if q == 2:
            prim = 1
        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = self._slow_mul(exp[i - 1], prim)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        return exp, log

    def _slow_pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    def mul(self, a: int, b: int) -> int:
        if self.p == 0:
            return a * b
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.order <= _TABLE_ORDER:
            exp, log = self._log_tables
            return exp[(log[a] + log[b]) % (self.order - 1)]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in {self.name}")
        if self.p == 0:
            if a in (1, -1):
                return a
            raise NotAField(f"{a} is not invertible in Z")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.p == 0:
            return a ** e
        if self.m == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 1 if e == 0 else 0
        if self.order <= _TABLE_ORDER:
            exp, log = self._log_tables
            return exp[log[a] * e % (self.order - 1)]
        return self._slow_pow(a, e)

    def frobenius(self, a: int, e: int = 1) -> int:
        """a^(p^e); the identity once e is a multiple of m."""
        if self.p == 0:
            raise CharacteristicZero("Frobenius needs positive characteristic")
        if e < 0:
            raise ValueError("Frobenius exponent must be nonnegative")
        if self.m == 1:
            return a
        return self.pow(a, self.p ** (e % self.m))

    # -- text ---------------------------------------------------------------
    def format(self, a: int) -> str:
        if self.m == 1:
            return str(a)
        parts = []
        for i, d in reversed(list(enumerate(self.digits(a)))):
            if d == 0:
                continue
            mono = "" if i == 0 else ("g" if i == 1 else f"g^{i}")
            if not mono:
                parts.append(str(d))
            elif d == 1:
                parts.append(mono)
            else:
                parts.append(f"{d}*{mono}")
        return "+".join(parts) if parts else "0"

    def parse(self, text: str) -> int:
        s = text.replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        if not s:
            raise ParseError("empty scalar")
        total, pos = 0, 0
        while pos < len(s):
            m = _SCALAR_TERM.match(s, pos)
            if m is None or m.end() == pos or (pos > 0 and not m.group(1)):
                raise ParseError(f"cannot parse scalar {text!r}")
            sign, num, g1, e1, g2, e2 = m.groups()
            coeff = self.embed_int(int(num)) if num else 1
            if g1 or g2:
                if self.m == 1:
                    raise ParseError(f"'g' is meaningless in {self.name}")
                e = int(e1 or e2 or 1)
                coeff = self.mul(coeff, self.pow(self.generator, e))
            total = self.sub(total, coeff) if sign == "-" else self.add(total, coeff)
            pos = m.end()
        return total

    def __call__(self, value) -> "FieldScalar":
        if isinstance(value, str):
            return FieldScalar(self, self.parse(value))
        return FieldScalar(self, self.embed_int(int(value)))


@lru_cache(maxsize=None)
def make_field(p: int, m: int = 1) -> Field:
    """Build Z (p = 0), F_p, or GF(p^m) with the smallest lexicographic modulus."""
    if m < 1:
        raise ValueError("extension degree must be positive")
    if p == 0:
        if m != 1:
            raise ValueError("Z admits no extension degree")
        return Field(0, 1, None)
    if not is_prime(p):
        raise NonPrimeCharacteristic(f"{p} is not prime")
    if p ** m > MAX_ORDER:
        raise ExtensionTooLarge(f"{p}^{m} exceeds 2^20")
    if m == 1:
        return Field(p, 1, None)
    return Field(p, m, smallest_irreducible(p, m))


def parse_field(text: str) -> Field:
    """Field designators ``Z``, ``F2``, ``GF(2,2)``."""
    s = text.replace(" ", "")
    if s in ("Z", "ZZ"):
        return make_field(0)
    m = re.fullmatch(r"F(\d+)", s)
    if m:
        return make_field(int(m.group(1)))
    m = re.fullmatch(r"GF\((\d+),(\d+)\)", s)
    if m:
        return make_field(int(m.group(1)), int(m.group(2)))
    raise ParseError(f"unknown field designator {text!r}")


@dataclass(frozen=True)
class FieldScalar:
    """An element of a :class:`Field` with arithmetic operators."""

    field: Field
    value: int

    def __post_init__(self):
        self.field.check(self.value)

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field != self.field:
                raise MixedFields(f"{self.field.name} vs {other.field.name}")
            return other.value
        if isinstance(other, int):
            return self.field.embed_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldScalar(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldScalar(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldScalar(self.field, self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldScalar(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else FieldScalar(self.field, self.field.div(self.value, b))

    def __neg__(self):
        return FieldScalar(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldScalar(self.field, self.field.pow(self.value, e))

    def inv(self):
        return FieldScalar(self.field, self.field.inv(self.value))

    def frobenius(self, e: int = 1):
        return FieldScalar(self.field, self.field.frobenius(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.field.format(self.value)


def field_op(op: str, a: FieldScalar, b=None) -> FieldScalar:
    """Dispatch ``add|mul|neg|inv|pow`` on scalars (exponent for pow)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown field operation {op!r}")


def frobenius(a: FieldScalar, e: int) -> FieldScalar:
    return a.frobenius(e)
