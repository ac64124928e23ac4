"""Sparse exact Gaussian elimination over a Field.

Vectors are dicts from arbitrary hashable coordinates to nonzero encoded
field elements.  A SpanBasis keeps an echelon basis and, optionally, how
each basis row is written in terms of the labelled vectors that were added.
"""
from __future__ import annotations

from typing import Hashable

from .coeffring import Field
from .errors import NotAField


def axpy(F: Field, y: dict, c: int, v: dict) -> dict:
    """y + c*v, returning a fresh dict with zeros dropped."""
    out = dict(y)
    if not c:
        return out
    add, mul = F.add, F.mul
    for k, a in v.items():
        s = add(out.get(k, 0), mul(c, a))
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class SpanBasis:
    def __init__(self, field: Field, track: bool = False):
        if not field.is_field:
            raise NotAField("elimination needs field coefficients")
        self.field = field
        self.track = track
        self.rows: list[tuple[Hashable, dict, dict]] = []   # pivot, vector, combination

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict):
        """Return (residual, combo) with vec = residual + sum combo[label]*added[label]."""
        F = self.field
        res = {k: v for k, v in vec.items() if v}
        combo: dict = {}
        for pivot, row, rc in self.rows:
            c = res.get(pivot)
            if c:
                res = axpy(F, res, F.neg(c), row)
                if self.track:
                    combo = axpy(F, combo, c, rc)
        return res, combo

    def add(self, vec: dict, label: Hashable = None) -> bool:
        """Insert vec; False if it was already in the span."""
        F = self.field
        res, combo = self.reduce(vec)
        if not res:
            return False
        pivot = min(res, key=_sort_key)
        inv = F.inv(res[pivot])
        row = {k: F.mul(inv, v) for k, v in res.items()}
        rc = {}
        if self.track:
            # res = vec - combo, so row = inv*(e_label - combo)
            rc = {k: F.mul(inv, F.neg(v)) for k, v in combo.items()}
            rc = axpy(F, rc, inv, {label: 1})
        self.rows.append((pivot, row, rc))
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]


def _sort_key(k):
    return (str(type(k)), k) if not isinstance(k, tuple) else ("tuple", k)


def rank(field: Field, vectors) -> int:
    span = SpanBasis(field)
    for v in vectors:
        span.add(v)
    return len(span)
