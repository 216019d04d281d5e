"""Exact sparse linear algebra over ℚ.

Vectors are dicts ``{key: coefficient}`` with hashable, mutually comparable
keys.  Elimination runs on integer rows (denominators are cleared first and
every row is divided by its content after each update), so no intermediate
fractions are formed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Hashable, Iterable, Mapping, Sequence

Vector = Mapping[Hashable, object]


def _integer_row(row: Mapping) -> dict:
    den = 1
    for c in row.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    out = {}
    for k, c in row.items():
        v = c * den
        v = v.numerator if isinstance(v, Fraction) else int(v)
        if v:
            out[k] = v
    return _primitive(out)


def _primitive(row: dict) -> dict:
    if not row:
        return row
    g = reduce(gcd, (abs(v) for v in row.values()))
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _combine(r: dict, p: dict, col) -> dict:
    """Return primitive ``p[col]*r - r[col]*p`` (kills ``col`` in r)."""
    a = p[col]
    b = r[col]
    g = gcd(a, b)
    a //= g
    b //= g
    out = {k: v * a for k, v in r.items()}
    for k, v in p.items():
        s = out.get(k, 0) - b * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    out.pop(col, None)
    return _primitive(out)


def row_reduce(rows: Iterable[Mapping], order: Sequence) -> list[tuple[object, dict]]:
    """Fraction-free Gauss-Jordan elimination.

    ``order`` lists the column keys; pivots are chosen in that order.  Returns
    ``[(pivot_column, row)]`` with every pivot column cleared from all other rows.
    """
    position = {k: i for i, k in enumerate(order)}
    pending = [r for r in (_integer_row(r) for r in rows) if r]
    pivots: list[tuple[object, dict]] = []
    by_col: dict = {}
    for r in pending:
        for col, prow in pivots:
            if col in r:
                r = _combine(r, prow, col)
                if not r:
                    break
        if not r:
            continue
        col = min(r, key=position.__getitem__)
        if r[col] < 0:
            r = {k: -v for k, v in r.items()}
        for i, (c2, prow) in enumerate(pivots):
            if col in prow:
                pivots[i] = (c2, _combine(prow, r, col))
        pivots.append((col, r))
        by_col[col] = r
    pivots.sort(key=lambda cr: position[cr[0]])
    return pivots


def nullspace(columns: Sequence[Vector]) -> list[list[Fraction]]:
    """Basis of ``{c : sum_j c_j * columns[j] == 0}``.

    Each basis vector is returned with integer entries and positive last
    nonzero entry scaled to be primitive; order follows the free columns.
    """
    n = len(columns)
    rows: dict = {}
    for j, col in enumerate(columns):
        for k, v in col.items():
            if v:
                rows.setdefault(k, {})[j] = v
    reduced = row_reduce(rows.values(), list(range(n)))
    pivot_cols = {c for c, _ in reduced}
    basis: list[list[Fraction]] = []
    for f in range(n):
        if f in pivot_cols:
            continue
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for c, r in reduced:
            if f in r:
                vec[c] = Fraction(-r[f], r[c])
        den = reduce(lcm, (v.denominator for v in vec), 1)
        ints = [int(v * den) for v in vec]
        g = reduce(gcd, (abs(v) for v in ints), 0) or 1
        basis.append([Fraction(v // g) for v in ints])
    return basis


def rank(vectors: Iterable[Vector]) -> int:
    eb = EchelonBasis()
    return sum(1 for v in vectors if eb.add(v))


class EchelonBasis:
    """Incrementally maintained reduced basis of a span.

    >>> eb = EchelonBasis()
    >>> eb.add({"a": 1, "b": 1}), eb.add({"a": 2, "b": 2}), eb.add({"b": 1})
    (True, False, True)
    >>> eb.contains({"a": 3})
    True
    """

    def __init__(self, key=None):
        self._key = key
        self._rows: list[tuple[object, dict]] = []
        self._by_col: dict = {}

    def __len__(self) -> int:
        return len(self._rows)

    def _pick(self, r: dict):
        if self._key is None:
            return min(r, key=_safe_key)
        return min(r, key=self._key)

    def reduce(self, v: Vector) -> dict:
        r = _integer_row(v)
        for col, prow in self._rows:
            if col in r:
                r = _combine(r, prow, col)
                if not r:
                    return r
        return r

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def add(self, v: Vector) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        col = self._pick(r)
        for i, (c2, prow) in enumerate(self._rows):
            if col in prow:
                self._rows[i] = (c2, _combine(prow, r, col))
        self._rows.append((col, r))
        return True

    def vectors(self) -> list[dict]:
        return [dict(r) for _, r in self._rows]


def _safe_key(k):
    return (type(k).__name__, k)


def combine(coeffs: Sequence, vectors: Sequence[Vector]) -> dict:
    out: dict = {}
    for c, v in zip(coeffs, vectors):
        if not c:
            continue
        for k, x in v.items():
            s = out.get(k, 0) + c * x
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def span_intersection_dim(vectors: Sequence[Vector], allowed) -> int:
    """dim( span(vectors) ∩ {v : every nonzero key k of v has allowed(k)} )."""
    if not vectors:
        return 0
    outside = [{k: c for k, c in v.items() if not allowed(k)} for v in vectors]
    combos = nullspace(outside)
    return rank(combine(c, vectors) for c in combos)


def independent_subset(vectors: Sequence[Vector]) -> list[int]:
    """Indices of a maximal independent subset, greedy in the given order."""
    eb = EchelonBasis()
    return [i for i, v in enumerate(vectors) if eb.add(v)]
