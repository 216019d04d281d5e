"""Sparse multivariate polynomials with exact rational coefficients.

Variables are small integers: ``PARTIAL`` is the derivation ∂ (printed ``d``),
``DEFPARAM`` is the deformation parameter (``t``), and ``slot(i)`` is the i-th
λ-variable (``x<i>``).  A monomial is the tuple of exponents indexed by variable,
with trailing zeros stripped, so equal monomials always have equal keys.

All variables commute.  In particular ∂ is an ordinary polynomial variable here:
the rule "evaluate μ = -∂-λ with ∂ acting on the coefficients" is nothing more
than substituting ``-d - x0`` for ``x1``::

    >>> mu_sq = var(slot(1)) ** 2
    >>> str(mu_sq.substitute(slot(1), -D - X0))
    'd^2 + 2*d*x0 + x0^2'
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

PARTIAL = 0
DEFPARAM = 1
_SLOT_BASE = 2

Scalar = Union[int, Fraction]
Monomial = tuple


def slot(i: int) -> int:
    if i < 0:
        raise ValueError(f"slot index must be nonnegative, got {i}")
    return _SLOT_BASE + i


def slot_index(v: int) -> int:
    """Inverse of :func:`slot`; raises for ∂ and t."""
    if v < _SLOT_BASE:
        raise ValueError(f"variable {var_name(v)} is not a λ-slot")
    return v - _SLOT_BASE


def is_slot(v: int) -> bool:
    return v >= _SLOT_BASE


def var_name(v: int) -> str:
    if v == PARTIAL:
        return "d"
    if v == DEFPARAM:
        return "t"
    return f"x{v - _SLOT_BASE}"


def _norm(c) -> Scalar:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if len(a) < len(b):
        a, b = b, a
    return tuple([x + y for x, y in zip(a, b)]) + a[len(b):]


def _strip(m: Iterable[int]) -> Monomial:
    m = list(m)
    while m and m[-1] == 0:
        m.pop()
    return tuple(m)


def mono_key(m: Monomial) -> tuple:
    """Sort key realising graded-lex order (bigger key = bigger monomial)."""
    return (sum(m), m)


class MultiPoly:
    """Immutable sparse polynomial ``{monomial: coefficient}``.

    Coefficients are ``int`` or ``Fraction``; fractions with denominator one are
    stored as ints.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Scalar] = {}
        if terms:
            for m, c in terms.items():
                if c == 0:
                    continue
                if not isinstance(c, Rational):
                    raise TypeError(f"coefficient must be rational, got {c!r}")
                m = _strip(m)
                if any(e < 0 for e in m):
                    raise ValueError(f"negative exponent in {m}")
                c = _norm(clean.get(m, 0) + c)
                if c == 0:
                    clean.pop(m, None)
                else:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> MultiPoly:
        # caller guarantees canonical keys and no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> MultiPoly:
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({(): c} if c != 0 else {})

    @classmethod
    def var(cls, v: int, power: int = 1) -> MultiPoly:
        m = [0] * (v + 1)
        m[v] = power
        return cls._raw({_strip(m): 1})

    @classmethod
    def coerce(cls, x) -> MultiPoly:
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, Rational):
            return cls.const(x)
        raise TypeError(f"cannot coerce {x!r} to MultiPoly")

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Scalar]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Scalar]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_term(self) -> Scalar:
        return self._terms.get((), 0)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for m in self._terms:
            out.update(i for i, e in enumerate(m) if e)
        return out

    def max_var(self) -> int:
        """Largest variable index present, -1 for constants."""
        return max((len(m) - 1 for m in self._terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def degree_in(self, v: int) -> int:
        if not self._terms:
            return -1
        return max(m[v] if v < len(m) else 0 for m in self._terms)

    def degree_excluding(self, v: int) -> int:
        """Total degree ignoring the variable ``v`` (used to leave t out)."""
        if not self._terms:
            return -1
        return max(sum(m) - (m[v] if v < len(m) else 0) for m in self._terms)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other) -> MultiPoly:
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = _norm(s + c)
                if s == 0:
                    del out[m]
                else:
                    out[m] = s
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> MultiPoly:
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> MultiPoly:
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, Rational):
            if other == 0:
                return ZERO
            return MultiPoly._raw({m: _norm(c * other) for m, c in self._terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((mb, cb),) = b.items()
            if not mb:
                if cb == 1:
                    return self if a is self._terms else other
                return MultiPoly._raw({m: _norm(c * cb) for m, c in a.items()})
            return MultiPoly._raw({_mono_mul(m, mb): _norm(c * cb) for m, c in a.items()})
        out: dict[Monomial, Scalar] = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                out[m] = get(m, 0) + ca * cb
        return MultiPoly._raw({m: _norm(c) for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MultiPoly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- substitution ---------------------------------------------------
    def subs(self, mapping: Mapping[int, MultiPoly]) -> MultiPoly:
        """Simultaneous substitution ``v -> mapping[v]``."""
        mapping = {v: MultiPoly.coerce(r) for v, r in mapping.items()}
        if not mapping or not self._terms:
            return self
        touched = [v for v in mapping if any(v < len(m) and m[v] for m in self._terms)]
        if not touched:
            return self
        powers: dict[tuple[int, int], MultiPoly] = {}

        def power(v: int, e: int) -> MultiPoly:
            key = (v, e)
            p = powers.get(key)
            if p is None:
                p = mapping[v] if e == 1 else power(v, e - 1) * mapping[v]
                powers[key] = p
            return p

        acc: dict[Monomial, Scalar] = {}
        for m, c in self._terms.items():
            rest = list(m)
            factor: MultiPoly | None = None
            for v in touched:
                if v < len(rest) and rest[v]:
                    pv = power(v, rest[v])
                    rest[v] = 0
                    factor = pv if factor is None else factor * pv
            rest_m = _strip(rest)
            if factor is None:
                acc[rest_m] = acc.get(rest_m, 0) + c
                continue
            for fm, fc in factor._terms.items():
                k = _mono_mul(fm, rest_m)
                acc[k] = acc.get(k, 0) + fc * c
        return MultiPoly._raw({m: _norm(c) for m, c in acc.items() if c != 0})

    def substitute(self, v: int, r) -> MultiPoly:
        return self.subs({v: MultiPoly.coerce(r)})

    def expand_in_variable(self, v: int) -> list[tuple[int, MultiPoly]]:
        """Return ``[(k, c_k)]`` with ``self == sum v^k c_k``; ascending k, zero c_k omitted."""
        buckets: dict[int, dict[Monomial, Scalar]] = {}
        for m, c in self._terms.items():
            k = m[v] if v < len(m) else 0
            if k:
                mm = list(m)
                mm[v] = 0
                m = _strip(mm)
            buckets.setdefault(k, {})[m] = c
        return [(k, MultiPoly._raw(buckets[k])) for k in sorted(buckets)]

    def coefficient(self, v: int, k: int) -> MultiPoly:
        for power, c in self.expand_in_variable(v):
            if power == k:
                return c
        return ZERO

    # -- comparison and printing ----------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        if isinstance(other, Rational):
            return self._terms == ({(): _norm(Fraction(other))} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            factors = []
            for v, e in enumerate(m):
                if e == 1:
                    factors.append(var_name(v))
                elif e > 1:
                    factors.append(f"{var_name(v)}^{e}")
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = f"{a}*" + "*".join(factors)
            if i == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"


def _coerce_or_none(x) -> MultiPoly | None:
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, Rational):
        return MultiPoly.const(x)
    return None


ZERO = MultiPoly._raw({})
ONE = MultiPoly._raw({(): 1})


def var(v: int) -> MultiPoly:
    return MultiPoly.var(v)


def x(i: int) -> MultiPoly:
    """The λ-slot variable ``x<i>`` as a polynomial."""
    return MultiPoly.var(slot(i))


D = MultiPoly.var(PARTIAL)
T = MultiPoly.var(DEFPARAM)
X0 = x(0)
X1 = x(1)
X2 = x(2)


# Functional aliases matching the operation names used throughout the package.
def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def substitute(p: MultiPoly, v: int, r: MultiPoly) -> MultiPoly:
    return p.substitute(v, r)


def expand_in_variable(p: MultiPoly, v: int) -> list[tuple[int, MultiPoly]]:
    return p.expand_in_variable(v)


def total_degree(p: MultiPoly) -> int:
    return p.total_degree()


def degree_in(p: MultiPoly, v: int) -> int:
    return p.degree_in(v)


def monomials_up_to(variables: Iterable[int], bound: int) -> list[Monomial]:
    """All monomials in ``variables`` of total degree <= bound, descending order."""
    variables = sorted(set(variables))
    out: list[Monomial] = []

    def rec(i: int, remaining: int, acc: list[int]) -> None:
        if i == len(variables):
            m = [0] * (variables[-1] + 1 if variables else 0)
            for v, e in zip(variables, acc):
                m[v] = e
            out.append(_strip(m))
            return
        for e in range(remaining + 1):
            acc.append(e)
            rec(i + 1, remaining - e, acc)
            acc.pop()

    rec(0, bound, [])
    return sorted(set(out), key=mono_key, reverse=True)


def monomial(m: Monomial) -> MultiPoly:
    return MultiPoly._raw({_strip(m): 1})
