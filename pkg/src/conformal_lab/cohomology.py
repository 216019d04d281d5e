"""Cochains with values in a module, the differentials d and d_s, and
degree-truncated cohomology dimensions.

An n-cochain is stored by its values on basis tuples: ``table[(i1,...,in)]`` is
a module vector whose coefficients are polynomials in ∂ and the slots
``x0 .. x(n-1)``.  Missing keys mean zero.  Values on other arguments follow
from conformal antilinearity (see :func:`evaluate`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .algebra import (
    ConformalModule,
    HomConformalAlgebra,
    Vec,
    act,
    alpha_power_adjoint,
    extend_bracket,
    is_zero_vec,
    vadd,
    vec_coords,
    vscale,
    vsub,
    vsubs,
    zero_vec,
)
from .errors import ModuleMismatch, RankError
from .linalg import EchelonBasis, nullspace, rank, span_intersection_dim
from .polyring import D, PARTIAL, ZERO, MultiPoly, monomial, monomials_up_to, slot, x


@dataclass(frozen=True, eq=False)
class Cochain:
    arity: int
    algebra: HomConformalAlgebra
    module: ConformalModule
    table: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.table.items():
            k = tuple(k)
            if len(k) != self.arity or any(not 0 <= i < self.algebra.rank for i in k):
                raise RankError(f"bad cochain index {k}")
            if len(v) != self.module.rank:
                raise RankError("cochain value has wrong length")
            if not is_zero_vec(v):
                clean[k] = tuple(v)
        object.__setattr__(self, "table", clean)

    def value(self, idx) -> Vec:
        return self.table.get(tuple(idx), zero_vec(self.module.rank))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.arity == other.arity and self.table == other.table

    def __hash__(self):
        return hash((self.arity, frozenset(self.table.items())))

    def is_zero(self) -> bool:
        return not self.table

    def _combine(self, other: "Cochain", sign: int) -> "Cochain":
        out = dict(self.table)
        for k, v in other.table.items():
            cur = out.get(k)
            w = vscale(sign, v) if sign != 1 else v
            out[k] = w if cur is None else vadd(cur, w)
        return Cochain(self.arity, self.algebra, self.module, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "Cochain":
        return Cochain(self.arity, self.algebra, self.module, {k: vscale(c, v) for k, v in self.table.items()})

    def coords(self) -> dict:
        out: dict = {}
        for k, v in self.table.items():
            out.update(vec_coords(v, (k,)))
        return out

    def max_degree(self) -> int:
        return max((p.total_degree() for v in self.table.values() for p in v), default=-1)

    def describe(self) -> dict:
        return {
            ",".join(self.algebra.names[i] for i in k) or "()": self.module.fmt(v)
            for k, v in sorted(self.table.items())
        }


def zero_cochain(A, M, n) -> Cochain:
    return Cochain(n, A, M, {})


def from_coords(A, M, n, coords: Mapping) -> Cochain:
    entries: dict = {}
    for (idx, comp, mono), c in coords.items():
        entries.setdefault(idx, {}).setdefault(comp, {})[mono] = c
    table = {}
    for idx, comps in entries.items():
        table[idx] = tuple(MultiPoly(comps.get(k, {})) for k in range(M.rank))
    return Cochain(n, A, M, table)


def evaluate(gamma: Cochain, args: Sequence[Vec], slots: Sequence | None = None) -> Vec:
    """γ at arbitrary arguments, with slot i set to ``slots[i]`` (default x_i).

    Each argument's ∂ is replaced by minus its slot (conformal antilinearity);
    slot variables already present in argument coefficients act as scalars.
    """
    n = gamma.arity
    if len(args) != n:
        raise RankError(f"{n}-cochain evaluated at {len(args)} arguments")
    if slots is None:
        slots = [x(i) for i in range(n)]
    slots = [MultiPoly.coerce(s) for s in slots]
    A, M = gamma.algebra, gamma.module
    for a in args:
        if len(a) != A.rank:
            raise RankError("argument length does not match algebra rank")
    shifted = [
        [p.subs({PARTIAL: -s}) if not p.is_zero() else ZERO for p in a] for a, s in zip(args, slots)
    ]
    rename = {slot(i): s for i, s in enumerate(slots)}
    acc = zero_vec(M.rank)
    for idx, val in gamma.table.items():
        coeff = None
        for m, k in enumerate(idx):
            c = shifted[m][k]
            if c.is_zero():
                coeff = ZERO
                break
            coeff = c if coeff is None else coeff * c
        if coeff is not None and coeff.is_zero():
            continue
        v = vsubs(val, rename)
        acc = vadd(acc, v if coeff is None else vscale(coeff, v))
    return acc


def _basis_args(A, idx):
    return [A.basis(i) for i in idx]


def _differential(gamma: Cochain, first_term) -> Cochain:
    A, M = gamma.algebra, gamma.module
    n = gamma.arity
    X = [x(i) for i in range(n + 1)]
    alpha_images = [A.apply_alpha(A.basis(i)) for i in range(A.rank)]
    table = {}
    for idx in product(range(A.rank), repeat=n + 1):
        total = zero_vec(M.rank)
        for i in range(n + 1):
            rest = [m for m in range(n + 1) if m != i]
            inner = evaluate(gamma, [A.basis(idx[m]) for m in rest], [X[m] for m in rest])
            if is_zero_vec(inner):
                continue
            term = first_term(idx[i], inner, X[i])
            total = vadd(total, term) if i % 2 == 0 else vsub(total, term)
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                br = extend_bracket(A, A.basis(idx[i]), A.basis(idx[j]), X[i])
                if is_zero_vec(br):
                    continue
                rest = [m for m in range(n + 1) if m not in (i, j)]
                args = [br] + [alpha_images[idx[m]] for m in rest]
                term = evaluate(gamma, args, [X[i] + X[j]] + [X[m] for m in rest])
                total = vadd(total, term) if (i + j) % 2 == 0 else vsub(total, term)
        table[idx] = total
    return Cochain(n + 1, A, M, table)


def differential(gamma: Cochain) -> Cochain:
    """The coboundary dγ, an (n+1)-cochain."""
    A, M = gamma.algebra, gamma.module
    n = gamma.arity

    def module_term(i, inner, lam):
        return act(M, A.apply_alpha(A.basis(i), n), inner, lam)

    return _differential(gamma, module_term)


def differential_s(gamma: Cochain, s: int) -> Cochain:
    """d_s on cochains with values in the α^s-adjoint module.

    The first sum is written with the bracket of R and α^{n+s}, not through the
    module action, so it is an independent route to the same operator.
    """
    A, M = gamma.algebra, gamma.module
    expected = alpha_power_adjoint(A, s)
    if M.rank != A.rank or M.act != expected.act or M.beta != expected.beta:
        raise ModuleMismatch(f"cochain module is not the alpha^{s}-adjoint module")
    n = gamma.arity

    def bracket_term(i, inner, lam):
        return extend_bracket(A, A.apply_alpha(A.basis(i), n + s), inner, lam)

    return _differential(gamma, bracket_term)


def partial_action(gamma: Cochain) -> Cochain:
    """(∂γ) = (∂_M + Σ λ_i) γ."""
    factor = D
    for i in range(gamma.arity):
        factor = factor + x(i)
    return Cochain(gamma.arity, gamma.algebra, gamma.module, {k: vscale(factor, v) for k, v in gamma.table.items()})


def _swap(idx, k):
    idx = list(idx)
    idx[k], idx[k + 1] = idx[k + 1], idx[k]
    return tuple(idx)


def skew_residual(gamma: Cochain) -> dict:
    """Coordinates of γ(.., a_{k+1}, a_k, ..) + swapped γ(.., a_k, a_{k+1}, ..)."""
    n = gamma.arity
    out: dict = {}
    for k in range(n - 1):
        ren = {slot(k): x(k + 1), slot(k + 1): x(k)}
        for idx, val in gamma.table.items():
            sw = vsubs(val, ren)
            for key, v in ((idx, sw), (_swap(idx, k), val)):
                for c in vec_coords(v, (key, k)).items():
                    out[c[0]] = out.get(c[0], 0) + c[1]
    return {k: v for k, v in out.items() if v}


def commutativity_residual(gamma: Cochain) -> dict:
    """Coordinates of β(γ(a)) - γ(α(a)) over all basis tuples a."""
    A, M, n = gamma.algebra, gamma.module, gamma.arity
    alpha_images = [A.apply_alpha(A.basis(i)) for i in range(A.rank)]
    out: dict = {}
    for idx in product(range(A.rank), repeat=n):
        lhs = M.apply_beta(gamma.value(idx))
        rhs = evaluate(gamma, [alpha_images[i] for i in idx])
        out.update(vec_coords(vsub(lhs, rhs), (idx,)))
    return out


def is_cochain(gamma: Cochain) -> bool:
    return not skew_residual(gamma) and not commutativity_residual(gamma)


def _cochain_unknowns(A, M, n, bound):
    monos = monomials_up_to([PARTIAL] + [slot(i) for i in range(n)], bound)
    return [
        (idx, comp, m)
        for idx in product(range(A.rank), repeat=n)
        for comp in range(M.rank)
        for m in monos
    ]


_BASIS_CACHE: dict = {}


def cochain_space_basis(A: HomConformalAlgebra, M: ConformalModule, n: int, degree_bound: int) -> list[Cochain]:
    """ℚ-basis of n-cochains whose entries have total degree ≤ degree_bound."""
    if degree_bound < 0:
        return []
    key = (id(A), id(M), n, degree_bound)
    hit = _BASIS_CACHE.get(key)
    if hit is not None and hit[0] is A and hit[1] is M:
        return list(hit[2])
    unknowns = _cochain_unknowns(A, M, n, degree_bound)
    columns = []
    for u in unknowns:
        g = from_coords(A, M, n, {u: 1})
        col = {("skew",) + k: v for k, v in skew_residual(g).items()}
        col.update({("comm",) + k: v for k, v in commutativity_residual(g).items()})
        columns.append(col)
    basis = []
    for sol in nullspace(columns):
        coords = {u: c for u, c in zip(unknowns, sol) if c}
        basis.append(from_coords(A, M, n, coords))
    _BASIS_CACHE[key] = (A, M, basis)
    return list(basis)


def random_cochain(A, M, n, degree_bound, rng: random.Random | int = 0) -> Cochain:
    """Integer combination (coordinates in [-3, 3]) of the truncated basis."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    total = zero_cochain(A, M, n)
    for b in cochain_space_basis(A, M, n, degree_bound):
        c = rng.randint(-3, 3)
        if c:
            total = total + b.scale(c)
    return total


@dataclass
class CohomologyDims:
    n: int
    degree_bound: int
    reduced: bool
    dim_cochains: int
    dim_kernel: int
    dim_image_from_below: int

    @property
    def dim_H(self) -> int:
        return self.dim_kernel - self.dim_image_from_below

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "degree_bound": self.degree_bound,
            "reduced": self.reduced,
            "truncation": f"cochain entries of total degree <= {self.degree_bound}",
            "reduced_convention": (
                "quotient of the truncated slice by the ∂-image of the slice one degree lower"
                if self.reduced else None
            ),
            "dim_cochains": self.dim_cochains,
            "dim_kernel": self.dim_kernel,
            "dim_image_from_below": self.dim_image_from_below,
            "dim_H": self.dim_H,
        }


def _degree_ok(bound):
    return lambda key: sum(key[-1]) <= bound


def _max_deg(cochains):
    return max((c.max_degree() for c in cochains), default=-1)


def cohomology_dims(A, M, n: int, degree_bound: int, reduced: bool = False) -> CohomologyDims:
    """Kernel, image and quotient dimensions on the degree-truncated slice."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    Cn = cochain_space_basis(A, M, n, degree_bound)
    dCn = [differential(g).coords() for g in Cn]
    if n > 0:
        below = [differential(g) for g in cochain_space_basis(A, M, n - 1, degree_bound)]
    else:
        below = []
    below_coords = [b.coords() for b in below]
    if not reduced:
        kernel = len(Cn) - rank(dCn)
        image = span_intersection_dim(below_coords, _degree_ok(degree_bound))
        return CohomologyDims(n, degree_bound, False, len(Cn), kernel, image)

    lower = len(cochain_space_basis(A, M, n, degree_bound - 1))
    dmax = _max_deg([differential(g) for g in Cn])
    partial_up = [partial_action(c).coords() for c in cochain_space_basis(A, M, n + 1, dmax - 1)]
    z_dim = len(Cn) - (rank(dCn + partial_up) - rank(partial_up))
    kernel = z_dim - lower
    xmax = max(_max_deg(below), degree_bound)
    partial_here = [partial_action(c).coords() for c in cochain_space_basis(A, M, n, xmax - 1)]
    image = span_intersection_dim(below_coords + partial_here, _degree_ok(degree_bound)) - lower
    return CohomologyDims(n, degree_bound, True, len(Cn) - lower, kernel, image)
