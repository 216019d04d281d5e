"""Conformal linear maps, α^k-derivations and their commutator structure."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

from .algebra import (
    HomConformalAlgebra,
    Vec,
    apply_matrix,
    extend_bracket,
    is_zero_vec,
    unit,
    vadd,
    vec_coords,
    vneg,
    vscale,
    vsub,
    vsubs,
    zero_vec,
)
from .errors import NotAlphaFixed, RankError
from .linalg import nullspace
from .polyring import D, ONE, PARTIAL, ZERO, MultiPoly, is_slot, monomials_up_to, slot, slot_index, x

SLOT0 = slot(0)


class ExtensionRule(Enum):
    CONFORMAL_LINEAR = "linear"
    COCHAIN_ANTILINEAR = "antilinear"


@dataclass(frozen=True)
class ConformalMap:
    """Map given by basis images ``images[i] = D_{slot}(e_i)``.

    Polynomials may contain slot variables other than ``slot``; those are
    parameters (for instance the outer variable of a commutator).
    """

    images: tuple
    slot: int = SLOT0
    level: int = 0
    rule: ExtensionRule = ExtensionRule.CONFORMAL_LINEAR

    @property
    def rank(self) -> int:
        return len(self.images)

    def apply(self, v: Vec, lam) -> Vec:
        """D_lam(v): conformal linear (∂ ↦ ∂+λ) or antilinear (∂ ↦ -λ)."""
        if len(v) != self.rank:
            raise RankError("element length does not match map rank")
        lam = MultiPoly.coerce(lam)
        inner = {PARTIAL: D + lam} if self.rule is ExtensionRule.CONFORMAL_LINEAR else {PARTIAL: -lam}
        at = {self.slot: lam}
        acc = zero_vec(self.rank)
        for p, img in zip(v, self.images):
            if p.is_zero():
                continue
            acc = vadd(acc, vscale(p.subs(inner), vsubs(img, at)))
        return acc

    def is_zero(self) -> bool:
        return all(is_zero_vec(v) for v in self.images)

    def __add__(self, other: "ConformalMap") -> "ConformalMap":
        return replace(self, images=tuple(vadd(a, b) for a, b in zip(self.images, other.images)))

    def __sub__(self, other: "ConformalMap") -> "ConformalMap":
        return replace(self, images=tuple(vsub(a, b) for a, b in zip(self.images, other.images)))

    def scale(self, c) -> "ConformalMap":
        return replace(self, images=tuple(vscale(c, v) for v in self.images))

    def with_level(self, level: int) -> "ConformalMap":
        return replace(self, level=level)

    def used_slots(self) -> set:
        vs = {self.slot}
        for v in self.images:
            for p in v:
                vs |= {w for w in p.variables() if is_slot(w)}
        return vs

    def coords(self) -> dict:
        out: dict = {}
        for i, v in enumerate(self.images):
            out.update(vec_coords(v, (i,)))
        return out

    def describe(self, names: Sequence[str] | None = None) -> dict:
        from .algebra import vec_str

        names = names or [f"e{i + 1}" for i in range(self.rank)]
        return {names[i]: vec_str(v, names) for i, v in enumerate(self.images) if not is_zero_vec(v)}


def zero_map(rank: int, level: int = 0) -> ConformalMap:
    return ConformalMap(tuple(zero_vec(rank) for _ in range(rank)), level=level)


def identity_map(rank: int, level: int = 0) -> ConformalMap:
    return ConformalMap(tuple(unit(rank, i) for i in range(rank)), level=level)


def apply(D_: ConformalMap, v: Vec, lam) -> Vec:
    return D_.apply(v, lam)


def fresh_slot(*maps: ConformalMap) -> int:
    used = set()
    for m in maps:
        used |= m.used_slots()
    return slot(max((slot_index(v) for v in used), default=-1) + 1)


def partial_of(D_: ConformalMap) -> ConformalMap:
    """(∂D)_λ = -λ D_λ."""
    lam = MultiPoly.var(D_.slot)
    return replace(D_, images=tuple(vscale(-lam, v) for v in D_.images))


def alpha_shift(A: HomConformalAlgebra, D_: ConformalMap) -> ConformalMap:
    """α'(D) = D ∘ α, one level higher."""
    lam = MultiPoly.var(D_.slot)
    imgs = tuple(D_.apply(A.apply_alpha(A.basis(i)), lam) for i in range(A.rank))
    return replace(D_, images=imgs, level=D_.level + 1)


def compose_alpha_left(A: HomConformalAlgebra, D_: ConformalMap) -> ConformalMap:
    return replace(D_, images=tuple(A.apply_alpha(v) for v in D_.images))


# ---------------------------------------------------------------------------
# identities


def alpha_commutation_residuals(A: HomConformalAlgebra, D_: ConformalMap):
    lam = MultiPoly.var(D_.slot)
    for i in range(A.rank):
        yield (i,), vsub(A.apply_alpha(D_.images[i]), D_.apply(A.apply_alpha(A.basis(i)), lam))


def derivation_residuals(A: HomConformalAlgebra, D_: ConformalMap, k: int):
    """D_λ([a μ b]) - [D_λ(a) λ+μ α^k b] - [α^k a μ D_λ(b)] on basis pairs."""
    lam = MultiPoly.var(D_.slot)
    mu = MultiPoly.var(fresh_slot(D_))
    for i in range(A.rank):
        ei, ai = A.basis(i), A.apply_alpha(A.basis(i), k)
        di = D_.apply(ei, lam)
        for j in range(A.rank):
            ej, aj = A.basis(j), A.apply_alpha(A.basis(j), k)
            lhs = D_.apply(extend_bracket(A, ei, ej, mu), lam)
            r1 = extend_bracket(A, di, aj, lam + mu)
            r2 = extend_bracket(A, ai, D_.apply(ej, lam), mu)
            yield (i, j), vsub(lhs, vadd(r1, r2))


def _all_zero(gen) -> bool:
    return all(is_zero_vec(v) for _, v in gen)


def commutes_with_alpha(A: HomConformalAlgebra, D_: ConformalMap) -> bool:
    return _all_zero(alpha_commutation_residuals(A, D_))


def is_alpha_k_derivation(A: HomConformalAlgebra, D_: ConformalMap, k: int) -> bool:
    if D_.rank != A.rank:
        raise RankError("map rank differs from algebra rank")
    return commutes_with_alpha(A, D_) and _all_zero(derivation_residuals(A, D_, k))


def first_failure(gen):
    for where, v in gen:
        if not is_zero_vec(v):
            return where, v
    return None


def inner_derivation(A: HomConformalAlgebra, a: Vec, k: int) -> ConformalMap:
    """D_λ(b) = [a λ α^k(b)]; requires α(a) = a; an α^{k+1}-derivation."""
    if A.apply_alpha(a) != tuple(a):
        raise NotAlphaFixed(f"alpha({A.fmt(a)}) != {A.fmt(a)}")
    imgs = tuple(extend_bracket(A, a, A.apply_alpha(A.basis(j), k), x(0)) for j in range(A.rank))
    return ConformalMap(imgs, level=k + 1)


# ---------------------------------------------------------------------------
# commutator


def commutator_images(D_: ConformalMap, E: ConformalMap, lam, nu) -> tuple:
    """[D_λ E]_ν(e_i) = D_λ(E_{ν-λ} e_i) - E_{ν-λ}(D_λ e_i) for polynomials lam, nu."""
    lam = MultiPoly.coerce(lam)
    nu = MultiPoly.coerce(nu)
    out = []
    n = D_.rank
    for i in range(n):
        ei = unit(n, i)
        first = D_.apply(E.apply(ei, nu - lam), lam)
        second = E.apply(D_.apply(ei, lam), nu - lam)
        out.append(vsub(first, second))
    return tuple(out)


def commutator(D_: ConformalMap, E: ConformalMap) -> ConformalMap:
    """Two-slot map: λ = x0 is the outer slot, μ = x1 the evaluation slot.

    Both inputs must use slot x0; the result has level D.level + E.level.
    """
    if D_.rank != E.rank:
        raise RankError("maps have different ranks")
    if D_.slot != SLOT0 or E.slot != SLOT0:
        raise ValueError("commutator expects maps written in slot x0")
    imgs = commutator_images(D_, E, x(0), x(1))
    return ConformalMap(imgs, slot=slot(1), level=D_.level + E.level)


def _generic_commutator(D_: ConformalMap, E: ConformalMap, lam, eval_slot: int) -> ConformalMap:
    imgs = commutator_images(D_, E, lam, MultiPoly.var(eval_slot))
    return ConformalMap(imgs, slot=eval_slot, level=D_.level + E.level)


def commutator_jacobi_residual(A: HomConformalAlgebra, Dm: ConformalMap, Em: ConformalMap, Fm: ConformalMap) -> tuple:
    """[α'D_λ [E_μ F]] - [α'E_μ [D_λ F]] - [[D_λ E]_{λ+μ} α'F], evaluated at ν on the basis."""
    lam, mu, theta, nu = (x(i) for i in (4, 5, 6, 7))
    aD, aE, aF = (alpha_shift(A, m) for m in (Dm, Em, Fm))
    EF = _generic_commutator(Em, Fm, mu, slot(6))
    DF = _generic_commutator(Dm, Fm, lam, slot(6))
    DE = _generic_commutator(Dm, Em, lam, slot(6))
    lhs = commutator_images(aD, EF, lam, nu)
    r1 = commutator_images(aE, DF, mu, nu)
    r2 = commutator_images(DE, aF, lam + mu, nu)
    return tuple(vsub(a, vadd(b, c)) for a, b, c in zip(lhs, r1, r2))


def commutator_skew_residual(D_: ConformalMap, E: ConformalMap) -> tuple:
    """[D_λ E]_ν + [E_{ν-λ} D]_ν; ν - λ is -∂-λ under (∂φ)_ν = -ν φ_ν."""
    lam, nu = x(4), x(5)
    a = commutator_images(D_, E, lam, nu)
    b = commutator_images(E, D_, nu - lam, nu)
    return tuple(vadd(p, q) for p, q in zip(a, b))


# ---------------------------------------------------------------------------
# solvers


def map_unknowns(rank: int, degree_bound: int, map_slot: int = SLOT0):
    monos = monomials_up_to([PARTIAL, map_slot], degree_bound)
    return [(i, comp, m) for i in range(rank) for comp in range(rank) for m in monos]


def map_from_coords(rank: int, coords: dict, level: int = 0, map_slot: int = SLOT0) -> ConformalMap:
    entries = [[{} for _ in range(rank)] for _ in range(rank)]
    for (i, comp, m), c in coords.items():
        entries[i][comp][m] = c
    imgs = tuple(tuple(MultiPoly(e) for e in row) for row in entries)
    return ConformalMap(imgs, slot=map_slot, level=level)


def solve_maps(
    A: HomConformalAlgebra,
    n_maps: int,
    residual: Callable[[Sequence[ConformalMap]], dict],
    degree_bound: int,
    level: int = 0,
) -> list[tuple[ConformalMap, ...]]:
    """Null space of a residual that is linear in a tuple of maps.

    ``residual(maps)`` returns coordinates (any hashable keys).  Unknowns are
    the coefficients of each map's entries up to total degree ``degree_bound``
    in ∂ and x0.  Returns a basis of solution tuples.
    """
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    unknowns = [(w,) + u for w in range(n_maps) for u in map_unknowns(A.rank, degree_bound)]
    zero = zero_map(A.rank, level)
    columns = []
    for w, i, comp, m in unknowns:
        maps = [zero] * n_maps
        maps[w] = map_from_coords(A.rank, {(i, comp, m): 1}, level)
        columns.append(residual(maps))
    out = []
    for sol in nullspace(columns):
        per = [{} for _ in range(n_maps)]
        for (w, i, comp, m), c in zip(unknowns, sol):
            if c:
                per[w][(i, comp, m)] = c
        out.append(tuple(map_from_coords(A.rank, p, level) for p in per))
    return out


def residual_coords(gen, tag) -> dict:
    out: dict = {}
    for where, v in gen:
        out.update(vec_coords(v, (tag,) + tuple(where)))
    return out


def omega_residual(A, D_) -> dict:
    return residual_coords(alpha_commutation_residuals(A, D_), ("omega", id(D_)))


def solve_derivations(A: HomConformalAlgebra, k: int, degree_bound: int) -> list[ConformalMap]:
    """ℚ-basis of α^k-derivations with entries of total degree ≤ bound in ∂, x0."""

    def residual(maps):
        (Dm,) = maps
        out = residual_coords(alpha_commutation_residuals(A, Dm), "omega")
        out.update(residual_coords(derivation_residuals(A, Dm, k), "der"))
        return out

    return [sol[0] for sol in solve_maps(A, 1, residual, degree_bound, level=k)]


def in_span(target: ConformalMap, basis: Sequence[ConformalMap]) -> bool:
    from .linalg import EchelonBasis

    eb = EchelonBasis()
    for b in basis:
        eb.add(b.coords())
    return eb.contains(target.coords())


# ---------------------------------------------------------------------------
# extension by a derivation


def derivation_extension(A: HomConformalAlgebra, D_: ConformalMap) -> HomConformalAlgebra:
    """R ⊕ ℚ[∂]E with [E λ a] = D_λ(a), [a λ E] = -D_{-λ-∂}(a), [E λ E] = 0, α(E) = E."""
    if D_.rank != A.rank:
        raise RankError("map rank differs from algebra rank")
    r = A.rank
    n = r + 1
    lam = x(0)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < r and j < r:
                row.append(tuple(A.table[i][j]) + (ZERO,))
            elif i == r and j < r:
                row.append(D_.apply(A.basis(j), lam) + (ZERO,))
            elif i < r and j == r:
                row.append(vneg(D_.apply(A.basis(i), -lam - D)) + (ZERO,))
            else:
                row.append(zero_vec(n))
        rows.append(tuple(row))
    alpha = tuple(tuple(A.alpha[i]) + (ZERO,) for i in range(r)) + (unit(n, r),)
    return HomConformalAlgebra(n, tuple(rows), alpha, tuple(A.names) + ("E",), name=f"{A.name}+E")


def self_commutator_vanishes(D_: ConformalMap) -> bool:
    """D_λ D_μ = D_μ D_λ on every basis element."""
    lam, mu = x(4), x(5)
    n = D_.rank
    for i in range(n):
        ei = unit(n, i)
        if D_.apply(D_.apply(ei, mu), lam) != D_.apply(D_.apply(ei, lam), mu):
            return False
    return True
