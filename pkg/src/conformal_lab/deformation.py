"""Hom-Nijenhuis operators and the t-deformations they generate.

An endomorphism cochain ``f`` is a 1-cochain with values in the α^{-1}-adjoint
module.  ``f_λ(a)`` is its value with slot λ; ``f_{-∂}(a)`` substitutes -∂ for
the slot, where ∂ is the derivation acting on the output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Sequence

from .algebra import (
    CheckReport,
    HomConformalAlgebra,
    Vec,
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
from .cohomology import Cochain, cochain_space_basis, differential_s, evaluate, is_cochain
from .errors import NonInvertibleAlpha
from .polyring import D, DEFPARAM, T, MultiPoly, X0, X1, slot, x

SLOT0, SLOT1, SLOT2 = slot(0), slot(1), slot(2)


def endo_cochain(A: HomConformalAlgebra, images: Sequence[Vec]) -> Cochain:
    """1-cochain over R_{-1} with f_{x0}(e_i) = images[i]."""
    M = alpha_power_adjoint(A, -1)
    return Cochain(1, A, M, {(i,): tuple(v) for i, v in enumerate(images)})


def _as_endo(A: HomConformalAlgebra, f) -> Cochain:
    if isinstance(f, Cochain):
        return f
    return endo_cochain(A, f)


def f_at(f: Cochain, a: Vec, lam) -> Vec:
    return evaluate(f, [a], [lam])


def f_minus_partial(f: Cochain, a: Vec) -> Vec:
    return evaluate(f, [a], [-D])


def nijenhuis_bracket(A: HomConformalAlgebra, f, i: int, j: int) -> Vec:
    """[e_i λ e_j]_N = [f_λ(e_i) λ e_j] + [e_i λ f_{-∂}(e_j)] - f_{-∂}([e_i λ e_j]), λ = x0."""
    f = _as_endo(A, f)
    ei, ej = A.basis(i), A.basis(j)
    t1 = extend_bracket(A, f_at(f, ei, X0), ej, X0)
    t2 = extend_bracket(A, ei, f_minus_partial(f, ej), X0)
    t3 = f_minus_partial(f, A.table[i][j])
    return vsub(vadd(t1, t2), t3)


def nijenhuis_residuals(A: HomConformalAlgebra, f) -> dict:
    """(i, j) -> LHS - RHS of the two-slot Nijenhuis identity (λ = x0, μ = x1)."""
    f = _as_endo(A, f)
    out = {}
    for i in range(A.rank):
        fi = f_at(f, A.basis(i), X0)
        for j in range(A.rank):
            lhs = extend_bracket(A, fi, f_at(f, A.basis(j), X1), X0)
            rhs = f_at(f, nijenhuis_bracket(A, f, i, j), X0 + X1)
            out[(i, j)] = vsub(lhs, rhs)
    return out


def specialized_nijenhuis_residuals(A: HomConformalAlgebra, f) -> dict:
    """The identity with μ = -∂-λ: [f_λ(a) λ f_{-∂}(b)] - f_{-∂}([a λ b]_N)."""
    f = _as_endo(A, f)
    out = {}
    for i in range(A.rank):
        fi = f_at(f, A.basis(i), X0)
        for j in range(A.rank):
            lhs = extend_bracket(A, fi, f_minus_partial(f, A.basis(j)), X0)
            out[(i, j)] = vsub(lhs, f_minus_partial(f, nijenhuis_bracket(A, f, i, j)))
    return out


def is_nijenhuis(A: HomConformalAlgebra, f) -> bool:
    full = all(is_zero_vec(r) for r in nijenhuis_residuals(A, f).values())
    if full:
        # the μ = -∂-λ specialisation must then hold as well
        assert all(is_zero_vec(r) for r in specialized_nijenhuis_residuals(A, f).values())
    return full


def _require_regular(A: HomConformalAlgebra) -> None:
    from .algebra import is_regular

    if not is_regular(A):
        raise NonInvertibleAlpha("deformations through R_{-1} need a regular algebra")


@dataclass
class EndoCoboundary:
    psi: Cochain
    matches_nijenhuis_bracket: bool


def d_minus1_of_endo(A: HomConformalAlgebra, f) -> EndoCoboundary:
    """ψ = d_{-1} f, together with the check ψ_{λ,-∂-λ} = [·_λ·]_N."""
    _require_regular(A)
    f = _as_endo(A, f)
    psi = differential_s(f, -1)
    table = psi_table(psi)
    match = all(
        table[i][j] == nijenhuis_bracket(A, f, i, j) for i in range(A.rank) for j in range(A.rank)
    )
    return EndoCoboundary(psi, match)


def psi_table(psi: Cochain) -> tuple:
    """ψ_{λ,-∂-λ}(e_i, e_j) with λ = x0."""
    r = psi.algebra.rank
    return tuple(
        tuple(vsubs(psi.value((i, j)), {SLOT1: -D - X0}) for j in range(r)) for i in range(r)
    )


def deform(A: HomConformalAlgebra, psi: Cochain) -> HomConformalAlgebra:
    """Bracket [a λ b] + t ψ_{λ,-∂-λ}(a, b); t is the polynomial variable ``t``."""
    pt = psi_table(psi)
    r = A.rank
    table = tuple(
        tuple(vadd(A.table[i][j], vscale(T, pt[i][j])) for j in range(r)) for i in range(r)
    )
    return HomConformalAlgebra(r, table, A.alpha, A.names, name=f"{A.name}_t")


def split_t(v: Vec, top: int = 2) -> list[Vec]:
    """Coefficients of t^0..t^top of a vector."""
    out = [[] for _ in range(top + 1)]
    for p in v:
        coeffs = dict(p.expand_in_variable(DEFPARAM))
        for k in range(top + 1):
            out[k].append(coeffs.get(k, MultiPoly()))
        if any(k > top for k in coeffs):
            raise ValueError("t-degree exceeds expected bound")
    return [tuple(c) for c in out]


def _psi_hat(psi: Cochain, a: Vec, b: Vec, lam) -> Vec:
    lam = MultiPoly.coerce(lam)
    return evaluate(psi, [a, b], [lam, -D - lam])


def first_order_defect(A: HomConformalAlgebra, psi: Cochain, i: int, j: int, k: int) -> Vec:
    """Linear-in-ψ part of the deformed Hom-Jacobi identity, evaluated directly."""
    a, b, c = A.basis(i), A.basis(j), A.basis(k)
    aa, ab, ac = (A.apply_alpha(v) for v in (a, b, c))
    lam, mu = X0, X1
    lhs = vadd(
        extend_bracket(A, aa, _psi_hat(psi, b, c, mu), lam),
        _psi_hat(psi, aa, extend_bracket(A, b, c, mu), lam),
    )
    lhs = vsub(lhs, _psi_hat(psi, extend_bracket(A, a, b, lam), ac, lam + mu))
    rhs = vadd(
        extend_bracket(A, ab, _psi_hat(psi, a, c, lam), mu),
        _psi_hat(psi, ab, extend_bracket(A, a, c, lam), mu),
    )
    rhs = vadd(rhs, extend_bracket(A, _psi_hat(psi, a, b, lam), ac, lam + mu))
    return vsub(lhs, rhs)


def quadratic_defect(A: HomConformalAlgebra, psi: Cochain, i: int, j: int, k: int) -> Vec:
    a, b, c = A.basis(i), A.basis(j), A.basis(k)
    aa, ab, ac = (A.apply_alpha(v) for v in (a, b, c))
    lam, mu = X0, X1
    lhs = _psi_hat(psi, aa, _psi_hat(psi, b, c, mu), lam)
    rhs = vadd(
        _psi_hat(psi, ab, _psi_hat(psi, a, c, lam), mu),
        _psi_hat(psi, _psi_hat(psi, a, b, lam), ac, lam + mu),
    )
    return vsub(lhs, rhs)


def cocycle_specialization(dpsi: Cochain, i: int, j: int, k: int) -> Vec:
    """(d_{-1}ψ)_{λ,μ,-∂-λ-μ}(e_i, e_j, e_k)."""
    return vsubs(dpsi.value((i, j, k)), {SLOT2: -D - X0 - X1})


def deformed_jacobi_by_t(A: HomConformalAlgebra, psi: Cochain) -> dict:
    """(i, j, k) -> [t^0, t^1, t^2] parts of the deformed Hom-Jacobi residual."""
    from .algebra import jacobi_residual

    At = deform(A, psi)
    r = A.rank
    return {
        (i, j, k): split_t(jacobi_residual(At, i, j, k))
        for i in range(r) for j in range(r) for k in range(r)
    }


def check_deformation(A: HomConformalAlgebra, psi: Cochain) -> CheckReport:
    """cocycle, quadratic and Hom-Jacobi per power of t.

    Also records whether the t^1 residual equals the first-order defect and the
    specialised coboundary, and whether the t^2 residual equals the quadratic
    defect.
    """
    _require_regular(A)
    rep = CheckReport()
    fmt = A.fmt
    dpsi = differential_s(psi, -1)
    cocycle_at = next(((k, v) for k, v in sorted(dpsi.table.items())), None)
    rep.record("cocycle", cocycle_at is None, cocycle_at and cocycle_at[0],
               cocycle_at and fmt(cocycle_at[1]))

    by_t = deformed_jacobi_by_t(A, psi)
    quad_fail = None
    t_fail = [None, None, None]
    t1_matches_r9 = True
    t1_matches_cocycle = True
    t2_matches_r10 = True
    for key, parts in by_t.items():
        r9 = first_order_defect(A, psi, *key)
        r10 = quadratic_defect(A, psi, *key)
        if quad_fail is None and not is_zero_vec(r10):
            quad_fail = (key, r10)
        for deg in range(3):
            if t_fail[deg] is None and not is_zero_vec(parts[deg]):
                t_fail[deg] = (key, parts[deg])
        t1_matches_r9 &= parts[1] == r9
        t1_matches_cocycle &= parts[1] == cocycle_specialization(dpsi, *key)
        t2_matches_r10 &= parts[2] == r10
    rep.record("quadratic", quad_fail is None, quad_fail and quad_fail[0], quad_fail and fmt(quad_fail[1]))
    ok = all(f is None for f in t_fail)
    first = next((f for f in t_fail if f is not None), None)
    rep.record("jacobi_per_t", ok, first and first[0], first and fmt(first[1]))
    for deg in range(3):
        f = t_fail[deg]
        rep.record(f"jacobi_t{deg}", f is None, f and f[0], f and fmt(f[1]))
    rep.record("t1_equals_first_order_defect", t1_matches_r9)
    rep.record("t1_equals_specialized_coboundary", t1_matches_cocycle)
    rep.record("t2_equals_quadratic_defect", t2_matches_r10)
    return rep


def triviality_sides(A: HomConformalAlgebra, f) -> dict:
    """(i, j) -> (LHS parts, RHS parts) of T_{-∂}([a λ b]_t) = [T_λ a λ T_{-∂} b] by t-degree."""
    f = _as_endo(A, f)
    psi = d_minus1_of_endo(A, f).psi
    At = deform(A, psi)
    out = {}
    for i in range(A.rank):
        ei = A.basis(i)
        left_arg = vadd(ei, vscale(T, f_at(f, ei, X0)))
        for j in range(A.rank):
            ej = A.basis(j)
            y = At.table[i][j]
            lhs = vadd(y, vscale(T, f_minus_partial(f, y)))
            right_arg = vadd(ej, vscale(T, f_minus_partial(f, ej)))
            rhs = extend_bracket(A, left_arg, right_arg, X0)
            out[(i, j)] = (split_t(lhs), split_t(rhs))
    return out


def is_trivial_deformation(A: HomConformalAlgebra, f) -> bool:
    return all(l == r for l, r in triviality_sides(A, f).values())


# ---------------------------------------------------------------------------
# search for nonzero Nijenhuis operators


def _residual_coords(A, f) -> dict:
    out: dict = {}
    for key, v in nijenhuis_residuals(A, f).items():
        out.update(vec_coords(v, key))
    return out


def _rational_roots(a, b, c) -> list[Fraction]:
    """Rational roots of a + b s + c s^2 (c, b not both zero)."""
    if c == 0:
        return [Fraction(-a) / b] if b != 0 else []
    disc = Fraction(b) ** 2 - 4 * Fraction(a) * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return []
    root = Fraction(rn, rd)
    return sorted({(-b + root) / (2 * c), (-b - root) / (2 * c)})


def find_nijenhuis(A: HomConformalAlgebra, degree_bound: int = 2, seed: int = 0, samples: int = 6) -> list[Cochain]:
    """Nonzero Nijenhuis operators found on lines through the truncated f-space.

    Candidates: every basis cochain, then the pencils u + s v for pairs drawn
    from the basis and a seeded sample of integer combinations.  The condition
    is homogeneous quadratic, so along a pencil each residual coordinate is a
    quadratic in s; rational roots of the first nonvanishing one are verified
    exactly.  The search is not exhaustive.
    """
    M = alpha_power_adjoint(A, -1)
    basis = cochain_space_basis(A, M, 1, degree_bound)
    rng = random.Random(seed)
    pool = list(basis)
    for _ in range(samples):
        g = Cochain(1, A, M, {})
        for b in basis:
            c = rng.randint(-3, 3)
            if c:
                g = g + b.scale(c)
        if not g.is_zero():
            pool.append(g)
    found: list[Cochain] = []
    seen = set()

    def keep(g: Cochain) -> None:
        if g.is_zero() or g in seen:
            return
        if is_nijenhuis(A, g):
            seen.add(g)
            found.append(g)

    res = {}
    for g in pool:
        res[id(g)] = _residual_coords(A, g)
        if not res[id(g)]:
            keep(g)
    for u, v in combinations(pool, 2):
        q0, q2 = res[id(u)], res[id(v)]
        q_sum = _residual_coords(A, u + v)
        keys = set(q0) | set(q2) | set(q_sum)
        candidates = [Fraction(1)]  # whole pencil Nijenhuis unless some coordinate constrains s
        for key in sorted(keys, key=repr):
            a = q0.get(key, 0)
            c = q2.get(key, 0)
            b = q_sum.get(key, 0) - a - c
            if a == 0 and b == 0 and c == 0:
                continue
            candidates = _rational_roots(a, b, c)
            break
        for s in candidates:
            if s != 0:
                keep(u + v.scale(s))
    return found


def is_alpha_compatible(f: Cochain) -> bool:
    return is_cochain(f)
