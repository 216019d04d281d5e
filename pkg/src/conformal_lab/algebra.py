"""Finite-rank Hom-Lie conformal algebras and their modules.

An element of a free ℚ[∂]-module of rank r is a tuple of r polynomials (the
coefficients on the basis).  Coefficients may also contain λ-slot variables;
those are treated as scalars by every operation here.

Structure constants ``table[i][j]`` give ``[e_i λ e_j]`` with λ written as the
slot ``x0``.  The twisting map is stored by images: ``alpha[i]`` is the
coefficient vector of ``α(e_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

from .errors import ModuleMismatch, NonInvertibleAlpha, RankError
from .linalg import nullspace
from .polyring import D, ONE, PARTIAL, ZERO, MultiPoly, X0, X1, monomial, slot

Vec = tuple  # tuple[MultiPoly, ...]
Matrix = tuple  # tuple[Vec, ...], row i = image of basis vector i

SLOT0 = slot(0)


# ---------------------------------------------------------------------------
# vector helpers


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def unit(n: int, i: int, coeff: MultiPoly = ONE) -> Vec:
    return tuple(coeff if k == i else ZERO for k in range(n))


def vadd(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def vneg(x: Vec) -> Vec:
    return tuple(-a for a in x)


def vscale(c, x: Vec) -> Vec:
    c = MultiPoly.coerce(c)
    return tuple(c * a for a in x)


def vsubs(x: Vec, mapping) -> Vec:
    return tuple(a.subs(mapping) for a in x)


def vsum(vectors: Iterable[Vec], n: int) -> Vec:
    acc = [ZERO] * n
    for v in vectors:
        for k, a in enumerate(v):
            if a:
                acc[k] = acc[k] + a
    return tuple(acc)


def is_zero_vec(x: Vec) -> bool:
    return all(a.is_zero() for a in x)


def vec_str(x: Vec, names: Sequence[str]) -> str:
    parts = []
    for a, name in zip(x, names):
        if a.is_zero():
            continue
        s = str(a)
        parts.append(f"({s})*{name}" if len(a) > 1 else (name if s == "1" else f"{s}*{name}"))
    return " + ".join(parts) if parts else "0"


def apply_matrix(mat: Matrix, x: Vec) -> Vec:
    """x ↦ Σ x_i · mat[i] (the ℚ[∂]-linear map with the given basis images)."""
    n = len(mat[0]) if mat else 0
    return vsum((vscale(xi, row) for xi, row in zip(x, mat) if not xi.is_zero()), n)


def compose(outer: Matrix, inner: Matrix) -> Matrix:
    """Matrix of ``outer ∘ inner``."""
    return tuple(apply_matrix(outer, row) for row in inner)


def identity_matrix(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def determinant(mat: Matrix) -> MultiPoly:
    n = len(mat)
    if n == 0:
        return ONE

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> MultiPoly:
        if row == n:
            return ONE
        acc = ZERO
        for pos, c in enumerate(sorted(cols)):
            entry = mat[row][c]
            if entry.is_zero():
                continue
            term = entry * minor(row + 1, cols - {c})
            acc = acc - term if pos % 2 else acc + term
        return acc

    return minor(0, frozenset(range(n)))


def inverse_matrix(mat: Matrix) -> Matrix:
    """Inverse over ℚ[∂]; requires a nonzero constant determinant."""
    n = len(mat)
    det = determinant(mat)
    if not det.is_constant() or det.is_zero():
        raise NonInvertibleAlpha(f"determinant {det} is not a nonzero constant")
    inv_det = Fraction(1) / Fraction(det.constant_term())

    def cofactor(i: int, j: int) -> MultiPoly:
        sub = tuple(
            tuple(mat[r][c] for c in range(n) if c != j) for r in range(n) if r != i
        )
        m = determinant(sub)
        return -m if (i + j) % 2 else m

    return tuple(tuple(cofactor(j, i) * inv_det for j in range(n)) for i in range(n))


def matrix_power(mat: Matrix, s: int) -> Matrix:
    n = len(mat)
    if s < 0:
        return matrix_power(inverse_matrix(mat), -s)
    result = identity_matrix(n)
    for _ in range(s):
        result = compose(mat, result)
    return result


# ---------------------------------------------------------------------------
# algebras and modules


@dataclass(frozen=True)
class HomConformalAlgebra:
    """Free ℚ[∂]-module with a λ-bracket table and twisting map α."""

    rank: int
    table: tuple  # table[i][j]: Vec of length rank, polynomials in d, x0
    alpha: Matrix
    names: tuple = ()
    name: str = ""
    _powers: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        r = self.rank
        if len(self.table) != r or any(len(row) != r for row in self.table):
            raise RankError(f"bracket table is not {r}x{r}")
        for row in self.table:
            for entry in row:
                if len(entry) != r:
                    raise RankError(f"bracket value has length {len(entry)}, expected {r}")
        if len(self.alpha) != r or any(len(row) != r for row in self.alpha):
            raise RankError(f"alpha is not {r}x{r}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{i + 1}" for i in range(r)))
        elif len(self.names) != r:
            raise RankError("number of basis names differs from rank")

    def basis(self, i: int, coeff: MultiPoly = ONE) -> Vec:
        if not 0 <= i < self.rank:
            raise RankError(f"basis index {i} out of range for rank {self.rank}")
        return unit(self.rank, i, coeff)

    def alpha_power(self, s: int) -> Matrix:
        m = self._powers.get(s)
        if m is None:
            m = matrix_power(self.alpha, s)
            self._powers[s] = m
        return m

    def apply_alpha(self, x: Vec, s: int = 1) -> Vec:
        return apply_matrix(self.alpha_power(s), x)

    def fmt(self, x: Vec) -> str:
        return vec_str(x, self.names)


@dataclass(frozen=True)
class ConformalModule:
    """Free ℚ[∂]-module of rank m with ``act[i][j] = e_i λ f_j`` and map β."""

    rank: int
    algebra_rank: int
    act: tuple
    beta: Matrix
    names: tuple = ()
    name: str = ""

    def __post_init__(self):
        r, m = self.algebra_rank, self.rank
        if len(self.act) != r or any(len(row) != m for row in self.act):
            raise RankError(f"action table is not {r}x{m}")
        for row in self.act:
            for entry in row:
                if len(entry) != m:
                    raise RankError(f"action value has length {len(entry)}, expected {m}")
        if len(self.beta) != m or any(len(row) != m for row in self.beta):
            raise RankError(f"beta is not {m}x{m}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"v{i + 1}" for i in range(m)))

    def basis(self, j: int, coeff: MultiPoly = ONE) -> Vec:
        if not 0 <= j < self.rank:
            raise RankError(f"module basis index {j} out of range for rank {self.rank}")
        return unit(self.rank, j, coeff)

    def apply_beta(self, v: Vec) -> Vec:
        return apply_matrix(self.beta, v)

    def fmt(self, v: Vec) -> str:
        return vec_str(v, self.names)


def _pair(table, out_rank: int, x: Vec, y: Vec, lam: MultiPoly) -> Vec:
    lam = MultiPoly.coerce(lam)
    shift = {PARTIAL: -lam}
    forward = {PARTIAL: D + lam}
    at_lam = {SLOT0: lam}
    acc = [ZERO] * out_rank
    ys = [(j, q.subs(forward)) for j, q in enumerate(y) if not q.is_zero()]
    if not ys:
        return tuple(acc)
    for i, p in enumerate(x):
        if p.is_zero():
            continue
        p = p.subs(shift)
        row = table[i]
        for j, q in ys:
            c = row[j]
            pq = None
            for k, ck in enumerate(c):
                if ck.is_zero():
                    continue
                if pq is None:
                    pq = p * q
                acc[k] = acc[k] + pq * ck.subs(at_lam)
    return tuple(acc)


def extend_bracket(A: HomConformalAlgebra, x: Vec, y: Vec, lam) -> Vec:
    """[x_λ y] for arbitrary x, y, with λ replaced by the polynomial ``lam``.

    Sesquilinear extension: Σ p_i(-λ) q_j(∂+λ) [e_i λ e_j].  Slot variables
    already present in x or y are carried along untouched.

    >>> from .polyring import X0
    >>> vir = virasoro()
    >>> vir.fmt(extend_bracket(vir, (D,), (ONE,), X0))
    '(-d*x0 - 2*x0^2)*L'
    """
    if len(x) != A.rank or len(y) != A.rank:
        raise RankError("element length does not match algebra rank")
    return _pair(A.table, A.rank, x, y, lam)


bracket = extend_bracket


def act(M: ConformalModule, x: Vec, v: Vec, lam) -> Vec:
    """x_λ v for an algebra element x and module element v."""
    if len(x) != M.algebra_rank or len(v) != M.rank:
        raise RankError("element length does not match module data")
    return _pair(M.act, M.rank, x, v, lam)


def substitute_skew(A: HomConformalAlgebra, i: int, j: int, lam=X0) -> Vec:
    """-[e_j μ e_i] evaluated at μ = -∂-λ."""
    if not (0 <= i < A.rank and 0 <= j < A.rank):
        raise RankError(f"basis pair ({i}, {j}) out of range")
    lam = MultiPoly.coerce(lam)
    return vneg(vsubs(A.table[j][i], {SLOT0: -D - lam}))


# ---------------------------------------------------------------------------
# checks


@dataclass
class CheckReport:
    """Named boolean results plus, for failed checks, a witness and residual."""

    results: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, where=None, residual: str | None = None) -> None:
        self.results[name] = ok
        if not ok:
            self.failures[name] = {"at": list(where) if where is not None else None, "residual": residual}

    def __getattr__(self, name):
        results = self.__dict__.get("results", {})
        if name in results:
            return results[name]
        raise AttributeError(name)

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def as_dict(self) -> dict:
        return {"checks": dict(self.results), "failures": dict(self.failures)}


def _first_nonzero(cases, fmt):
    for where, residual in cases:
        if not is_zero_vec(residual):
            return False, where, fmt(residual)
    return True, None, None


def skew_residuals(A: HomConformalAlgebra):
    for i in range(A.rank):
        for j in range(A.rank):
            yield (i, j), vsub(A.table[i][j], substitute_skew(A, i, j))


def jacobi_residual(A: HomConformalAlgebra, i: int, j: int, k: int) -> Vec:
    """LHS - RHS of the Hom-Jacobi identity on (e_i, e_j, e_k), λ = x0, μ = x1."""
    ai, aj, ak = (A.apply_alpha(A.basis(n)) for n in (i, j, k))
    ei, ej, ek = A.basis(i), A.basis(j), A.basis(k)
    lhs = extend_bracket(A, ai, extend_bracket(A, ej, ek, X1), X0)
    r1 = extend_bracket(A, extend_bracket(A, ei, ej, X0), ak, X0 + X1)
    r2 = extend_bracket(A, aj, extend_bracket(A, ei, ek, X0), X1)
    return vsub(lhs, vadd(r1, r2))


def jacobi_residuals(A: HomConformalAlgebra):
    r = A.rank
    for i in range(r):
        for j in range(r):
            for k in range(r):
                yield (i, j, k), jacobi_residual(A, i, j, k)


def multiplicative_residuals(A: HomConformalAlgebra):
    for i in range(A.rank):
        ai = A.apply_alpha(A.basis(i))
        for j in range(A.rank):
            aj = A.apply_alpha(A.basis(j))
            yield (i, j), vsub(A.apply_alpha(A.table[i][j]), extend_bracket(A, ai, aj, X0))


def is_regular(A: HomConformalAlgebra) -> bool:
    det = determinant(A.alpha)
    return det.is_constant() and not det.is_zero()


def check_algebra(A: HomConformalAlgebra) -> CheckReport:
    """Skew-symmetry, Hom-Jacobi, multiplicativity and regularity, exactly."""
    rep = CheckReport()
    for name, cases in (
        ("skew", skew_residuals(A)),
        ("hom_jacobi", jacobi_residuals(A)),
        ("multiplicative", multiplicative_residuals(A)),
    ):
        ok, where, res = _first_nonzero(cases, A.fmt)
        rep.record(name, ok, where, res)
    det = determinant(A.alpha)
    rep.record("regular", det.is_constant() and not det.is_zero(), None,
               None if det.is_constant() and not det.is_zero() else f"det(alpha) = {det}")
    return rep


def _require_compatible(A: HomConformalAlgebra, M: ConformalModule) -> None:
    if M.algebra_rank != A.rank:
        raise RankError(f"module is over a rank-{M.algebra_rank} algebra, algebra has rank {A.rank}")


def check_module(A: HomConformalAlgebra, M: ConformalModule) -> CheckReport:
    _require_compatible(A, M)
    rep = CheckReport()
    r, m = A.rank, M.rank

    def action_jacobi():
        for i in range(r):
            ai, ei = A.apply_alpha(A.basis(i)), A.basis(i)
            for j in range(r):
                aj, ej = A.apply_alpha(A.basis(j)), A.basis(j)
                br = A.table[i][j]
                for k in range(m):
                    v = M.basis(k)
                    lhs = vsub(act(M, ai, act(M, ej, v, X1), X0), act(M, aj, act(M, ei, v, X0), X1))
                    rhs = act(M, br, M.apply_beta(v), X0 + X1)
                    yield (i, j, k), vsub(lhs, rhs)

    def sesquilinearity():
        for i in range(r):
            for k in range(m):
                base = act(M, A.basis(i), M.basis(k), X0)
                left = vadd(act(M, A.basis(i, D), M.basis(k), X0), vscale(X0, base))
                right = vsub(act(M, A.basis(i), M.basis(k, D), X0), vscale(D + X0, base))
                yield (i, k), vadd(left, right)

    def twist_compatibility():
        for k in range(m):
            v = M.basis(k)
            yield ("d", k), vsub(M.apply_beta(vscale(D, v)), vscale(D, M.apply_beta(v)))
        for i in range(r):
            ai = A.apply_alpha(A.basis(i))
            for k in range(m):
                v = M.basis(k)
                lhs = M.apply_beta(act(M, A.basis(i), v, X0))
                yield (i, k), vsub(lhs, act(M, ai, M.apply_beta(v), X0))

    for name, gen in (("action_jacobi", action_jacobi()), ("sesquilinearity", sesquilinearity()), ("twist_compatibility", twist_compatibility())):
        ok, where, res = _first_nonzero(gen, M.fmt)
        rep.record(name, ok, where, res)
    return rep


# ---------------------------------------------------------------------------
# constructions


def adjoint_module(A: HomConformalAlgebra) -> ConformalModule:
    return ConformalModule(A.rank, A.rank, A.table, A.alpha, A.names, name="adjoint")


def alpha_power_adjoint(A: HomConformalAlgebra, s: int) -> ConformalModule:
    """R acting on itself through a_λ b = [α^s(a)_λ b], with β = α."""
    if s == 0:
        return adjoint_module(A)
    if s < 0 and not is_regular(A):
        raise NonInvertibleAlpha(f"alpha^{s} needs an invertible alpha; det = {determinant(A.alpha)}")
    table = tuple(
        tuple(extend_bracket(A, A.apply_alpha(A.basis(i), s), A.basis(j), X0) for j in range(A.rank))
        for i in range(A.rank)
    )
    return ConformalModule(A.rank, A.rank, table, A.alpha, A.names, name=f"alpha^{s}")


def semidirect_sum(A: HomConformalAlgebra, M: ConformalModule) -> HomConformalAlgebra:
    """R ⊕ M with [(a+u)_λ(b+v)] = [a_λ b] + a_λ v - b_{-∂-λ} u and α ⊕ β."""
    _require_compatible(A, M)
    r, m = A.rank, M.rank
    n = r + m
    zero_m = zero_vec(m)
    zero_r = zero_vec(r)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < r and j < r:
                row.append(tuple(A.table[i][j]) + zero_m)
            elif i < r:
                row.append(zero_r + tuple(M.act[i][j - r]))
            elif j < r:
                flipped = vsubs(M.act[j][i - r], {SLOT0: -D - X0})
                row.append(zero_r + vneg(flipped))
            else:
                row.append(zero_vec(n))
        rows.append(tuple(row))
    alpha = tuple(tuple(A.alpha[i]) + zero_m for i in range(r)) + tuple(
        zero_r + tuple(M.beta[k]) for k in range(m)
    )
    names = tuple(A.names) + tuple(f"{nm}'" if nm in A.names else nm for nm in M.names)
    return HomConformalAlgebra(n, tuple(rows), alpha, names, name=f"{A.name}+{M.name}".strip("+"))


def n_products(A: HomConformalAlgebra, x: Vec, y: Vec, N: int) -> list[Vec]:
    """The (n)-products a_(n) b, n = 0..N: n! times the λ^n coefficient."""
    br = extend_bracket(A, x, y, X0)
    out = []
    for n in range(N + 1):
        out.append(tuple(c.coefficient(SLOT0, n) * factorial(n) for c in br))
    return out


def _poly_key(prefix, p: MultiPoly):
    return {prefix + (m,): c for m, c in p.terms.items()}


def vec_coords(x: Vec, prefix=()) -> dict:
    """Flatten a vector of polynomials to a sparse coordinate dict."""
    out: dict = {}
    for k, p in enumerate(x):
        out.update(_poly_key(prefix + (k,), p))
    return out


def center(A: HomConformalAlgebra, degree_bound: int) -> list[Vec]:
    """ℚ-basis of central elements whose ∂-degrees are at most the bound."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    unknowns = [(i, k) for i in range(A.rank) for k in range(degree_bound + 1)]
    columns = []
    for i, k in unknowns:
        a = A.basis(i, D ** k)
        col: dict = {}
        for j in range(A.rank):
            col.update(vec_coords(extend_bracket(A, a, A.basis(j), X0), (j,)))
        columns.append(col)
    result = []
    for sol in nullspace(columns):
        acc = [ZERO] * A.rank
        for c, (i, k) in zip(sol, unknowns):
            if c:
                acc[i] = acc[i] + (D ** k) * c
        result.append(tuple(acc))
    return result


# ---------------------------------------------------------------------------
# standard examples


def virasoro() -> HomConformalAlgebra:
    """[L_λ L] = (∂ + 2λ) L with α = id."""
    return HomConformalAlgebra(1, (((D + 2 * X0,),),), ((ONE,),), ("L",), name="virasoro")


def abelian(alpha: Sequence[Sequence] | None = None, rank: int | None = None) -> HomConformalAlgebra:
    if alpha is None:
        alpha = identity_matrix(rank or 1)
    mat = tuple(tuple(MultiPoly.coerce(a) for a in row) for row in alpha)
    r = len(mat)
    table = tuple(tuple(zero_vec(r) for _ in range(r)) for _ in range(r))
    return HomConformalAlgebra(r, table, mat, name="abelian")


def rank2_example() -> HomConformalAlgebra:
    """[e1_λ e2] = e2, [e2_λ e1] = -e2, other brackets 0, α = diag(1, 2)."""
    z = zero_vec(2)
    e2 = (ZERO, ONE)
    table = ((z, e2), (vneg(e2), z))
    alpha = ((ONE, ZERO), (ZERO, MultiPoly.const(2)))
    return HomConformalAlgebra(2, table, alpha, name="rank2")


def monomial_vec(rank: int, i: int, m) -> Vec:
    return unit(rank, i, monomial(m))
