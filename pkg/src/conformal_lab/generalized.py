"""Generalized derivations, quasiderivations, centroids and related spaces,
plus the t-extension R̆ = R t + R t² (t³ = 0) and the map φ into Der(R̆).

Maps are evaluated at their own slot μ; the bracket variable λ is a slot that
does not occur in any of the maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    CheckReport,
    HomConformalAlgebra,
    Vec,
    center,
    extend_bracket,
    is_regular,
    is_zero_vec,
    unit,
    vadd,
    vec_coords,
    vsub,
    zero_vec,
)
from .derivations import (
    ConformalMap,
    alpha_commutation_residuals,
    alpha_shift,
    commutator,
    derivation_residuals,
    fresh_slot,
    is_alpha_k_derivation,
    residual_coords,
    solve_derivations,
    solve_maps,
    zero_map,
)
from .errors import InvalidTriple, NonSurjectiveAlpha, NotQuasiderivation
from .linalg import EchelonBasis, independent_subset, nullspace
from .polyring import D, MultiPoly, ONE, ZERO

SPACES = ("GDer", "QDer", "C", "QC", "ZDer", "Der")


# ---------------------------------------------------------------------------
# the three terms of every defining identity


def _terms(A: HomConformalAlgebra, k: int, maps: Sequence[ConformalMap]):
    """Yield ((i, j), T1, T2, T3) builders for basis pairs.

    T1(X) = [(X_μ e_i) λ+μ α^k e_j], T2(X) = [α^k e_i λ X_μ e_j],
    T3(X) = X_μ([e_i λ e_j]), with μ the maps' common slot.
    """
    mu_var = maps[0].slot
    mu = MultiPoly.var(mu_var)
    lam = MultiPoly.var(fresh_slot(*maps))
    powers = [A.apply_alpha(A.basis(i), k) for i in range(A.rank)]

    def t1(X, i, j):
        return extend_bracket(A, X.apply(A.basis(i), mu), powers[j], lam + mu)

    def t2(X, i, j):
        return extend_bracket(A, powers[i], X.apply(A.basis(j), mu), lam)

    def t3(X, i, j):
        return X.apply(extend_bracket(A, A.basis(i), A.basis(j), lam), mu)

    return t1, t2, t3


def _pairs(A):
    return [(i, j) for i in range(A.rank) for j in range(A.rank)]


def gder_residuals(A, Dm, Dp, Dpp, k):
    t1, t2, t3 = _terms(A, k, (Dm, Dp, Dpp))
    for i, j in _pairs(A):
        yield (i, j), vsub(vadd(t1(Dm, i, j), t2(Dp, i, j)), t3(Dpp, i, j))


def qder_residuals(A, Dm, Dp, k):
    return gder_residuals(A, Dm, Dm, Dp, k)


def centroid_residuals(A, Dm, k):
    t1, t2, t3 = _terms(A, k, (Dm,))
    for i, j in _pairs(A):
        a, b, c = t1(Dm, i, j), t2(Dm, i, j), t3(Dm, i, j)
        yield (i, j, "12"), vsub(a, b)
        yield (i, j, "23"), vsub(b, c)


def quasicentroid_residuals(A, Dm, k):
    t1, t2, _ = _terms(A, k, (Dm,))
    for i, j in _pairs(A):
        yield (i, j), vsub(t1(Dm, i, j), t2(Dm, i, j))


def central_residuals(A, Dm, k):
    t1, _, t3 = _terms(A, k, (Dm,))
    for i, j in _pairs(A):
        yield (i, j, "1"), t1(Dm, i, j)
        yield (i, j, "3"), t3(Dm, i, j)


def _clean(gen) -> bool:
    return all(is_zero_vec(v) for _, v in gen)


def in_omega(A, *maps) -> bool:
    return all(_clean(alpha_commutation_residuals(A, m)) for m in maps)


def is_generalized_derivation(A, triple, k: int) -> bool:
    Dm, Dp, Dpp = triple
    return in_omega(A, Dm, Dp, Dpp) and _clean(gder_residuals(A, Dm, Dp, Dpp, k))


def is_quasiderivation(A, Dm, Dp, k: int) -> bool:
    return in_omega(A, Dm, Dp) and _clean(qder_residuals(A, Dm, Dp, k))


def is_centroid(A, Dm, k: int) -> bool:
    return in_omega(A, Dm) and _clean(centroid_residuals(A, Dm, k))


def is_quasicentroid(A, Dm, k: int) -> bool:
    return in_omega(A, Dm) and _clean(quasicentroid_residuals(A, Dm, k))


def is_central_derivation(A, Dm, k: int) -> bool:
    return in_omega(A, Dm) and _clean(central_residuals(A, Dm, k))


# ---------------------------------------------------------------------------
# solved slices


@dataclass
class SolvedElement:
    map: ConformalMap
    witnesses: tuple = ()


@dataclass
class SolvedSpace:
    which: str
    level: int
    degree_bound: int
    elements: list = field(default_factory=list)
    # solutions of the joint system whose first map is zero (witness freedom)
    witness_kernel: list = field(default_factory=list)

    @property
    def maps(self) -> list[ConformalMap]:
        return [e.map for e in self.elements]

    def __len__(self) -> int:
        return len(self.elements)


def _omega_coords(A, maps) -> dict:
    out: dict = {}
    for w, m in enumerate(maps):
        out.update(residual_coords(alpha_commutation_residuals(A, m), ("omega", w)))
    return out


def _residual_fn(A, which, k):
    def fn(maps):
        out = _omega_coords(A, maps)
        if which == "GDer":
            out.update(residual_coords(gder_residuals(A, maps[0], maps[1], maps[2], k), "id"))
        elif which == "QDer":
            out.update(residual_coords(qder_residuals(A, maps[0], maps[1], k), "id"))
        elif which == "C":
            out.update(residual_coords(centroid_residuals(A, maps[0], k), "id"))
        elif which == "QC":
            out.update(residual_coords(quasicentroid_residuals(A, maps[0], k), "id"))
        elif which == "ZDer":
            out.update(residual_coords(central_residuals(A, maps[0], k), "id"))
        elif which == "Der":
            out.update(residual_coords(derivation_residuals(A, maps[0], k), "id"))
        return out

    return fn


_N_MAPS = {"GDer": 3, "QDer": 2, "C": 1, "QC": 1, "ZDer": 1, "Der": 1}


def solve_space(A: HomConformalAlgebra, which: str, k: int, degree_bound: int) -> SolvedSpace:
    """Basis of the degree-truncated slice of one of the spaces.

    For GDer and QDer the joint system in (D, witnesses) is solved; the result
    is a basis of the projection to D, each element stored with one witness
    tuple, together with the witness freedom (solutions with D = 0).
    """
    if which not in _N_MAPS:
        raise ValueError(f"unknown space {which!r}; expected one of {', '.join(SPACES)}")
    n = _N_MAPS[which]
    sols = solve_maps(A, n, _residual_fn(A, which, k), degree_bound, level=k)
    projections = [s[0].coords() for s in sols]
    keep = independent_subset(projections)
    elements = [SolvedElement(sols[i][0], tuple(sols[i][1:])) for i in keep]
    kernel = []
    if n > 1 and sols:
        # combinations whose D-part vanishes
        for combo in nullspace(projections):
            parts = []
            for w in range(1, n):
                acc = zero_map(A.rank, k)
                for c, s in zip(combo, sols):
                    if c:
                        acc = acc + s[w].scale(c)
                parts.append(acc)
            kernel.append(tuple(parts))
    return SolvedSpace(which, k, degree_bound, elements, kernel)


def span_contains(small: Sequence[ConformalMap], big: Sequence[ConformalMap]) -> bool:
    eb = EchelonBasis()
    for m in big:
        eb.add(m.coords())
    return all(eb.contains(m.coords()) for m in small)


def tower_report(A: HomConformalAlgebra, k: int, degree_bound: int) -> CheckReport:
    spaces = {w: solve_space(A, w, k, degree_bound).maps for w in SPACES}
    rep = CheckReport()
    for a, b in (("ZDer", "Der"), ("Der", "QDer"), ("QDer", "GDer"), ("C", "QC"), ("QC", "GDer")):
        rep.record(f"{a}<={b}", span_contains(spaces[a], spaces[b]))
    rep.results["dims"] = {w: len(m) for w, m in spaces.items()}  # type: ignore[assignment]
    return rep


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class Decomposition:
    quasi: ConformalMap
    quasi_witness: ConformalMap
    qc: ConformalMap


def decompose_gder(A: HomConformalAlgebra, triple, k: int) -> Decomposition:
    """D = (D + D')/2 + (D - D')/2 with D'' witnessing the first part."""
    if not is_generalized_derivation(A, triple, k):
        raise InvalidTriple("triple does not satisfy the generalized derivation identity")
    Dm, Dp, Dpp = triple
    half = Fraction(1, 2)
    return Decomposition((Dm + Dp).scale(half), Dpp, (Dm - Dp).scale(half))


# ---------------------------------------------------------------------------
# closure under commutators


def _two_slot(X: ConformalMap, Y: ConformalMap) -> ConformalMap:
    return commutator(X, Y)


def bracket_closure_checks(A: HomConformalAlgebra, k: int, s: int, degree_bound: int) -> CheckReport:
    """Commutators of solved elements satisfy the target space's identity."""
    sp = {}
    for w in SPACES:
        sp[(w, k)] = solve_space(A, w, k, degree_bound)
        sp[(w, s)] = solve_space(A, w, s, degree_bound)
    lvl = k + s
    rep = CheckReport()

    def run(name, left, right, test):
        for a in sp[(left, k)].elements:
            for b in sp[(right, s)].elements:
                if not test(a, b):
                    rep.record(name, False, None, f"{a.map.describe(A.names)} with {b.map.describe(A.names)}")
                    return
        rep.record(name, True)

    def gder(a, b):
        C = _two_slot(a.map, b.map)
        W1 = _two_slot(a.witnesses[0], b.witnesses[0])
        W2 = _two_slot(a.witnesses[1], b.witnesses[1])
        return is_generalized_derivation(A, (C, W1, W2), lvl)

    run("GDer_subalgebra", "GDer", "GDer", gder)
    run("QDer_subalgebra", "QDer", "QDer",
        lambda a, b: is_quasiderivation(A, _two_slot(a.map, b.map), _two_slot(a.witnesses[0], b.witnesses[0]), lvl))
    run("C_subalgebra", "C", "C", lambda a, b: is_centroid(A, _two_slot(a.map, b.map), lvl))
    run("ZDer_ideal_of_Der", "ZDer", "Der", lambda a, b: is_central_derivation(A, _two_slot(a.map, b.map), lvl))
    run("Der_C_in_C", "Der", "C", lambda a, b: is_centroid(A, _two_slot(a.map, b.map), lvl))
    run("QDer_QC_in_QC", "QDer", "QC", lambda a, b: is_quasicentroid(A, _two_slot(a.map, b.map), lvl))
    run("QC_QC_in_QDer", "QC", "QC",
        lambda a, b: is_quasiderivation(A, _two_slot(a.map, b.map), zero_map(A.rank), lvl))
    for w in ("GDer", "QDer", "C", "QC", "ZDer", "Der"):
        ok = True
        for e in sp[(w, k)].elements:
            shifted = alpha_shift(A, e.map)
            wits = tuple(alpha_shift(A, x) for x in e.witnesses)
            ok &= _predicate(A, w, shifted, wits, k + 1)
        rep.record(f"alpha_shift_{w}", ok)
    return rep


def _predicate(A, which, Dm, witnesses, k) -> bool:
    if which == "GDer":
        return is_generalized_derivation(A, (Dm,) + tuple(witnesses), k)
    if which == "QDer":
        return is_quasiderivation(A, Dm, witnesses[0], k)
    if which == "C":
        return is_centroid(A, Dm, k)
    if which == "QC":
        return is_quasicentroid(A, Dm, k)
    if which == "ZDer":
        return is_central_derivation(A, Dm, k)
    return is_alpha_k_derivation(A, Dm, k)


# ---------------------------------------------------------------------------
# interplay with the center


def _value_is_central(A: HomConformalAlgebra, v: Vec, lam_var) -> bool:
    lam = MultiPoly.var(lam_var)
    return all(is_zero_vec(extend_bracket(A, v, A.basis(j), lam)) for j in range(A.rank))


def _require_surjective(A):
    if not is_regular(A):
        raise NonSurjectiveAlpha("alpha is not invertible over Q[d]; surjectivity cannot be certified")


def centroid_qc_center_check(A: HomConformalAlgebra, k: int, s: int, degree_bound: int) -> CheckReport:
    """[C_λ QC] takes values in the center; zero maps when the center slice is empty."""
    _require_surjective(A)
    Cs = solve_space(A, "C", k, degree_bound).maps
    QCs = solve_space(A, "QC", s, degree_bound).maps
    z = center(A, degree_bound)
    rep = CheckReport()
    all_central = True
    all_zero = True
    count = 0
    for a in Cs:
        for b in QCs:
            com = commutator(a, b)
            count += 1
            lam_var = fresh_slot(com)
            for v in com.images:
                all_central &= _value_is_central(A, v, lam_var)
            all_zero &= com.is_zero()
    rep.record("values_central", all_central)
    rep.record("zero_when_center_trivial", all_zero if not z else True)
    rep.results["center_dim"] = len(z)  # type: ignore[assignment]
    rep.results["pairs"] = count  # type: ignore[assignment]
    return rep


def qc_bracket_vanishing(A: HomConformalAlgebra, k: int, s: int, degree_bound: int) -> CheckReport:
    """If all commutators of solved QC elements are again quasicentroids, they vanish."""
    _require_surjective(A)
    if center(A, degree_bound):
        raise ValueError("the center slice is nonzero; the vanishing statement needs a trivial center")
    QK = solve_space(A, "QC", k, degree_bound).maps
    QS = solve_space(A, "QC", s, degree_bound).maps
    closure = True
    all_zero = True
    nonzero_is_not_qc = True
    for a in QK:
        for b in QS:
            com = commutator(a, b)
            is_qc = is_quasicentroid(A, com, k + s)
            closure &= is_qc
            all_zero &= com.is_zero()
            if not com.is_zero() and is_qc:
                nonzero_is_not_qc = False
    rep = CheckReport()
    rep.record("closure", closure)
    rep.record("all_commutators_zero", all_zero)
    rep.record("implication", (not closure) or all_zero)
    rep.record("converse", (not all_zero) or closure)
    rep.record("nonzero_commutators_leave_QC", nonzero_is_not_qc)
    return rep


# ---------------------------------------------------------------------------
# R̆ and φ


def breve_extension(A: HomConformalAlgebra) -> HomConformalAlgebra:
    """Basis e_i t (index i) and e_i t² (index r + i); t³ = 0."""
    r = A.rank
    n = 2 * r
    zr = zero_vec(r)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < r and j < r:
                row.append(zr + tuple(A.table[i][j]))
            else:
                row.append(zero_vec(n))
        rows.append(tuple(row))
    alpha = tuple(tuple(A.alpha[i]) + zr for i in range(r)) + tuple(zr + tuple(A.alpha[i]) for i in range(r))
    names = tuple(f"{nm}*t" for nm in A.names) + tuple(f"{nm}*t^2" for nm in A.names)
    return HomConformalAlgebra(n, tuple(rows), alpha, names, name=f"{A.name}_breve")


@dataclass
class Complement:
    degree_bound: int
    derived: list  # ℚ-basis of the [R,R] slice (vectors in ∂ only)
    complement: list  # ℚ-basis of U

    def split(self, v: Vec, rank: int) -> tuple[Vec, Vec]:
        """v = b + u with b in the [R,R] slice and u in U."""
        vecs = self.derived + self.complement
        cols = [_slice_coords(w) for w in vecs] + [_slice_coords(v)]
        sols = [s for s in nullspace(cols) if s[-1] != 0]
        if not sols:
            raise ValueError("vector is outside the truncated slice")
        sol = sols[0]
        scale = -1 / sol[-1]
        b = zero_vec(rank)
        u = zero_vec(rank)
        nd = len(self.derived)
        for c, w, idx in zip(sol, vecs, range(len(vecs))):
            if not c:
                continue
            term = tuple(p * (c * scale) for p in w)
            if idx < nd:
                b = vadd(b, term)
            else:
                u = vadd(u, term)
        return b, u


def _slice_coords(v: Vec) -> dict:
    return vec_coords(v)


def compute_complement(A: HomConformalAlgebra, degree_bound: int) -> Complement:
    """[R,R] ∩ (∂-degree ≤ bound) from all λ-coefficients, plus a greedy complement U."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    r = A.rank
    gens = [A.basis(i, D ** a) for i in range(r) for a in range(degree_bound + 1)]
    coeff_vecs = []
    for x_ in gens:
        for y in gens:
            br = extend_bracket(A, x_, y, MultiPoly.var(2))
            powers = {}
            for comp, p in enumerate(br):
                for n, c in p.expand_in_variable(2):
                    powers.setdefault(n, [ZERO] * r)[comp] = c
            for vec in powers.values():
                coeff_vecs.append(tuple(vec))
    coords = [_slice_coords(v) for v in coeff_vecs]
    # intersect the span with the slice
    allowed = lambda key: key[1][0] <= degree_bound if key[1] else True  # noqa: E731
    outside = [{k: c for k, c in v.items() if not allowed(k)} for v in coords]
    inside = []
    for combo in nullspace(outside) if coords else []:
        acc: dict = {}
        for c, v in zip(combo, coords):
            if c:
                for kk, vv in v.items():
                    acc[kk] = acc.get(kk, 0) + c * vv
        acc = {kk: vv for kk, vv in acc.items() if vv}
        if acc:
            inside.append(acc)
    eb = EchelonBasis()
    derived = []
    for v in inside:
        if eb.add(v):
            derived.append(_vec_from_coords(v, r))
    complement = []
    for a in range(degree_bound + 1):
        for i in range(r):
            cand = A.basis(i, D ** a)
            if eb.add(_slice_coords(cand)):
                complement.append(cand)
    return Complement(degree_bound, derived, complement)


def _vec_from_coords(coords: dict, rank: int) -> Vec:
    per = [{} for _ in range(rank)]
    for (comp, m), c in coords.items():
        per[comp][m] = c
    return tuple(MultiPoly(p) for p in per)


def phi_embedding(A: HomConformalAlgebra, Dm: ConformalMap, Dp: ConformalMap, comp: Complement, k: int | None = None) -> ConformalMap:
    """φ(D): e_i t ↦ D(e_i) t and e_i t² ↦ D'(b_i) t², where e_i = b_i + u_i."""
    k = Dm.level if k is None else k
    if not is_quasiderivation(A, Dm, Dp, k):
        raise NotQuasiderivation("(D, D') does not satisfy the quasiderivation identity")
    r = A.rank
    mu = MultiPoly.var(Dm.slot)
    zr = zero_vec(r)
    images = []
    for i in range(r):
        images.append(Dm.apply(A.basis(i), mu) + zr)
    for i in range(r):
        b, _u = comp.split(A.basis(i), r)
        images.append(zr + Dp.apply(b, mu))
    return ConformalMap(tuple(images), slot=Dm.slot, level=k)
