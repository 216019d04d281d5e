import random

import pytest

from conformal_lab.algebra import abelian, alpha_power_adjoint, check_algebra, rank2_example, skew_residuals, virasoro
from conformal_lab.algebra import is_zero_vec
from conformal_lab.cohomology import random_cochain, zero_cochain
from conformal_lab.deformation import (
    check_deformation,
    d_minus1_of_endo,
    deform,
    deformed_jacobi_by_t,
    endo_cochain,
    find_nijenhuis,
    first_order_defect,
    is_nijenhuis,
    is_trivial_deformation,
    nijenhuis_bracket,
    nijenhuis_residuals,
    split_t,
    triviality_sides,
)
from conformal_lab.errors import NonInvertibleAlpha
from conformal_lab.polyring import D, ONE, X0, X1, ZERO, MultiPoly

V = virasoro()
R2 = rank2_example()


def test_identity_on_virasoro_is_not_nijenhuis():
    f = [(ONE,)]
    assert nijenhuis_bracket(V, f, 0, 0) == (D + 2 * X0,)
    # LHS (∂+2λ)L against RHS (λ-μ)L
    assert nijenhuis_residuals(V, f)[(0, 0)] == (D + X0 + X1,)
    assert not is_nijenhuis(V, f)


def test_zero_map():
    f = [(ZERO,)]
    assert is_nijenhuis(V, f)
    cob = d_minus1_of_endo(V, f)
    assert cob.psi.table == {}
    assert check_deformation(V, cob.psi).ok
    assert is_trivial_deformation(V, f)
    assert deform(V, cob.psi).table == V.table


def test_abelian_any_map():
    A = abelian([[1, D], [0, 3]])
    rng = random.Random(3)
    for _ in range(3):
        f = [tuple(MultiPoly.const(rng.randint(-2, 2)) + rng.randint(-2, 2) * D * X0 for _ in range(2)) for _ in range(2)]
        assert is_nijenhuis(A, f)
        assert d_minus1_of_endo(A, f).psi.table == {}
        assert is_trivial_deformation(A, f)


def test_found_nijenhuis_operators_give_trivial_deformations():
    found = find_nijenhuis(R2, degree_bound=1, seed=0)
    assert found
    for f in found:
        assert is_nijenhuis(R2, f)
        cob = d_minus1_of_endo(R2, f)
        assert cob.matches_nijenhuis_bracket
        assert check_deformation(R2, cob.psi).ok
        for left, right in triviality_sides(R2, f).values():
            assert left == right


def test_deformed_bracket_is_skew_in_t():
    f = endo_cochain(R2, [(D, ZERO), (ZERO, ZERO)])
    At = deform(R2, d_minus1_of_endo(R2, f).psi)
    assert all(is_zero_vec(r) for _, r in skew_residuals(At))
    assert check_algebra(At).skew


def test_non_cocycle_on_virasoro():
    psi = random_cochain(V, alpha_power_adjoint(V, -1), 2, 2, 1)
    rep = check_deformation(V, psi)
    assert not rep.cocycle
    assert not rep.jacobi_t1
    assert rep.t1_equals_first_order_defect and rep.t1_equals_specialized_coboundary
    by_t = deformed_jacobi_by_t(V, psi)
    assert any(not is_zero_vec(parts[1]) for parts in by_t.values())
    for key, parts in by_t.items():
        assert parts[1] == first_order_defect(V, psi, *key)


def test_split_t():
    from conformal_lab.polyring import T

    assert split_t((ONE + T * D - 3 * T * T,)) == [(ONE,), (D,), (MultiPoly.const(-3),)]


def test_requires_regular_alpha():
    A = abelian([[1, 0], [0, D]])
    with pytest.raises(NonInvertibleAlpha):
        d_minus1_of_endo(A, [(ZERO, ZERO), (ZERO, ZERO)])


def test_zero_psi_all_true():
    psi = zero_cochain(R2, alpha_power_adjoint(R2, -1), 2)
    assert check_deformation(R2, psi).ok
