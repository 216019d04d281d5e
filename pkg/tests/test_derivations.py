import random

import pytest

from conformal_lab.algebra import abelian, check_algebra, rank2_example, virasoro
from conformal_lab.derivations import (
    ConformalMap,
    ExtensionRule,
    alpha_shift,
    commutator,
    commutator_jacobi_residual,
    commutator_skew_residual,
    commutes_with_alpha,
    derivation_extension,
    identity_map,
    in_span,
    inner_derivation,
    is_alpha_k_derivation,
    self_commutator_vanishes,
    solve_derivations,
    zero_map,
)
from conformal_lab.errors import NotAlphaFixed
from conformal_lab.polyring import D, ONE, X0, ZERO, MultiPoly
from conformal_lab.algebra import is_zero_vec

V = virasoro()
R2 = rank2_example()


def test_apply_rules():
    idm = identity_map(1)
    assert idm.apply(V.basis(0, D), X0) == (D + X0,)
    anti = ConformalMap(idm.images, rule=ExtensionRule.COCHAIN_ANTILINEAR)
    assert anti.apply(V.basis(0, D), X0) == (-X0,)
    assert zero_map(1).apply(V.basis(0, D), X0) == (ZERO,)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_zero_map_is_derivation(k):
    assert is_alpha_k_derivation(R2, zero_map(2), k)


@pytest.mark.parametrize("k", [0, 1])
def test_inner_derivations(k):
    Dl = inner_derivation(V, V.basis(0), k)
    assert Dl.images == ((D + 2 * X0,),)
    assert Dl.level == k + 1
    assert is_alpha_k_derivation(V, Dl, k + 1)
    Dr = inner_derivation(R2, R2.basis(0), k)
    assert is_alpha_k_derivation(R2, Dr, k + 1)
    assert Dr.images[0] == (ZERO, ZERO) and Dr.images[1] == (ZERO, MultiPoly.const(2**k))


def test_inner_derivation_needs_fixed_point():
    with pytest.raises(NotAlphaFixed):
        inner_derivation(R2, R2.basis(1), 0)
    assert inner_derivation(abelian(rank=2), (ONE, D), 0).is_zero()


def test_solved_dimensions():
    assert len(solve_derivations(abelian(rank=1), 0, 1)) == 3
    for k in (0, 1, 2):
        assert len(solve_derivations(V, k, 2)) == 2
        assert len(solve_derivations(R2, k, 2)) == 5


def test_solved_basis_members_pass():
    for k in (0, 1):
        for Dm in solve_derivations(R2, k, 2):
            assert is_alpha_k_derivation(R2, Dm, k)
            assert commutes_with_alpha(R2, Dm)


def test_inner_derivation_in_solved_span():
    basis = solve_derivations(V, 1, 2)
    assert in_span(inner_derivation(V, V.basis(0), 0), basis)


def test_identity_is_not_a_derivation():
    assert not is_alpha_k_derivation(R2, identity_map(2), 0)


def test_commutator_with_zero():
    Dm = solve_derivations(R2, 0, 1)[0]
    assert commutator(Dm, zero_map(2)).is_zero()


@pytest.mark.parametrize("k,s", [(0, 0), (0, 1), (1, 1)])
def test_commutator_closure(k, s):
    for alg in (V, R2):
        for a in solve_derivations(alg, k, 1):
            for b in solve_derivations(alg, s, 1):
                com = commutator(a, b)
                assert com.level == k + s
                assert is_alpha_k_derivation(alg, com, k + s)


def test_commutator_skew():
    basis = solve_derivations(V, 0, 2)
    for a in basis:
        for b in basis:
            assert all(is_zero_vec(r) for r in commutator_skew_residual(a, b))


def test_commutator_jacobi_seeded():
    basis = solve_derivations(V, 0, 1)
    rng = random.Random(11)
    for _ in range(3):
        triple = [basis[rng.randrange(len(basis))] for _ in range(3)]
        assert all(is_zero_vec(r) for r in commutator_jacobi_residual(V, *triple))


def test_alpha_shift_raises_level():
    Dm = solve_derivations(R2, 0, 1)[0]
    sh = alpha_shift(R2, Dm)
    assert sh.level == 1
    assert is_alpha_k_derivation(R2, sh, 1)


def test_extension_with_zero_map_passes():
    ext = derivation_extension(V, zero_map(1, level=1))
    assert check_algebra(ext).ok


def test_extension_rejects_non_derivations():
    ext = derivation_extension(R2, identity_map(2, level=1))
    assert not check_algebra(ext).hom_jacobi


def test_extension_passes_iff_derivation_and_self_commuting():
    # Hom-Jacobi on (E, E, a) forces D_λ D_μ = D_μ D_λ on top of the derivation identity
    for alg in (V, R2):
        for Dm in solve_derivations(alg, 1, 1):
            ok = check_algebra(derivation_extension(alg, Dm)).ok
            assert ok == (is_alpha_k_derivation(alg, Dm, 1) and self_commutator_vanishes(Dm))


def test_inner_virasoro_extension_residual():
    ext = derivation_extension(V, inner_derivation(V, V.basis(0), 0))
    rep = check_algebra(ext)
    assert rep.skew and rep.multiplicative and not rep.hom_jacobi
