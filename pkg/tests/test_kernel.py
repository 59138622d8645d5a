import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowup_csc._random import rng_for
from blowup_csc.kernel import (DimensionMismatchError, EmptyKernelError, InvalidDimensionError,
                               KernelBasis, KernelFunction, ModelManifold, Projective, Rigid,
                               SymmetryGroup, as_point, invariant_subbasis, kernel_basis,
                               laplace_eigen_check, mean_zero_check, pn_kernel_basis, random_points)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dimension_and_label_order(n):
    basis = pn_kernel_basis(n)
    assert basis.d == n * n + 2 * n
    labels = basis.labels
    pairs = n * (n + 1) // 2
    assert labels[0] == "xi_12"
    assert labels[pairs] == "hatxi_12"
    assert labels[2 * pairs:] == [f"tildexi_{a}" for a in range(1, n + 1)]


def test_functions_are_real_and_traceless():
    for f in pn_kernel_basis(3):
        assert np.allclose(f.matrix, f.matrix.conj().T)
        assert abs(np.trace(f.matrix)) < 1e-14


def test_values_are_scale_invariant():
    basis = pn_kernel_basis(2)
    p = np.array([1 + 2j, -0.5j, 3.0])
    assert np.allclose(basis.evaluate(p), basis.evaluate(7.5j * p), atol=1e-14)


def test_bidiagonal_values_at_coordinate_points():
    from oracles import bidiagonal

    for n in range(1, 6):
        pts = [np.eye(n + 1)[j] for j in range(n + 1)]
        tilde = [f for f in pn_kernel_basis(n) if f.label.startswith("tildexi")]
        M = KernelBasis(ModelManifold.projective(n), tilde).matrix(pts)
        assert np.array_equal(M, bidiagonal(n))


def test_product_basis_stacks_factors():
    m = ModelManifold((Projective(1), Rigid(), Projective(2)))
    basis = kernel_basis(m)
    assert basis.d == 3 + 8
    assert basis.labels[0].startswith("xi") and basis.labels[3].startswith("chi")


def test_rigid_only_manifold_has_no_kernel():
    with pytest.raises(EmptyKernelError):
        kernel_basis(ModelManifold((Rigid(),)))


def test_invalid_inputs():
    with pytest.raises(InvalidDimensionError):
        ModelManifold.projective(0)
    with pytest.raises(ValueError):
        as_point(ModelManifold.projective(1), np.zeros(2))
    with pytest.raises(DimensionMismatchError):
        as_point(ModelManifold.projective(2), np.ones(2))
    with pytest.raises(ValueError):
        KernelFunction(0, np.ones((2, 3)))


def test_manifold_dict_round_trip():
    m = ModelManifold((Projective(2), Rigid(dim=3)))
    assert ModelManifold.from_dict(m.to_dict()) == m
    assert ModelManifold.from_dict({"factors": [{"P": 1}, {"rigid": True}]}).d == 3


def test_mean_zero_monte_carlo():
    basis = pn_kernel_basis(2)
    for mean, se in mean_zero_check(basis.functions, basis.manifold, 50_000, seed=3):
        assert abs(mean) < 4 * se


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplace_eigenvalue(n):
    rng = rng_for(11, "laplace", n)
    basis = pn_kernel_basis(n)
    for k in range(basis.d):
        p = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        assert laplace_eigen_check(n, k, p) < 1e-4


def test_laplace_step_range():
    with pytest.raises(ValueError):
        laplace_eigen_check(1, 0, [1, 0], h=0.5)


def test_sign_flip_group_and_invariant_subbasis():
    m1 = ModelManifold.projective(1)
    g = SymmetryGroup.sign_flips(m1)
    inv = invariant_subbasis(pn_kernel_basis(1), g)
    assert inv.d == 1
    # the surviving function is a multiple of |z1|^2 - |z2|^2
    vals = inv.matrix([np.array([1, 0]), np.array([0, 1])])
    assert abs(vals[0, 0] + vals[0, 1]) < 1e-12 and abs(vals[0, 0]) > 0.1


def test_invariant_functions_are_invariant():
    m2 = ModelManifold.projective(2)
    g = SymmetryGroup.permutations(m2)
    inv = invariant_subbasis(pn_kernel_basis(2), g)
    pts = random_points(m2, 5, rng_for(0, "inv"))
    for p in pts:
        for q in g.orbit(p):
            assert np.allclose(inv.evaluate(q), inv.evaluate(p), atol=1e-10)


def test_group_orbit_of_fixed_point():
    m1 = ModelManifold.projective(1)
    g = SymmetryGroup.sign_flips(m1)
    assert len(g.orbit(as_point(m1, [1, 0]))) == 1


def test_group_json_round_trip():
    m2 = ModelManifold.projective(2)
    g = SymmetryGroup.permutations(m2)
    assert len(SymmetryGroup.from_dict(m2, g.to_dict())) == len(g) == 6


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10 ** 6))
def test_matrix_is_linear_in_functions(n, seed):
    rng = np.random.default_rng(seed)
    basis = pn_kernel_basis(n)
    pts = random_points(basis.manifold, 4, rng)
    w = rng.normal(size=basis.d)
    combo = KernelFunction(0, sum(c * f.matrix for c, f in zip(w, basis.functions)))
    direct = np.array([combo(p) for p in pts])
    assert np.allclose(w @ basis.matrix(pts), direct, atol=1e-12)
