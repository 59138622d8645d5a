import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import C_N, bidiagonal, c_n as c_n_ref, hp_margin

from blowup_csc._random import rng_for
from blowup_csc.admissibility import (POS_TOL, OverlappingOrbitsError, c_n, check, coefficients,
                                      equivariant_check, max_min_kernel_vector, rank_c1,
                                      report_from_matrix, verify_witness)
from blowup_csc.kernel import (ModelManifold, SymmetryGroup, as_point, invariant_subbasis,
                               pn_kernel_basis, random_points)
from blowup_csc.simplex import solve_standard_form


def test_simplex_small_lp():
    # max x0 + x1  s.t. x0 + 2 x1 + s0 = 4, 3 x0 + x1 + s1 = 6
    A = np.array([[1.0, 2, 1, 0], [3, 1, 0, 1]])
    res = solve_standard_form(np.array([1.0, 1, 0, 0]), A, np.array([4.0, 6]))
    assert res.status == "optimal"
    assert np.allclose(res.x[:2], [8 / 5, 6 / 5])
    assert res.value == pytest.approx(14 / 5)


def test_simplex_unbounded():
    res = solve_standard_form(np.array([1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([1.0]))
    assert res.status == "unbounded"


def test_simplex_redundant_rows():
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    res = solve_standard_form(np.array([1.0, 0.0]), A, np.array([1.0, 2.0]))
    assert res.status == "optimal" and res.x == pytest.approx([1.0, 0.0])


def test_simplex_infeasible():
    A = np.array([[1.0, 1.0]])
    res = solve_standard_form(np.zeros(2), A, np.array([-1.0]))
    assert res.status == "infeasible"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(2, 7))
def test_margin_matches_highs(seed, d, extra):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(d, d + extra))
    if rng.random() < 0.5:
        a = rng.uniform(0.1, 1, d + extra)
        M -= np.outer(M @ a, a) / (a @ a)
    t, _ = max_min_kernel_vector(M)
    ref = hp_margin(M)
    if math.isinf(ref):
        assert math.isinf(t) or t < -1e-9
    else:
        assert t == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("n", range(1, 7))
def test_bidiagonal_is_admissible(n):
    rep = report_from_matrix(bidiagonal(n), n=max(n, 2))
    assert rep.c1 == n and rep.verdict
    assert np.allclose(rep.witness, np.full(n + 1, 1 / (n + 1)), atol=1e-12)
    assert rep.margin == pytest.approx(1 / (n + 1))


def test_m_equals_d_is_not_admissible():
    basis = pn_kernel_basis(1)
    pts = random_points(basis.manifold, 3, rng_for(0, "m=d"))
    rep = check(basis.manifold, basis, pts)
    assert rep.c1 == 3 and rep.kernel_dim == 0
    assert not rep.c2_positive and rep.status == "not-admissible"
    assert rep.margin == -math.inf


def test_rank_deficient_configuration():
    basis = pn_kernel_basis(1)
    p = as_point(basis.manifold, [1, 1j])
    rep = check(basis.manifold, basis, [p, as_point(basis.manifold, [1, -1j])])
    assert rep.c1 < 3 and not rep.verdict


def test_marginal_case():
    # kernel spanned by (1, 0): best min entry is exactly 0
    rep = report_from_matrix(np.array([[0.0, 1.0]]))
    assert rep.c1 == 1 and not rep.verdict
    assert rep.marginal and rep.status == "marginal"


def test_rank_threshold_is_relative():
    M = np.diag([1.0, 1e-12])
    assert rank_c1(M) == 1
    assert rank_c1(M * 1e6) == 1
    assert rank_c1(np.diag([1.0, 1e-6])) == 2


def test_c_n_values():
    assert c_n(2) == pytest.approx(C_N[2], rel=1e-14)
    assert c_n(3) == pytest.approx(C_N[3], rel=1e-14)
    for n in range(2, 7):
        assert c_n(n) == pytest.approx(c_n_ref(n), rel=1e-14)
    with pytest.raises(ValueError):
        c_n(1)


def test_coefficients():
    a0, cn = coefficients([0.25, 0.75], 2)
    assert a0 == pytest.approx(cn) and cn == pytest.approx(4 * math.pi ** 2)
    with pytest.raises(ValueError):
        coefficients([1.0, 0.0], 2)


def test_witness_post_check():
    rep = report_from_matrix(bidiagonal(3), n=3)
    verify_witness(rep)
    assert np.max(np.abs(rep.matrix @ rep.witness)) < 1e-12
    assert rep.witness.sum() == pytest.approx(1.0)
    assert rep.witness.min() >= rep.margin - 1e-15 > POS_TOL


def test_report_json_shape():
    d = report_from_matrix(bidiagonal(2), n=2).to_dict()
    assert set(d) == {"c1", "d", "kernel_dim", "c2", "witness", "margin", "a0", "cn", "verdict",
                      "matrix"}
    assert d["verdict"] == "admissible"


def test_equivariant_check_agrees_with_full():
    m1 = ModelManifold.projective(1)
    group = SymmetryGroup.sign_flips(m1)
    basis = pn_kernel_basis(1)
    er = equivariant_check(basis, group, [as_point(m1, [1, 0]), as_point(m1, [0, 1])])
    assert er.verdict and er.consistent
    assert er.orbit_sizes == [1, 1]
    assert er.reduced.d == 1


def test_equivariant_overlapping_orbits():
    m1 = ModelManifold.projective(1)
    group = SymmetryGroup.sign_flips(m1)
    p = as_point(m1, [1, 0.3])
    q = group.act(group.elements[1], p)
    with pytest.raises(OverlappingOrbitsError):
        equivariant_check(pn_kernel_basis(1), group, [p, q])


def test_invariant_basis_with_orbit_weights():
    m2 = ModelManifold.projective(2)
    group = SymmetryGroup.permutations(m2)
    inv = invariant_subbasis(pn_kernel_basis(2), group)
    reps = random_points(m2, 4, rng_for(5, "eq"))
    er = equivariant_check(pn_kernel_basis(2), group, reps, invariant_basis=inv)
    assert er.consistent
