import math

import numpy as np
import pytest

from oracles import LAMBDA, LAMBDA_TOL

from blowup_csc.ode import (expansion_fit, fit_trajectory, integrate_zeta, lambda_dual,
                            leading_coefficient, neville, reconstruct_potential, scale_factor,
                            series_start, zeta_rhs)


@pytest.fixture(scope="module")
def trajectories():
    return {n: integrate_zeta(n) for n in (2, 3, 4, 5)}


def test_rhs_vanishes_for_n2():
    assert zeta_rhs(2)(3.0, 1.0) == 0.0


def test_rhs_satisfies_original_equation():
    # (1 + s z)^{n-1} s^2 z' = (1 + s z)^{n-1} - 1 - (n-1) s z
    for n in (3, 4, 6):
        s, z = 0.7, 1.3
        x = s * z
        lhs = (1 + x) ** (n - 1) * s * s * zeta_rhs(n)(s, z)
        assert lhs == pytest.approx((1 + x) ** (n - 1) - 1 - (n - 1) * x, rel=1e-13)


def test_series_start():
    z, F = series_start(4, 1e-6)
    assert z == pytest.approx(1 + 3e-6, rel=1e-15)
    assert F == pytest.approx(1e-6 * (1 + 1.5e-6), rel=1e-15)


def test_neville_recovers_polynomials():
    x = np.array([0.1, 0.2, 0.4, 0.7, 1.0])
    y = 3 - 2 * x + 0.5 * x ** 4
    assert neville(x, y) == pytest.approx(3.0, abs=1e-12)


def test_n2_closed_form(trajectories):
    t = trajectories[2]
    assert np.max(np.abs(t.zeta - 1)) < 1e-10
    assert np.max(np.abs(t.f - (np.log(t.s) + t.s)) / (1 + t.s)) < 1e-9


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lambda_frozen(trajectories, n):
    assert trajectories[n].lam == pytest.approx(LAMBDA[n], abs=LAMBDA_TOL)


def test_lambda_n6():
    assert integrate_zeta(6).lam == pytest.approx(LAMBDA[6], abs=LAMBDA_TOL)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dual_integrators_agree(n):
    assert lambda_dual(n)["difference"] < 1e-6


def test_lambda_stable_under_smax(trajectories):
    assert integrate_zeta(3, s_max=100).lam == pytest.approx(trajectories[3].lam, abs=1e-8)


def test_zeta_monotone_positive(trajectories):
    for t in trajectories.values():
        assert np.all(t.zeta > 0) and np.all(np.diff(t.zeta) >= -1e-10)
        assert np.all(t.zeta <= t.lam + 1e-9)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_remainder_slope(trajectories, n):
    fit = fit_trajectory(trajectories[n])
    assert abs(fit.remainder_slope - (1 - n)) < 0.2
    # free fit of the s^{2-n} coefficient matches the derived one
    assert fit.free_leading_coef == pytest.approx(fit.leading_coef, rel=1e-3)


def test_reference_coefficient_only_fits_n3(trajectories):
    assert fit_trajectory(trajectories[3], "reference").remainder_slope == pytest.approx(-2, abs=0.2)
    for n in (4, 5):
        assert abs(fit_trajectory(trajectories[n], "reference").remainder_slope - (1 - n)) > 1


def test_leading_coefficient_conventions():
    assert leading_coefficient(2.0, 3) == leading_coefficient(2.0, 3, "reference") == -0.5
    assert leading_coefficient(2.0, 4) == pytest.approx(-0.125)
    with pytest.raises(ValueError):
        leading_coefficient(2.0, 4, "other")


def test_potential_derivative(trajectories):
    assert reconstruct_potential(trajectories[4]).derivative_residual() < 1e-5


def test_expansion_fit_synthetic():
    s = np.geomspace(10, 1000, 400)
    lam, c, n = 3.0, -0.7, 3
    a = leading_coefficient(lam, n)
    f = lam * s + c + a / s + 0.2 / s ** 2
    fit = expansion_fit(s, f, n, lam, window=(100, 1000))
    assert fit.c == pytest.approx(c, abs=1e-10)
    assert fit.k == pytest.approx(0.2, rel=1e-6)
    assert fit.remainder_slope == pytest.approx(-2, abs=1e-6)


def test_expansion_fit_free_lambda():
    s = np.geomspace(10, 1000, 400)
    f = 3.0 * s - 0.7 + leading_coefficient(3.0, 3) / s + 0.2 / s ** 2
    assert expansion_fit(s, f, 3).lam == pytest.approx(3.0, rel=1e-10)


def test_input_validation():
    with pytest.raises(ValueError):
        integrate_zeta(1)
    with pytest.raises(ValueError):
        integrate_zeta(3, s_max=50)
    with pytest.raises(ValueError):
        integrate_zeta(3, rel_tol=1e-6)
    with pytest.raises(ValueError):
        expansion_fit(np.ones(3), np.ones(3), 2)


def test_scale_factor():
    assert scale_factor(1.0, 2) == pytest.approx(1.0)
    assert scale_factor(4.0, 3) == pytest.approx(math.sqrt(2.0))
    with pytest.raises(ValueError):
        scale_factor(0.0, 3)
