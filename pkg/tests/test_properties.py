"""Smaller runs of the randomised suites; the full-size runs live in the acceptance test."""

import numpy as np
import pytest

from oracles import hp_margin

from blowup_csc import properties as props
from blowup_csc._random import rng_for


@pytest.mark.parametrize("check", [
    props.basis_change_invariance, props.permutation_equivariance, props.scaling_invariance,
    props.lp_vs_grid, props.adjoin_monotonicity, props.cover_soundness,
])
def test_suite_small(check):
    r = check(cases=20, seed=7)
    assert r.passed, r


def test_biharmonic_small():
    r = props.biharmonic_fd(points=3, seed=7)
    assert r.passed and r.cases == 3 * 2 * 3 * 2


def test_mean_zero_small():
    r = props.mean_zero(samples=20_000, seed=7, n_values=(1, 2))
    assert r.passed and r.cases == 3 + 8


def test_grid_oracle_against_highs():
    for i in range(30):
        rng = rng_for(1, "grid-highs", i)
        M = props.planted_instance(rng, 6, 2, bool(i % 2))
        pos, best = props.grid_positive_kernel(M)
        ref = hp_margin(M)
        if abs(ref) > 1e-3:
            assert pos == (ref > 0)
            # the grid never beats the LP optimum
            assert best <= ref + 1e-9


def test_planted_instances_have_positive_kernel():
    rng = rng_for(2, "planted")
    for _ in range(10):
        M = props.planted_instance(rng, 7, 1, True)
        assert props.grid_positive_kernel(M)[0]


def test_grid_oracle_rejects_large_kernels():
    with pytest.raises(ValueError):
        props.grid_positive_kernel(np.zeros((1, 5)))


def test_results_are_deterministic():
    a = props.lp_vs_grid(cases=10, seed=3)
    b = props.lp_vs_grid(cases=10, seed=3)
    assert a == b
