import numpy as np
import pytest

from blowup_csc._random import rng_for
from blowup_csc.admissibility import report_from_matrix
from blowup_csc.kernel import (ModelManifold, SymmetryGroup, as_point, invariant_subbasis,
                               pn_kernel_basis, random_points)
from blowup_csc.search import (Configuration, PartialCoverError, SearchFailure, adjoin_point,
                               cover_construct, cover_sound, cross_polytope_net, greedy_reduce,
                               m0_estimate, net_size, random_rank_search)


@pytest.fixture(scope="module")
def reduced_p1():
    m1 = ModelManifold.projective(1)
    return invariant_subbasis(pn_kernel_basis(1), SymmetryGroup.sign_flips(m1))


def test_random_rank_search_reaches_full_rank():
    basis = pn_kernel_basis(2)
    cfg = random_rank_search(basis, basis.d + 2, seed=1)
    assert cfg.report.c1 == basis.d
    assert cfg.provenance["algorithm"] == "random_rank_search"


def test_random_rank_search_rejects_small_m():
    with pytest.raises(ValueError):
        random_rank_search(pn_kernel_basis(1), 2)


def test_random_rank_search_is_deterministic():
    basis = pn_kernel_basis(1)
    a = random_rank_search(basis, 4, seed=9)
    b = random_rank_search(basis, 4, seed=9)
    assert all(np.allclose(p[0], q[0]) for p, q in zip(a.points, b.points))


@pytest.mark.parametrize("d,level", [(1, 1), (2, 1), (2, 3), (3, 2), (4, 2)])
def test_net_size_formula(d, level):
    net = cross_polytope_net(d, level)
    assert len(net) == net_size(d, level)
    assert np.allclose(np.linalg.norm(net, axis=1), 1.0)


def test_cover_reduced_p1_gives_two_points(reduced_p1):
    cfg = cover_construct(reduced_p1, seed=0)
    assert cfg.m == 2 and cfg.admissible
    assert cover_sound(cfg, cfg.net)
    pts = sorted(np.abs(p[0]).round(8).tolist() for p in cfg.points)
    assert pts == [[0.0, 1.0], [1.0, 0.0]]


def test_cover_full_p1_is_admissible():
    cfg = cover_construct(pn_kernel_basis(1), seed=0)
    assert cfg.admissible and cover_sound(cfg, cfg.net)


def test_cover_budget_exhaustion_is_reported():
    with pytest.raises(PartialCoverError) as info:
        cover_construct(pn_kernel_basis(2), budget=50, seed=0)
    assert info.value.uncovered is not None


def test_adjoin_point_preserves_admissibility():
    basis = pn_kernel_basis(1)
    cfg = cover_construct(basis, seed=0)
    rng = rng_for(3, "adjoin")
    for p in random_points(basis.manifold, 10, rng):
        cfg = adjoin_point(cfg, p)
        assert cfg.admissible
        assert cfg.report.extra["constructed_ok"]


def test_adjoin_rejects_duplicates_and_inadmissible():
    basis = pn_kernel_basis(1)
    cfg = cover_construct(basis, seed=0)
    with pytest.raises(ValueError):
        adjoin_point(cfg, cfg.points[0])
    bad = Configuration(basis.manifold, random_points(basis.manifold, 3, rng_for(0, "x")), basis)
    with pytest.raises(ValueError):
        adjoin_point(bad, as_point(basis.manifold, [1, 2]))


def test_greedy_reduce_keeps_admissibility():
    basis = pn_kernel_basis(1)
    big = cover_construct(basis, seed=0)
    for p in random_points(basis.manifold, 6, rng_for(1, "grow")):
        big = adjoin_point(big, p)
    red = greedy_reduce(big)
    assert red.admissible and red.m <= big.m and red.m > basis.d


def test_m0_estimate_p1():
    m, cfg = m0_estimate(pn_kernel_basis(1), budget=50, seed=0)
    assert m == 4 and cfg.admissible


def test_m0_estimate_never_below_d_plus_one(reduced_p1):
    m, cfg = m0_estimate(reduced_p1, budget=20, seed=0)
    assert m == 2 and cfg.admissible


def test_search_failure_when_nothing_admissible():
    # a single constant-sign function never admits a positive kernel vector
    basis = pn_kernel_basis(1)
    f = basis.functions[2]
    pos = f.matrix + 2 * np.eye(2)
    from blowup_csc.kernel import KernelBasis, KernelFunction
    b = KernelBasis(basis.manifold, [KernelFunction(0, pos, "positive")])
    with pytest.raises(SearchFailure):
        m0_estimate(b, budget=5, seed=0)


def test_configuration_min_separation():
    m1 = ModelManifold.projective(1)
    cfg = Configuration(m1, [[1, 0], [0, 1]], pn_kernel_basis(1))
    assert cfg.min_separation() == pytest.approx(1.0)
    assert report_from_matrix(cfg.basis.matrix(cfg.points)).c1 == 1
