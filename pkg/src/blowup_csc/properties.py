"""Randomised property checks shared by the test suite and the summary command.

Each check returns a ``PropertyResult`` instead of raising, so callers can
report failures as data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ._random import DEFAULT_SEED, rng_for
from .admissibility import (POS_TOL, check, max_min_kernel_vector, rank_c1, report_from_matrix)
from .biharmonic import (ModeData, biharmonic_residual, inner_extension_mode,
                         outer_extension_mode, sample_points)
from .kernel import (KernelBasis, KernelFunction, ModelManifold, SymmetryGroup, invariant_subbasis,
                     mean_zero_check, pn_kernel_basis, random_points)
from .search import AdjunctionInconsistency, Configuration, adjoin_point, cover_construct, cover_sound

GRID_SAMPLES = 10_000
GRID_MARGIN = 1e-3


@dataclass
class PropertyResult:
    name: str
    cases: int
    failures: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0


def random_configuration(rng, n_choices=(1, 2), extra=(1, 4)):
    n = int(rng.choice(n_choices))
    basis = pn_kernel_basis(n)
    m = basis.d + int(rng.integers(extra[0], extra[1] + 1))
    pts = random_points(basis.manifold, m, rng)
    return basis, pts


def _random_well_conditioned(rng, d, max_cond=1e3):
    while True:
        T = rng.standard_normal((d, d))
        if np.linalg.cond(T) < max_cond:
            return T


def basis_change_invariance(cases: int = 100, seed: int = DEFAULT_SEED) -> PropertyResult:
    fails = 0
    worst = 0.0
    for i in range(cases):
        rng = rng_for(seed, "basis_change", i)
        basis, pts = random_configuration(rng)
        M = basis.matrix(pts)
        T = _random_well_conditioned(rng, basis.d)
        a, b = report_from_matrix(M), report_from_matrix(T @ M)
        gap = abs(a.margin - b.margin) if np.isfinite(a.margin) else 0.0
        worst = max(worst, gap)
        if a.c1 != b.c1 or a.verdict != b.verdict or gap > 1e-8 or \
                np.isfinite(a.margin) != np.isfinite(b.margin):
            fails += 1
    return PropertyResult("basis-change invariance", cases, fails, {"max_margin_change": worst})


def permutation_equivariance(cases: int = 100, seed: int = DEFAULT_SEED) -> PropertyResult:
    fails = 0
    identical = 0
    for i in range(cases):
        rng = rng_for(seed, "permutation", i)
        basis, pts = random_configuration(rng)
        M = basis.matrix(pts)
        perm = rng.permutation(M.shape[1])
        a, b = report_from_matrix(M), report_from_matrix(M[:, perm])
        ok = a.verdict == b.verdict and (not np.isfinite(a.margin) and not np.isfinite(b.margin)
                                         or abs(a.margin - b.margin) < 1e-9)
        if ok and a.verdict:
            w = a.witness[perm]
            if np.allclose(w, b.witness, atol=1e-8):
                identical += 1
            else:
                # a different optimal vertex: it must still be an optimal kernel vector
                ok = np.max(np.abs(M[:, perm] @ w)) < 1e-9 and w.min() >= b.margin - 1e-9
        fails += not ok
    return PropertyResult("column-permutation equivariance", cases, fails,
                          {"identical_witnesses": identical})


def scaling_invariance(cases: int = 100, seed: int = DEFAULT_SEED) -> PropertyResult:
    fails = 0
    for i in range(cases):
        rng = rng_for(seed, "scaling", i)
        basis, pts = random_configuration(rng)
        j = int(rng.integers(basis.d))
        lam = float(rng.choice([-1, 1]) * 10 ** rng.uniform(-2, 2))
        funcs = list(basis.functions)
        funcs[j] = funcs[j].scaled(lam)
        scaled = KernelBasis(basis.manifold, funcs)
        a, b = check(None, basis, pts), check(None, scaled, pts)
        fails += (a.verdict != b.verdict) or (a.c1 != b.c1)
    return PropertyResult("scaling invariance", cases, fails)


def grid_positive_kernel(M: np.ndarray, samples: int = GRID_SAMPLES) -> tuple[bool, float]:
    """Brute force over kernel directions: best min-entry of a unit-sum kernel vector.

    Kernel dimension 1 checks both signs; dimension 2 scans ``samples``
    directions on the circle.
    """
    N = null_space(M, rcond=1e-9)
    k = N.shape[1]
    if k == 0:
        return False, -np.inf
    if k == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif k == 2:
        th = np.linspace(0, 2 * np.pi, samples, endpoint=False)
        dirs = np.column_stack([np.cos(th), np.sin(th)])
    else:
        raise ValueError("grid oracle handles kernel dimension <= 2")
    V = dirs @ N.T  # candidates, rows
    s = V.sum(axis=1)
    good = s > 1e-12
    if not good.any():
        return False, -np.inf
    best = float(np.max((V[good] / s[good, None]).min(axis=1)))
    return best > POS_TOL, best


def planted_instance(rng, m: int, k: int, positive: bool) -> np.ndarray:
    """Random (m-k) x m matrix; with ``positive`` its kernel contains a positive vector."""
    d = m - k
    M = rng.standard_normal((d, m))
    if positive:
        a = rng.uniform(0.1, 1.0, m)
        a /= np.linalg.norm(a)
        M = M - np.outer(M @ a, a)
    return M


def lp_vs_grid(cases: int = 100, seed: int = DEFAULT_SEED) -> PropertyResult:
    """Agreement of the LP with the grid oracle, ignoring margins within GRID_MARGIN of 0."""
    fails = compared = skipped = 0
    for i in range(cases):
        rng = rng_for(seed, "lp_grid", i)
        k = int(rng.integers(1, 3))
        m = int(rng.integers(k + 2, 9))
        M = planted_instance(rng, m, k, bool(rng.integers(2)))
        t, _ = max_min_kernel_vector(M)
        lp_pos = t > POS_TOL
        grid_pos, best = grid_positive_kernel(M)
        if abs(t) < GRID_MARGIN:
            skipped += 1
            continue
        compared += 1
        fails += lp_pos != grid_pos
    return PropertyResult("LP vs kernel grid", cases, fails,
                          {"compared": compared, "near_boundary_skipped": skipped})


def random_admissible(rng, max_tries: int = 200):
    for _ in range(max_tries):
        basis, pts = random_configuration(rng, extra=(2, 6))
        cfg = Configuration(basis.manifold, pts, basis)
        if cfg.admissible:
            return cfg
    raise RuntimeError("no admissible random configuration")


def adjoin_monotonicity(cases: int = 200, seed: int = DEFAULT_SEED) -> PropertyResult:
    fails = 0
    for i in range(cases):
        rng = rng_for(seed, "adjoin", i)
        cfg = random_admissible(rng)
        p = random_points(cfg.manifold, 1, rng)[0]
        try:
            fails += not adjoin_point(cfg, p).admissible
        except AdjunctionInconsistency:
            fails += 1
    return PropertyResult("adjoin_point monotonicity", cases, fails)


def cover_soundness(cases: int = 100, seed: int = DEFAULT_SEED) -> PropertyResult:
    """Cover construction on P^1, alternating the sign-flip reduced basis (d = 1) and the full one."""
    m1 = ModelManifold.projective(1)
    full = pn_kernel_basis(1)
    reduced = invariant_subbasis(full, SymmetryGroup.sign_flips(m1))
    fails = 0
    sizes = {"reduced": set(), "full": set()}
    for i in range(cases):
        name, basis = ("reduced", reduced) if i % 2 == 0 else ("full", full)
        cfg = cover_construct(basis, seed=seed + i)
        ok = cover_sound(cfg, cfg.net) and cfg.admissible
        if name == "reduced":
            ok = ok and cfg.m == 2
        sizes[name].add(cfg.m)
        fails += not ok
    return PropertyResult("cover_construct soundness", cases, fails,
                          {k: sorted(v) for k, v in sizes.items()})


def biharmonic_fd(points: int = 20, seed: int = DEFAULT_SEED, n_values=(2, 3),
                  gammas=(0, 1, 2)) -> PropertyResult:
    fails = cases = 0
    worst = 0.0
    for n in n_values:
        for g in gammas:
            rng = rng_for(seed, "bih", n, g)
            md = ModeData(g, n, float(rng.normal()), float(rng.normal()))
            sols = [inner_extension_mode(md)]
            sols.append(outer_extension_mode(ModeData(g, n, md.h, 0.0 if g == 0 else md.k)))
            for sol in sols:
                for x in sample_points(sol, points, rng):
                    res = biharmonic_residual(sol, x)
                    worst = max(worst, res)
                    cases += 1
                    fails += res >= 1e-6
    return PropertyResult("biharmonic finite-difference residual", cases, fails,
                          {"max_residual": worst})


def mean_zero(samples: int = 100_000, seed: int = DEFAULT_SEED, n_values=(1, 2, 3, 4, 5, 6)) -> PropertyResult:
    fails = cases = 0
    worst = 0.0
    for n in n_values:
        basis = pn_kernel_basis(n)
        stats = mean_zero_check(basis.functions, basis.manifold, samples, seed)
        for mean, se in stats:
            cases += 1
            worst = max(worst, abs(mean) / se)
            fails += abs(mean) > 3 * se
    return PropertyResult("Monte Carlo mean zero", cases, fails, {"max_sigma": worst})


def all_properties(seed: int = DEFAULT_SEED) -> list[PropertyResult]:
    return [basis_change_invariance(seed=seed), permutation_equivariance(seed=seed),
            scaling_invariance(seed=seed), lp_vs_grid(seed=seed), adjoin_monotonicity(seed=seed),
            cover_soundness(seed=seed), biharmonic_fd(seed=seed), mean_zero(seed=seed)]
