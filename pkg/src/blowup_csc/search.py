"""Constructing admissible configurations.

Every constructor here only proposes points; the verdict always comes from
:func:`blowup_csc.admissibility.check`.
"""

from __future__ import annotations

import itertools
import math
import logging
from dataclasses import dataclass, field

import numpy as np

from ._random import DEFAULT_SEED, rng_for, sphere_points
from .admissibility import (AdmissibilityReport, RANK_TOL, POS_TOL, check, rank_c1,
                            report_from_matrix)
from .kernel import (KernelBasis, ModelManifold, Rigid, SymmetryGroup, as_point, as_points,
                     point_distance, random_points)

log = logging.getLogger(__name__)

DISTINCT_TOL = 1e-8


class SearchFailure(RuntimeError):
    pass


class PartialCoverError(RuntimeError):
    def __init__(self, message, uncovered):
        super().__init__(message)
        self.uncovered = uncovered


class AdjunctionInconsistency(RuntimeError):
    pass


@dataclass
class Configuration:
    manifold: ModelManifold
    points: list
    basis: KernelBasis
    report: AdmissibilityReport | None = None
    group: SymmetryGroup | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = as_points(self.manifold, self.points)

    @property
    def m(self) -> int:
        return len(self.points)

    def min_separation(self) -> float:
        if self.m < 2:
            return np.inf
        return min(point_distance(self.manifold, p, q)
                   for p, q in itertools.combinations(self.points, 2))

    def recheck(self, rank_tol: float = RANK_TOL, tol_pos: float = POS_TOL) -> AdmissibilityReport:
        self.report = check(self.manifold, self.basis, self.points, rank_tol, tol_pos)
        return self.report

    @property
    def admissible(self) -> bool:
        if self.report is None:
            self.recheck()
        return self.report.verdict


# ---------------------------------------------------------------------------


def random_rank_search(basis: KernelBasis, m: int, seed: int = DEFAULT_SEED, max_tries: int = 100,
                       rank_tol: float = RANK_TOL) -> Configuration:
    """Uniform random m-point configurations until the rank reaches d."""
    d = basis.d
    if m < d:
        raise ValueError(f"rank d={d} needs at least d points, got m={m}")
    for k in range(max_tries):
        rng = rng_for(seed, "random_rank_search", m, k)
        pts = random_points(basis.manifold, m, rng)
        M = basis.matrix(pts)
        if rank_c1(M, rank_tol) == d:
            cfg = Configuration(basis.manifold, pts, basis,
                                provenance={"algorithm": "random_rank_search", "seed": seed,
                                            "tries": k + 1})
            cfg.recheck(rank_tol)
            return cfg
    raise SearchFailure(f"no full-rank configuration of {m} points in {max_tries} tries")


# ---------------------------------------------------------------------------
# cover construction


def cross_polytope_net(d: int, level: int) -> np.ndarray:
    """Unit vectors v/|v| for integer v with |v|_1 = 2**level; rows are directions."""
    k = 2 ** level
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            for s in ((remaining,) if remaining == 0 else (remaining, -remaining)):
                out.append(prefix + [s])
            return
        for a in range(remaining + 1):
            signs = (a,) if a == 0 else (a, -a)
            for s in signs:
                rec(prefix + [s], remaining - a, slots - 1)

    rec([], k, d)
    net = np.array(out, dtype=float)
    return net / np.linalg.norm(net, axis=1, keepdims=True)


def net_size(d: int, level: int) -> int:
    """Number of integer vectors in Z^d with L1 norm 2**level."""
    k = 2 ** level
    return sum(2 ** i * math.comb(d, i) * math.comb(k - 1, i - 1) for i in range(1, min(d, k) + 1))


def covering_angle(net: np.ndarray, rng: np.random.Generator, probes: int = 20000) -> float:
    """Estimated covering radius (radians) of a direction net on S^{d-1}."""
    d = net.shape[1]
    if d == 1:
        return 0.0
    x = rng.standard_normal((probes, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    best = np.full(probes, -1.0)
    step = max(1, 2_000_000 // max(len(net), 1))
    for i in range(0, probes, step):
        best[i:i + step] = (x[i:i + step] @ net.T).max(axis=1)
    cos = np.clip(best, -1.0, 1.0)
    # inflate the sampled maximum to cover unsampled holes
    return float(np.arccos(cos.min()) * 1.05)


def _extreme_point(basis: KernelBasis, lam: np.ndarray, sign: int, label_rng) -> tuple:
    """Point minimising sign * f_lam exactly: per factor an extreme eigenvector."""
    manifold = basis.manifold
    comps = []
    for i, fac in enumerate(manifold.factors):
        if isinstance(fac, Rigid):
            comps.append(f"q{label_rng}")
            continue
        A = np.zeros((fac.n + 1, fac.n + 1), dtype=complex)
        for w, f in zip(lam, basis.functions):
            if f.factor == i:
                A += w * f.matrix
        vals, vecs = np.linalg.eigh(sign * A)
        comps.append(vecs[:, 0])
    return tuple(comps)


def cover_construct(basis: KernelBasis, net_angle: float = 0.05, budget: int = 10**7,
                    seed: int = DEFAULT_SEED, probe: int = 1000, polish: bool = True,
                    max_level: int = 8) -> Configuration:
    """Sign-changing configuration from a finite cover of the direction sphere.

    For every net direction Lambda a point with f_Lambda < 0 and one with
    f_Lambda > 0 are required, each stable on a neighbourhood at least as
    large as the covering radius of the net.  The net is refined until that
    holds; ``net_angle`` is the finest covering radius allowed.  Points are
    shared across directions whenever an already chosen point suffices.
    """
    d = basis.d
    if d < 1:
        raise ValueError("cover construction needs d >= 1")
    manifold = basis.manifold
    rng = rng_for(seed, "cover_construct")
    rot = np.linalg.qr(rng.standard_normal((d, d)))[0] if d > 1 else np.ones((1, 1))
    probe_pts = random_points(manifold, probe, rng)
    probe_vals = basis.matrix(probe_pts)  # d x probe
    used = 0
    level = 0
    while True:
        net = cross_polytope_net(d, level) @ rot.T
        rho = covering_angle(net, rng_for(seed, "cover_angle", level))
        chosen, chosen_vals = [], []
        uncovered = []
        taus = []
        for j, lam in enumerate(net):
            used += probe
            if used > budget:
                raise PartialCoverError(
                    f"sampling budget {budget} exhausted at level {level}",
                    [net[k].tolist() for k in range(j, len(net))])
            f = lam @ probe_vals
            tau = 0.5 * min(-f.min(), f.max())
            taus.append(tau)
            need = {-1: True, 1: True}
            for q_vals in chosen_vals:
                for sgn in (-1, 1):
                    if need[sgn] and sgn * (lam @ q_vals) / np.linalg.norm(q_vals) >= rho:
                        need[sgn] = False
            for sgn in (-1, 1):
                if not need[sgn]:
                    continue
                if polish:
                    cand = as_point(manifold, _extreme_point(basis, lam, -sgn, len(chosen)))
                else:
                    idx = int(np.argmin(-sgn * f))
                    cand = probe_pts[idx]
                vals = basis.evaluate(cand)
                fval = lam @ vals
                stable = sgn * fval / max(np.linalg.norm(vals), 1e-300)
                if sgn * fval > tau and stable >= rho:
                    chosen.append(cand)
                    chosen_vals.append(vals)
                else:
                    uncovered.append(lam.tolist())
                    break
        if not uncovered:
            break
        if level + 1 > max_level or used + net_size(d, level + 1) * probe > budget:
            raise PartialCoverError(
                f"cover incomplete at level {level}: the next refinement exceeds the "
                f"level cap or the sampling budget", uncovered)
        next_rho = covering_angle(cross_polytope_net(d, level + 1) @ rot.T,
                                  rng_for(seed, "cover_angle", level + 1))
        if next_rho < net_angle:
            raise PartialCoverError(
                f"{len(uncovered)} directions not sign-stable at covering angle {rho:.3g}; "
                f"refining would go below net_angle={net_angle}", uncovered)
        level += 1

    pts = _dedupe(manifold, chosen)
    extra = 0
    k = 0
    while rank_c1(basis.matrix(pts)) < d:
        pts.append(random_points(manifold, 1, rng_for(seed, "cover_fill", k))[0])
        extra += 1
        k += 1
        if k > 10 * d + 100:
            raise SearchFailure("could not reach full rank after the cover")
    cfg = Configuration(manifold, pts, basis, provenance={
        "algorithm": "cover_construct", "seed": seed, "level": level,
        "net_size": int(len(net)), "covering_angle": rho, "extra_points": extra,
        "min_tau": float(min(taus))})
    cfg.net = net
    cfg.recheck()
    return cfg


def _dedupe(manifold, pts):
    out = []
    for p in pts:
        if all(point_distance(manifold, p, q) > DISTINCT_TOL for q in out):
            out.append(p)
    return out


def cover_sound(cfg: Configuration, net: np.ndarray) -> bool:
    """Every net direction has a negative and a positive value among the points."""
    vals = cfg.basis.matrix(cfg.points)  # d x m
    f = net @ vals
    return bool(np.all(f.min(axis=1) < 0) and np.all(f.max(axis=1) > 0))


# ---------------------------------------------------------------------------


def adjoin_point(cfg: Configuration, p, rank_tol: float = RANK_TOL,
                 tol_pos: float = POS_TOL) -> Configuration:
    """Add one point to an admissible configuration, keeping it admissible.

    With rank d the new column c is M x for some x; (a - t x, t) stays in
    the kernel and is positive for t = min(a_i / x_i, x_i > 0) / 2.  The
    result is re-judged by the LP; the explicit vector is kept in the
    provenance.
    """
    rep = cfg.report if cfg.report is not None else cfg.recheck(rank_tol, tol_pos)
    if not rep.verdict:
        raise ValueError("adjoin_point needs an admissible configuration")
    p = as_point(cfg.manifold, p)
    if any(point_distance(cfg.manifold, p, q) <= DISTINCT_TOL for q in cfg.points):
        raise ValueError("adjoined point coincides with an existing point")
    M = rep.matrix
    c = cfg.basis.evaluate(p)
    x = np.linalg.lstsq(M, c, rcond=None)[0]
    a = rep.witness
    pos = x > 0
    t = 0.5 * float(np.min(a[pos] / x[pos])) if pos.any() else float(a.max())
    b = np.append(a - t * x, t)
    b /= b.sum()
    constructed_ok = bool(b.min() >= rep.margin / 4 * min(1.0, 1 / b.size * len(a)) and
                          b.min() > tol_pos)
    new = Configuration(cfg.manifold, list(cfg.points) + [p], cfg.basis, group=cfg.group,
                        provenance={**cfg.provenance, "adjoined": cfg.provenance.get("adjoined", 0) + 1})
    new_rep = new.recheck(rank_tol, tol_pos)
    new_rep.extra["constructed_witness"] = b.tolist()
    new_rep.extra["constructed_ok"] = constructed_ok
    if not new_rep.verdict:
        log.error("adjunction lost admissibility: constructed min %.3e, LP margin %.3e",
                  b.min(), new_rep.margin)
        raise AdjunctionInconsistency(
            "adding a point destroyed admissibility; this contradicts the adjunction argument")
    return new


# ---------------------------------------------------------------------------


def greedy_reduce(cfg: Configuration, seed: int = DEFAULT_SEED) -> Configuration:
    """Drop points one at a time, in random order, while the verdict survives."""
    rng = rng_for(seed, "greedy_reduce")
    pts = list(cfg.points)
    changed = True
    while changed:
        changed = False
        for idx in rng.permutation(len(pts)):
            if len(pts) <= cfg.basis.d + 1:
                break
            trial = pts[:idx] + pts[idx + 1:]
            rep = report_from_matrix(cfg.basis.matrix(trial))
            if rep.verdict:
                pts = trial
                changed = True
                break
    out = Configuration(cfg.manifold, pts, cfg.basis, group=cfg.group,
                        provenance={**cfg.provenance, "reduced_from": cfg.m})
    out.recheck()
    return out


def m0_estimate(basis: KernelBasis, budget: int = 200, seed: int = DEFAULT_SEED,
                seeds: list[Configuration] | None = None) -> tuple[int, Configuration]:
    """Upper bound on the least admissible number of points.

    Candidates come from supplied seed configurations, the cover
    construction and random restarts; each admissible candidate is then
    greedily thinned.  The returned m is never a minimality claim.
    """
    d = basis.d
    candidates = list(seeds or [])
    try:
        candidates.append(cover_construct(basis, seed=seed))
    except (PartialCoverError, SearchFailure) as exc:
        log.info("cover construction gave no candidate: %s", exc)
    sizes = list(range(d + 1, 2 * d + 2))
    for k in range(budget):
        m = sizes[k % len(sizes)]
        pts = random_points(basis.manifold, m, rng_for(seed, "m0_restart", k))
        rep = report_from_matrix(basis.matrix(pts))
        if rep.verdict:
            candidates.append(Configuration(basis.manifold, pts, basis, report=rep,
                                            provenance={"algorithm": "random_restart", "try": k}))
    best = None
    for cand in candidates:
        if not cand.admissible:
            continue
        red = greedy_reduce(cand, seed)
        if best is None or red.m < best.m:
            best = red
    if best is None:
        raise SearchFailure("no admissible configuration found")
    if best.m <= d:
        raise AssertionError("an admissible configuration with m <= d is impossible")
    return best.m, best
