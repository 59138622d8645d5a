"""The admissibility matrix, its rank and the positive-kernel linear program.

A configuration p_1..p_m is admissible when the d x m matrix of kernel
values xi_j(p_l) has full row rank d and its kernel meets the open positive
cone.  The second condition is decided by the LP

    maximise t  subject to  M a = 0,  sum(a) = 1,  a_i >= t,

whose optimum t* is positive exactly when a strictly positive kernel vector
exists.  t* doubles as a margin: it is continuous in the points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svd

from .kernel import (KernelBasis, ModelManifold, SymmetryGroup, as_points, point_key)
from .simplex import LPSolverError, solve_standard_form

RANK_TOL = 1e-9
POS_TOL = 1e-9


class OverlappingOrbitsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AdmissibilityMatrix:
    entries: np.ndarray
    basis: KernelBasis | None = None
    points: tuple = ()

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


@dataclass
class AdmissibilityReport:
    c1: int
    d: int
    m: int
    c2_positive: bool
    witness: np.ndarray | None
    margin: float
    a0: float | None
    cn: float | None
    matrix: np.ndarray
    marginal: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def kernel_dim(self) -> int:
        return self.m - self.c1

    @property
    def verdict(self) -> bool:
        return self.c1 == self.d and self.c2_positive

    @property
    def status(self) -> str:
        if self.verdict:
            return "admissible"
        if self.marginal and self.c1 == self.d:
            return "marginal"
        return "not-admissible"

    def to_dict(self) -> dict:
        return {
            "c1": self.c1,
            "d": self.d,
            "kernel_dim": self.kernel_dim,
            "c2": bool(self.c2_positive),
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "margin": _json_float(self.margin),
            "a0": self.a0,
            "cn": self.cn,
            "verdict": self.status,
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }


def _json_float(x: float):
    if x is None or math.isfinite(x):
        return x
    return "-inf" if x < 0 else "inf"


def build_matrix(basis: KernelBasis, points) -> AdmissibilityMatrix:
    pts = as_points(basis.manifold, points)
    if not pts:
        raise ValueError("need at least one point")
    return AdmissibilityMatrix(basis.matrix(pts), basis, tuple(pts))


def _entries(M) -> np.ndarray:
    return M.entries if isinstance(M, AdmissibilityMatrix) else np.atleast_2d(np.asarray(M, dtype=float))


def rank_c1(M, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    a = _entries(M)
    if a.size == 0:
        return 0
    sv = svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def _row_space(a: np.ndarray, tol: float) -> np.ndarray:
    if a.size == 0:
        return np.zeros((0, a.shape[1]))
    _, sv, vt = svd(a)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((0, a.shape[1]))
    r = int(np.sum(sv > tol * sv[0]))
    return vt[:r]


def max_min_kernel_vector(M, rank_tol: float = RANK_TOL):
    """Solve max t s.t. M a = 0, sum a = 1, a_i >= t.  Returns (t*, a) or (-inf, None).

    The equality rows are replaced by an orthonormal basis of the numerical
    row space of M, which has the same kernel and removes redundant rows.
    Variables: a = s + t*1 with s >= 0 and t = t_plus - t_minus.
    """
    a = _entries(M)
    m = a.shape[1]
    Q = _row_space(a, rank_tol)
    r = Q.shape[0]
    ones = np.ones(m)
    A = np.zeros((r + 1, m + 2))
    A[:r, :m] = Q
    A[:r, m] = Q @ ones
    A[:r, m + 1] = -(Q @ ones)
    A[r, :m] = 1.0
    A[r, m] = m
    A[r, m + 1] = -m
    b = np.zeros(r + 1)
    b[r] = 1.0
    c = np.zeros(m + 2)
    c[m], c[m + 1] = 1.0, -1.0
    res = solve_standard_form(c, A, b)
    if res.status == "infeasible":
        return -np.inf, None
    if res.status != "optimal":
        raise LPSolverError(f"positive-kernel LP ended with status {res.status}")
    t = res.x[m] - res.x[m + 1]
    vec = res.x[:m] + t
    return float(t), vec


def positive_kernel_c2(M, tol_pos: float = POS_TOL, rank_tol: float = RANK_TOL):
    """(c2_positive, witness or None, margin t*)."""
    t, vec = max_min_kernel_vector(M, rank_tol)
    if t > tol_pos:
        return True, vec, t
    return False, vec, t


def sphere_volume(k: int) -> float:
    """Volume of the unit sphere S^k in R^{k+1}."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def c_n(n: int) -> float:
    if n < 2:
        raise ValueError(f"c_n is defined for n >= 2, got {n}")
    if n == 2:
        return 2 * sphere_volume(3)
    return 4 * (n - 2) * (n - 1) * sphere_volume(2 * n - 1)


def coefficients(a, n: int) -> tuple[float, float]:
    """(a0, c_n) with a0 = c_n * sum(a)."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("coefficients need a strictly positive vector")
    cn = c_n(n)
    return cn * float(a.sum()), cn


def report_from_matrix(M, n: int | None = None, rank_tol: float = RANK_TOL,
                       tol_pos: float = POS_TOL) -> AdmissibilityReport:
    a = _entries(M)
    c1 = rank_c1(a, rank_tol)
    ok, vec, t = positive_kernel_c2(a, tol_pos, rank_tol)
    a0 = cn = None
    if ok and n is not None and n >= 2:
        a0, cn = coefficients(vec, n)
    return AdmissibilityReport(
        c1=c1, d=a.shape[0], m=a.shape[1], c2_positive=ok,
        witness=vec if ok else None, margin=t, a0=a0, cn=cn, matrix=a,
        marginal=bool(abs(t) <= tol_pos),
    )


def check(manifold: ModelManifold | None, basis: KernelBasis, points, rank_tol: float = RANK_TOL,
          tol_pos: float = POS_TOL) -> AdmissibilityReport:
    """Full admissibility test of ``points`` against ``basis``.

    The verdict is admissible iff rank = d and t* > tol_pos; |t*| <= tol_pos
    is reported as marginal.
    """
    manifold = manifold or basis.manifold
    M = build_matrix(basis, points)
    rep = report_from_matrix(M, manifold.complex_dim, rank_tol, tol_pos)
    if rep.c2_positive:
        verify_witness(rep)
    return rep


def verify_witness(rep: AdmissibilityReport) -> None:
    a = rep.witness
    resid = float(np.max(np.abs(rep.matrix @ a))) if rep.matrix.size else 0.0
    bound = 1e-9 * (1.0 + np.linalg.norm(rep.matrix, 2))
    if resid >= bound or a.min() < rep.margin - 1e-12 or abs(a.sum() - 1.0) > 1e-9:
        raise LPSolverError(
            f"witness failed post-check: residual {resid:.3e}, min {a.min():.3e}, sum {a.sum():.12f}")


@dataclass
class EquivariantReport:
    reduced: AdmissibilityReport
    full: AdmissibilityReport
    orbit_sizes: list
    consistent: bool

    @property
    def verdict(self) -> bool:
        return self.reduced.verdict


def equivariant_check(basis: KernelBasis, group: SymmetryGroup, representatives,
                      invariant_basis: KernelBasis | None = None, rank_tol: float = RANK_TOL,
                      tol_pos: float = POS_TOL) -> EquivariantReport:
    """Admissibility over the invariant sub-basis, one orbit-weighted column per orbit.

    Cross-checked against the full basis on the orbit-expanded point list:
    a positive kernel vector of the reduced matrix spread uniformly over
    each orbit lies in the kernel of the full matrix, and averaging a positive
    full kernel vector over the group gives one that is constant on orbits.
    ``consistent`` records that both positivity decisions agree and that the
    expanded reduced witness is a kernel vector of the full matrix.  Full
    rank is not expected on the full basis.
    """
    from .kernel import invariant_subbasis

    manifold = basis.manifold
    reps = as_points(manifold, representatives)
    inv = invariant_basis if invariant_basis is not None else invariant_subbasis(basis, group)
    orbits = [group.orbit(p) for p in reps]
    seen = {}
    for k, orb in enumerate(orbits):
        for q in orb:
            key = point_key(manifold, q)
            if key in seen:
                raise OverlappingOrbitsError(f"orbits of representatives {seen[key]} and {k} overlap")
            seen[key] = k
    sizes = [len(o) for o in orbits]
    reduced = inv.matrix(reps) * np.asarray(sizes, dtype=float)
    red_rep = report_from_matrix(reduced, manifold.complex_dim, rank_tol, tol_pos)
    if red_rep.c2_positive:
        verify_witness(red_rep)
    expanded = [q for orb in orbits for q in orb]
    full_rep = report_from_matrix(basis.matrix(expanded), manifold.complex_dim, rank_tol, tol_pos)
    consistent = red_rep.c2_positive == full_rep.c2_positive
    if red_rep.c2_positive:
        spread = np.concatenate([np.full(s, w) for s, w in zip(sizes, red_rep.witness)])
        spread /= spread.sum()
        resid = np.max(np.abs(full_rep.matrix @ spread))
        consistent = consistent and resid < 1e-9 * (1 + np.linalg.norm(full_rep.matrix, 2))
    return EquivariantReport(red_rep, full_rep, sizes, bool(consistent))
