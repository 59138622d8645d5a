"""scikit-learn style wrappers.

``KernelFeatures`` maps points to kernel-function values, ``AdmissibilityEstimator``
judges configurations and ``SimancaPotential`` fits the radial potential.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .admissibility import POS_TOL, RANK_TOL, check
from .kernel import (KernelBasis, ModelManifold, SymmetryGroup, as_points, invariant_subbasis,
                     kernel_basis)
from .ode import fit_trajectory, integrate_zeta


def check_manifold(manifold) -> ModelManifold:
    if isinstance(manifold, ModelManifold):
        return manifold
    if isinstance(manifold, (int, np.integer)):
        return ModelManifold.projective(int(manifold))
    if isinstance(manifold, (dict, list)):
        return ModelManifold.from_dict(manifold)
    raise TypeError(f"cannot interpret {manifold!r} as a model manifold")


def check_points(X, manifold: ModelManifold) -> list:
    """Points as a list of per-factor tuples; a 2-D complex array is read row-wise."""
    if isinstance(X, np.ndarray) and X.ndim == 2 and len(manifold.factors) == 1:
        X = list(X)
    pts = as_points(manifold, X)
    if not pts:
        raise ValueError("need at least one point")
    return pts


def _resolve_basis(manifold, group, basis, seed):
    if basis is not None:
        return basis
    full = kernel_basis(manifold)
    if group is None:
        return full
    if not isinstance(group, SymmetryGroup):
        group = SymmetryGroup.from_dict(manifold, group)
    return invariant_subbasis(full, group, seed=seed)


class KernelFeatures(TransformerMixin, BaseEstimator):
    """Rows of kernel-function values, one row per point."""

    def __init__(self, manifold=1, group=None, basis: KernelBasis | None = None, seed: int = 0):
        self.manifold = manifold
        self.group = group
        self.basis = basis
        self.seed = seed

    def fit(self, X=None, y=None):
        self.manifold_ = check_manifold(self.manifold)
        self.basis_ = _resolve_basis(self.manifold_, self.group, self.basis, self.seed)
        self.n_features_out_ = self.basis_.d
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        return self.basis_.matrix(check_points(X, self.manifold_)).T

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        return np.array(self.basis_.labels, dtype=object)


class AdmissibilityEstimator(BaseEstimator):
    """Fits one configuration; predicts verdicts and margins for others."""

    def __init__(self, manifold=1, group=None, basis: KernelBasis | None = None,
                 rank_tol: float = RANK_TOL, tol_pos: float = POS_TOL, seed: int = 0):
        self.manifold = manifold
        self.group = group
        self.basis = basis
        self.rank_tol = rank_tol
        self.tol_pos = tol_pos
        self.seed = seed

    def _judge(self, X):
        return check(self.manifold_, self.basis_, check_points(X, self.manifold_),
                     self.rank_tol, self.tol_pos)

    def fit(self, X, y=None):
        self.manifold_ = check_manifold(self.manifold)
        self.basis_ = _resolve_basis(self.manifold_, self.group, self.basis, self.seed)
        self.report_ = self._judge(X)
        self.witness_ = self.report_.witness
        self.margin_ = self.report_.margin
        self.verdict_ = self.report_.verdict
        return self

    def decision_function(self, configurations):
        check_is_fitted(self, "basis_")
        return np.array([self._judge(X).margin for X in configurations])

    def predict(self, configurations):
        check_is_fitted(self, "basis_")
        return np.array([self._judge(X).verdict for X in configurations])


class SimancaPotential(BaseEstimator):
    """Radial potential f_n(s): spline on the integrated range, expansion beyond it."""

    def __init__(self, n: int = 3, s_max: float = 1000.0, rel_tol: float = 1e-12,
                 leading: str = "derived"):
        self.n = n
        self.s_max = s_max
        self.rel_tol = rel_tol
        self.leading = leading

    def fit(self, X=None, y=None):
        self.trajectory_ = integrate_zeta(self.n, self.s_max, self.rel_tol)
        self.lambda_ = self.trajectory_.lam
        if self.n >= 3:
            self.expansion_ = fit_trajectory(self.trajectory_, self.leading)
            self.c_ = self.expansion_.c
        else:
            self.expansion_ = None
            self.c_ = 0.0
        t = np.log(self.trajectory_.s)
        self._spline = CubicSpline(t, self.trajectory_.F)
        return self

    def predict(self, s):
        check_is_fitted(self, "trajectory_")
        s = np.asarray(s, dtype=float)
        if np.any(s <= 0):
            raise ValueError("s must be positive")
        out = np.empty_like(s)
        s0, s1 = self.trajectory_.s[0], self.trajectory_.s_max
        inside = (s >= s0) & (s <= s1)
        out[inside] = np.log(s[inside]) + self._spline(np.log(s[inside]))
        low = s < s0
        a = 0.5 * (self.n - 1) * (self.n - 2)
        out[low] = np.log(s[low]) + s[low] * (1 + 0.5 * a * s[low])
        high = s > s1
        if np.any(high):
            sh = s[high]
            if self.expansion_ is None:
                out[high] = np.log(sh) + sh
            else:
                e = self.expansion_
                out[high] = (e.lam * sh + e.c + e.leading_coef * sh ** (2 - self.n)
                             + e.k * sh ** (1 - self.n))
        return out
