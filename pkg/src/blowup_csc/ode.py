"""Radial potential of the scalar-flat metric on the blow-up of C^n at the origin.

The unknown zeta(s) solves

    (1 + s zeta)^{n-1} s^2 zeta' = (1 + s zeta)^{n-1} - 1 - (n-1) s zeta,

with zeta(0) = 1.  Writing x = s zeta, the right side is x^2 P(x) with
P(x) = sum_{k>=2} C(n-1, k) x^{k-2}, so

    zeta' = zeta^2 P(x) / (1 + x)^{n-1},

which is regular at s = 0.  The potential is f = log s + int_0^s zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

S0 = 1e-6
LADDER = (1000.0, 500.0, 300.0, 200.0, 100.0, 50.0, 30.0, 20.0, 10.0)
NOISE_FACTOR = 2000.0


class IntegratorError(RuntimeError):
    pass


def _poly(n: int) -> np.ndarray:
    """Coefficients of P in increasing degree."""
    return np.array([math.comb(n - 1, k) for k in range(2, n)], dtype=float)


def zeta_rhs(n: int):
    coeffs = _poly(n)

    def rhs(s, zeta):
        if coeffs.size == 0:
            return 0.0
        x = s * zeta
        p = np.polyval(coeffs[::-1], x)
        return zeta * zeta * p / (1.0 + x) ** (n - 1)

    return rhs


def series_start(n: int, s0: float = S0) -> tuple[float, float]:
    """(zeta, int_0^s zeta) at s0 from the first-order expansion at s = 0."""
    a = 0.5 * (n - 1) * (n - 2)
    return 1.0 + a * s0, s0 * (1.0 + 0.5 * a * s0)


@dataclass
class ZetaTrajectory:
    n: int
    s: np.ndarray
    zeta: np.ndarray
    F: np.ndarray  # int_0^s zeta
    lam: float
    g: np.ndarray | None = None  # f - lam s, integrated directly
    method: str = "DOP853"
    rtol: float = 1e-12
    diagnostics: dict = field(default_factory=dict)

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    @property
    def f(self) -> np.ndarray:
        return np.log(self.s) + self.F


def _solve(fun, y0, t_span, t_eval, method, rtol, atol):
    sol = solve_ivp(fun, t_span, y0, method=method, t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegratorError(f"{method} failed: {sol.message}")
    return sol


def neville(x: np.ndarray, y: np.ndarray, x0: float = 0.0) -> float:
    """Value at x0 of the interpolating polynomial through (x, y)."""
    p = np.array(y, dtype=float)
    x = np.asarray(x, dtype=float)
    k = len(x)
    for level in range(1, k):
        for i in range(k - level):
            j = i + level
            p[i] = ((x0 - x[j]) * p[i] - (x0 - x[i]) * p[i + 1]) / (x[i] - x[j])
    return float(p[0])


def integrate_zeta(n: int, s_max: float = 1000.0, rel_tol: float = 1e-12,
                   method: str = "DOP853", samples: int = 2000, nodes: int = 5,
                   s0: float = S0) -> ZetaTrajectory:
    """Integrate zeta on [s0, s_max] in t = log s and extrapolate lambda.

    lambda is the value at 1/s = 0 of the polynomial in 1/s through zeta at
    ``nodes`` points spread over the last decade below ``s_max``.  A second
    pass integrates g = f - lambda s via dg/dt = s (zeta - lambda) + 1 so
    that the expansion fit never subtracts two large numbers.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if s_max < 100:
        raise ValueError("s_max must be at least 100")
    if rel_tol > 1e-8:
        raise ValueError("rel_tol must be <= 1e-8")
    rhs = zeta_rhs(n)
    z0, F0 = series_start(n, s0)
    t0, t1 = math.log(s0), math.log(s_max)
    node_s = s_max * 10.0 ** (-np.arange(nodes) / (nodes - 1))
    grid = np.unique(np.concatenate([np.linspace(t0, t1, samples), np.log(node_s)]))
    grid[0], grid[-1] = t0, t1
    atol = rel_tol * 1e-3

    def first(t, y):
        s = math.exp(t)
        return [s * rhs(s, y[0]), s * y[0]]

    sol = _solve(first, [z0, F0], (t0, t1), grid, method, rel_tol, atol)
    s = np.exp(sol.t)
    zeta, F = sol.y
    if np.any(zeta <= 0) or np.any(np.diff(zeta) < -1e-10):
        raise IntegratorError("zeta is not positive and nondecreasing")
    idx = np.searchsorted(sol.t, np.log(node_s))
    idx = np.clip(idx, 0, len(s) - 1)
    lam = neville(1.0 / s[idx], zeta[idx]) if n > 2 else float(zeta[-1])
    if not lam > 0:
        raise IntegratorError(f"extrapolated lambda {lam} is not positive")

    g0 = math.log(s0) + F0 - lam * s0

    def second(t, y):
        s_ = math.exp(t)
        return [s_ * rhs(s_, y[0]), s_ * (y[0] - lam) + 1.0]

    sol2 = _solve(second, [z0, g0], (t0, t1), grid, method, rel_tol, atol)
    return ZetaTrajectory(
        n=n, s=s, zeta=zeta, F=F, lam=lam, g=sol2.y[1], method=method, rtol=rel_tol,
        diagnostics={"nfev": int(sol.nfev + sol2.nfev), "s0": s0, "nodes": node_s.tolist(),
                     "atol": atol})


def lambda_dual(n: int, s_max: float = 1000.0) -> dict:
    """lambda from two independent embedded Runge-Kutta pairs at different tolerances."""
    a = integrate_zeta(n, s_max, 1e-12, "DOP853")
    b = integrate_zeta(n, s_max, 1e-10, "RK45")
    return {"primary": a.lam, "oracle": b.lam, "difference": abs(a.lam - b.lam)}


# ---------------------------------------------------------------------------


@dataclass
class PotentialSamples:
    s: np.ndarray
    f: np.ndarray
    zeta: np.ndarray

    def derivative_residual(self) -> float:
        """max relative |df/ds - (zeta + 1/s)| from a cubic spline of f in log s."""
        t = np.log(self.s)
        dfdt = CubicSpline(t, self.f).derivative()(t)
        resid = dfdt / self.s - (self.zeta + 1.0 / self.s)
        return float(np.max(np.abs(resid * self.s) / (1.0 + self.s * self.zeta)))


def reconstruct_potential(traj: ZetaTrajectory) -> PotentialSamples:
    """f = log s + int_0^s zeta, normalised so f - log s -> 0 at s = 0."""
    return PotentialSamples(traj.s.copy(), traj.f, traj.zeta.copy())


# ---------------------------------------------------------------------------


def leading_coefficient(lam: float, n: int, leading: str = "derived") -> float:
    """Coefficient of s^{2-n} in f - lam s - c.

    Integrating the large-s behaviour of zeta gives -lam^{2-n}/(n-2);
    ``leading="reference"`` uses -lam^{2-n}, which agrees only for n = 3.
    """
    if leading == "derived":
        return -lam ** (2 - n) / (n - 2)
    if leading == "reference":
        return -lam ** (2 - n)
    raise ValueError(f"unknown leading-term convention {leading!r}")


@dataclass
class PotentialExpansion:
    n: int
    lam: float
    c: float
    remainder_slope: float
    window: tuple
    leading: str
    leading_coef: float
    k: float
    free_leading_coef: float | None = None

    def to_dict(self):
        return {"n": self.n, "lambda": self.lam, "c": self.c,
                "remainder_slope": self.remainder_slope, "window": list(self.window),
                "leading": self.leading, "leading_coef": self.leading_coef, "k": self.k,
                "free_leading_coef": self.free_leading_coef}


def _lstsq(cols, y):
    A = np.column_stack(cols)
    scale = np.linalg.norm(A, axis=0)
    coef = np.linalg.lstsq(A / scale, y, rcond=None)[0]
    return coef / scale


def expansion_fit(s, f, n: int, lam: float | None = None, leading: str = "derived",
                  window: tuple | None = None, g=None) -> PotentialExpansion:
    """Fit f = lam s + c + a s^{2-n} + k s^{1-n} on a window and measure the remainder decay.

    ``a`` is fixed by ``leading``.  When ``lam`` is None it is first found
    by a free linear fit in (s, 1, s^{2-n}, s^{1-n}).  ``g = f - lam s`` may
    be passed directly when it was computed without cancellation.  The
    remainder slope is the log-log slope of |f - lam s - c - a s^{2-n}|.
    """
    if n < 3:
        raise ValueError("expansion_fit needs n >= 3")
    s = np.asarray(s, dtype=float)
    f = np.asarray(f, dtype=float)
    lo, hi = window if window is not None else (s[-1] / 10, s[-1])
    mask = (s >= lo * (1 - 1e-12)) & (s <= hi * (1 + 1e-12))
    if mask.sum() < 8 or hi / lo < 2:
        raise ValueError(f"fit window [{lo}, {hi}] is too short")
    sw = s[mask]
    free = None
    if lam is None:
        coef = _lstsq([sw, np.ones_like(sw), sw ** (2 - n), sw ** (1 - n)], f[mask])
        lam, free = float(coef[0]), float(coef[2])
    gw = (f[mask] - lam * sw) if g is None else np.asarray(g, dtype=float)[mask]
    if free is None:
        free = float(_lstsq([np.ones_like(sw), sw ** (2 - n), sw ** (1 - n)], gw)[1])
    a = leading_coefficient(lam, n, leading)
    r = gw - a * sw ** (2 - n)
    c, k = _lstsq([np.ones_like(sw), sw ** (1 - n)], r)
    tail = np.abs(r - c)
    good = tail > 0
    slope = float(np.polyfit(np.log(sw[good]), np.log(tail[good]), 1)[0])
    return PotentialExpansion(n, float(lam), float(c), slope, (float(lo), float(hi)), leading,
                              float(a), float(k), free)


def fit_window(traj: ZetaTrajectory, leading: str = "derived") -> tuple:
    """Largest decade [hi/10, hi] whose remainder stays above the round-off floor."""
    n, lam = traj.n, traj.lam
    eps = np.finfo(float).eps
    cands = [h for h in LADDER if h <= traj.s_max * (1 + 1e-12)]
    for hi in cands:
        fit = expansion_fit(traj.s, traj.f, n, lam, leading, (hi / 10, hi), g=traj.g)
        if abs(fit.k) * hi ** (1 - n) >= NOISE_FACTOR * eps * lam * hi:
            return hi / 10, hi
    return cands[-1] / 10, cands[-1]


def fit_trajectory(traj: ZetaTrajectory, leading: str = "derived") -> PotentialExpansion:
    return expansion_fit(traj.s, traj.f, traj.n, traj.lam, leading,
                         fit_window(traj, leading), g=traj.g)


def scale_factor(a_tilde: float, n: int) -> float:
    """(2^{2-n} a)^{1/(n-1)}: rescaling that makes the |u|^{4-2n} (n >= 3) or
    log |u|^2 (n = 2) coefficient of the rescaled potential equal to -a resp. a."""
    if not a_tilde > 0:
        raise ValueError("a_tilde must be positive")
    if n < 2:
        raise ValueError("n must be >= 2")
    return (2.0 ** (2 - n) * a_tilde) ** (1.0 / (n - 1))
