"""Biharmonic extensions in R^{2n}, one spherical-harmonic degree at a time.

For a degree-gamma harmonic Y and radial power r^p,

    Lap(r^p Y) = (p - gamma)(p + gamma + 2n - 2) r^(p-2) Y,

so the bounded solutions of Lap^2 H = 0 in the ball are spanned by r^gamma Y
and r^(gamma+2) Y, and the decaying ones outside by r^(2-2n-gamma) Y and
r^(4-2n-gamma) Y.  Boundary data (h, k) are the coefficients of Y in the
trace of H and of Lap H on the unit sphere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import mpmath
import numpy as np

log = logging.getLogger(__name__)


class MeanZeroViolation(ValueError):
    pass


class SingularCauchyMap(RuntimeError):
    pass


def lap_factor(p, gamma: int, n: int):
    """Lap(r^p Y_gamma) = lap_factor * r^(p-2) Y_gamma in R^{2n}."""
    return (p - gamma) * (p + gamma + 2 * n - 2)


def mu(gamma: int, n: int) -> float:
    """Lap(r^(gamma+2) Y) = mu r^gamma Y."""
    return lap_factor(gamma + 2, gamma, n)


def nu(gamma: int, n: int) -> float:
    """Lap(r^(4-2n-gamma) Y) = nu r^(2-2n-gamma) Y; zero only for n = 2, gamma = 0."""
    return lap_factor(4 - 2 * n - gamma, gamma, n)


@dataclass(frozen=True)
class ModeData:
    gamma: int
    n: int
    h: float
    k: float

    def __post_init__(self):
        if self.gamma < 0 or int(self.gamma) != self.gamma:
            raise ValueError("gamma must be a nonnegative integer")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    def combine(self, a: float, other: "ModeData", b: float) -> "ModeData":
        if (self.gamma, self.n) != (other.gamma, other.n):
            raise ValueError("modes differ")
        return ModeData(self.gamma, self.n, a * self.h + b * other.h, a * self.k + b * other.k)


@dataclass(frozen=True)
class RadialSolution:
    """(c1 r^e1 + c2 r^e2) Y_gamma on r <= 1 (inner) or r >= 1 (outer)."""

    side: str
    gamma: int
    n: int
    exponents: tuple
    coeffs: tuple

    def profile(self, r):
        (e1, e2), (c1, c2) = self.exponents, self.coeffs
        return c1 * r ** e1 + c2 * r ** e2

    def d_profile(self, r):
        (e1, e2), (c1, c2) = self.exponents, self.coeffs
        return c1 * e1 * r ** (e1 - 1) + c2 * e2 * r ** (e2 - 1)

    def lap_profile(self, r):
        """Radial factor of Lap H."""
        out = 0.0
        for e, c in zip(self.exponents, self.coeffs):
            out = out + c * lap_factor(e, self.gamma, self.n) * r ** (e - 2)
        return out

    def d_lap_profile(self, r):
        out = 0.0
        for e, c in zip(self.exponents, self.coeffs):
            out = out + c * lap_factor(e, self.gamma, self.n) * (e - 2) * r ** (e - 3)
        return out

    def cauchy(self, r: float = 1.0) -> np.ndarray:
        """(value, d/dr, Lap, d/dr Lap) of the radial factors at r."""
        return np.array([self.profile(r), self.d_profile(r), self.lap_profile(r),
                         self.d_lap_profile(r)], dtype=float)

    def trace(self) -> tuple:
        c = self.cauchy(1.0)
        return float(c[0]), float(c[2])

    def __call__(self, x):
        """Value at a point of R^{2n}, with Y = Re((x1 + i x2)^gamma) / r^gamma."""
        return evaluate_mode(self, x)

    def dominant_exponent(self, tol: float = 0.0):
        live = [e for e, c in zip(self.exponents, self.coeffs) if abs(c) > tol]
        if not live:
            return None
        return max(live) if self.side == "outer" else min(live)


def harmonic(gamma: int, x):
    """Re((x1 + i x2)^gamma): a degree-gamma harmonic polynomial in any dimension >= 2."""
    return ((x[0] + 1j * x[1]) ** gamma).real if not isinstance(x[0], mpmath.mpf) \
        else mpmath.re(mpmath.mpc(x[0], x[1]) ** gamma)


def evaluate_mode(sol: RadialSolution, x):
    """(sum c r^(e - gamma)) * harmonic polynomial, evaluated in the arithmetic of x."""
    if isinstance(x[0], mpmath.mpf):
        r = mpmath.sqrt(mpmath.fsum(v * v for v in x))
    else:
        r = float(np.sqrt(np.sum(np.asarray(x, dtype=float) ** 2)))
    g = sol.gamma
    radial = sum(c * r ** (e - g) for e, c in zip(sol.exponents, sol.coeffs))
    return radial * harmonic(g, x)


def inner_extension_mode(md: ModeData) -> RadialSolution:
    m = mu(md.gamma, md.n)
    c2 = md.k / m
    return RadialSolution("inner", md.gamma, md.n, (md.gamma, md.gamma + 2), (md.h - c2, c2))


def outer_extension_mode(md: ModeData) -> RadialSolution:
    g, n = md.gamma, md.n
    if g == 0 and md.k != 0:
        raise MeanZeroViolation(f"the degree-0 outer extension needs k = 0, got k = {md.k}")
    v = nu(g, n)
    d2 = 0.0 if g == 0 else md.k / v
    return RadialSolution("outer", g, n, (2 - 2 * n - g, 4 - 2 * n - g), (md.h - d2, d2))


def decay_certificate(sol: RadialSolution, r_max: float = 1e6, samples: int = 200) -> dict:
    """Check |H| <= C r^bound on r >= 1 with bound 3-2n (gamma >= 1) or 2-2n (gamma = 0)."""
    if sol.side != "outer":
        raise ValueError("decay certificate applies to outer solutions")
    bound = 2 - 2 * sol.n if sol.gamma == 0 else 3 - 2 * sol.n
    r = np.geomspace(1.0, r_max, samples)
    ratio = np.abs(sol.profile(r)) / r ** bound
    C = float(sum(abs(c) for c in sol.coeffs))
    dom = sol.dominant_exponent()
    ok = (dom is None or dom <= bound) and bool(np.all(ratio <= C * (1 + 1e-12) + 1e-300))
    return {"bound": bound, "dominant_exponent": dom, "constant": C, "passed": bool(ok)}


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyMap:
    gamma: int
    n: int
    matrix: np.ndarray
    restricted: bool

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def cond(self) -> float:
        return float(np.linalg.cond(self.matrix))


def poisson_map_mode(gamma: int, n: int) -> CauchyMap:
    """(h, k) -> (d/dr (H^o - H^i), d/dr Lap (H^o - H^i)) at r = 1.

    For gamma = 0 the outer extension only exists for k = 0, so the map is
    restricted to that line: a 1x1 matrix acting on h.
    """
    if gamma == 0:
        return CauchyMap(0, n, np.array([[2.0 - 2 * n]]), True)
    cols = []
    for h, k in ((1.0, 0.0), (0.0, 1.0)):
        md = ModeData(gamma, n, h, k)
        diff = outer_extension_mode(md).cauchy() - inner_extension_mode(md).cauchy()
        cols.append([diff[1], diff[3]])
    return CauchyMap(gamma, n, np.array(cols).T, False)


def radial_fundamental(n: int) -> np.ndarray:
    """Cauchy data at r = 1 of |z|^(4-2n) (n >= 3) or -log |z|^2 (n = 2)."""
    if n == 2:
        # -2 log r in R^4: Lap = -4 r^-2
        return np.array([0.0, -2.0, -4.0, 8.0])
    p = 4 - 2 * n
    lf = lap_factor(p, 0, n)
    return np.array([1.0, p, lf, lf * (p - 2)])


@dataclass
class MatchResult:
    gamma: int
    n: int
    inner: tuple
    outer: tuple
    radial_shift: float
    residual: float


def match_mode(gamma: int, n: int, jump_h: float, jump_dh: float, jump_lap: float,
               jump_dlap: float) -> MatchResult:
    """Boundary data cancelling the Cauchy-data jumps of the model parts at r = 1.

    With jumps J = Cauchy(outer model - inner model), the unknowns satisfy
    Cauchy(H^o + shift * Phi - H^i) = -J.  Values and Laplacians fix the
    outer data in terms of the inner data; the two radial derivatives are
    solved through the Cauchy map.  ``shift`` multiplies the radial
    fundamental solution Phi and is nonzero only for gamma = 0, where the
    outer extension cannot carry a Laplacian trace.
    """
    J = np.array([jump_h, jump_dh, jump_lap, jump_dlap], dtype=float)
    P = poisson_map_mode(gamma, n)
    if abs(P.det) < 1e-12:
        log.error("Cauchy map singular for gamma=%d, n=%d", gamma, n)
        raise SingularCauchyMap(f"Cauchy map singular at gamma={gamma}, n={n}")
    shift = 0.0
    if gamma == 0:
        phi = radial_fundamental(n)
        shift = -J[3] / phi[3]
        k_in = shift * phi[2] + J[2]
        m0 = mu(0, n)
        # d/dr: (2-2n) h_out + shift phi1 - 2 k_in / mu = -J1
        h_out = (-J[1] - shift * phi[1] + 2 * k_in / m0) / P.matrix[0, 0]
        h_in = h_out + shift * phi[0] + J[0]
        inner, outer = (h_in, k_in), (h_out, 0.0)
    else:
        # outer = inner - (J_h, J_lap); derivative rows through P
        offset = ModeData(gamma, n, -J[0], -J[2])
        oc = outer_extension_mode(offset).cauchy()
        rhs = np.array([-J[1] - oc[1], -J[3] - oc[3]])
        h_in, k_in = np.linalg.solve(P.matrix, rhs)
        inner, outer = (float(h_in), float(k_in)), (float(h_in - J[0]), float(k_in - J[2]))
    res = match_residual(gamma, n, inner, outer, shift, J)
    return MatchResult(gamma, n, (float(inner[0]), float(inner[1])),
                       (float(outer[0]), float(outer[1])), float(shift), res)


def match_residual(gamma, n, inner, outer, shift, jumps) -> float:
    Hi = inner_extension_mode(ModeData(gamma, n, *inner)).cauchy()
    Ho = outer_extension_mode(ModeData(gamma, n, *outer)).cauchy()
    total = Ho - Hi + np.asarray(jumps, dtype=float)
    if gamma == 0:
        total = total + shift * radial_fundamental(n)
    return float(np.max(np.abs(total)))


def jumps_of_pair(gamma: int, n: int, inner: tuple, outer: tuple, shift: float = 0.0) -> np.ndarray:
    """Jumps that ``match_mode`` must map back to the given pair."""
    Hi = inner_extension_mode(ModeData(gamma, n, *inner)).cauchy()
    Ho = outer_extension_mode(ModeData(gamma, n, *outer)).cauchy()
    c = Ho - Hi
    if gamma == 0:
        c = c + shift * radial_fundamental(n)
    return -c


def reparameterize(a: float, a_tilde: float, eps: float, n: int) -> tuple[float, float]:
    """Offsets of (h, k) absorbing the change of the radial model coefficient.

    They are shift * (Phi(1), Lap Phi(1)) with shift = (a_tilde - a) eps^(2n-2) r^(4-2n):
    (shift, 2(4-2n) shift) for n >= 3 and (0, -4 shift) for n = 2, where
    Phi = -log |z|^2 has zero trace on the unit sphere.
    """
    from .ledger import glue_radii

    r = glue_radii(eps, n).r
    shift = (a_tilde - a) * eps ** (2 * n - 2) * r ** (4 - 2 * n)
    phi = radial_fundamental(n)
    return float(shift * phi[0]), float(shift * phi[2])


# ---------------------------------------------------------------------------
# finite-difference oracle


def _mp_point(x):
    return [mpmath.mpf(float(v)) if not isinstance(v, mpmath.mpf) else v for v in x]


def fd_laplacian(func, x, h=1e-3, dps: int = 40):
    """Second-order central-difference Laplacian, Richardson-extrapolated in h."""
    with mpmath.workdps(dps):
        x = _mp_point(x)
        h = mpmath.mpf(h)

        def lap(step):
            f0 = func(x)
            acc = mpmath.mpf(0)
            for i in range(len(x)):
                xp, xm = list(x), list(x)
                xp[i] += step
                xm[i] -= step
                acc += func(xp) - 2 * f0 + func(xm)
            return acc / step ** 2

        return (4 * lap(h / 2) - lap(h)) / 3


def fd_bilaplacian(func, x, h=1e-3, dps: int = 40):
    """Nested central-difference Lap^2, Richardson-extrapolated in h."""
    with mpmath.workdps(dps):
        x = _mp_point(x)
        h = mpmath.mpf(h)

        def lap_of(g, step):
            def inner(y):
                g0 = g(y)
                acc = mpmath.mpf(0)
                for i in range(len(y)):
                    yp, ym = list(y), list(y)
                    yp[i] += step
                    ym[i] -= step
                    acc += g(yp) - 2 * g0 + g(ym)
                return acc / step ** 2
            return inner

        def bilap(step):
            return lap_of(lap_of(func, step), step)(x)

        return (4 * bilap(h / 2) - bilap(h)) / 3


def biharmonic_residual(sol: RadialSolution, x, h: float = 1e-3) -> float:
    """|Lap^2 H(x)| scaled by max(1, |H(x)| / |x|^4)."""
    with mpmath.workdps(40):
        xm = _mp_point(x)
        val = fd_bilaplacian(lambda y: evaluate_mode(sol, y), xm, h)
        r = mpmath.sqrt(mpmath.fsum(v * v for v in xm))
        scale = max(mpmath.mpf(1), abs(evaluate_mode(sol, xm)) / r ** 4)
        return float(abs(val) / scale)


def sample_points(sol: RadialSolution, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random points in the validity region, away from r = 0 and with |x| in [0.2, 0.9] or [1.1, 5]."""
    dim = 2 * sol.n
    dirs = rng.standard_normal((count, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    lo, hi = (0.2, 0.9) if sol.side == "inner" else (1.1, 5.0)
    radii = rng.uniform(lo, hi, count)
    return dirs * radii[:, None]
