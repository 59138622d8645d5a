"""Reference values derived independently of the package code.

Closed forms are written out by hand here; floating point constants were
frozen from high-accuracy runs and cross-checked against a second method
where noted.
"""

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
from scipy.optimize import linprog


def bidiagonal(n: int) -> np.ndarray:
    """(|z_a|^2 - |z_{a+1}|^2) at the coordinate points e_0..e_n."""
    M = np.zeros((n, n + 1))
    for a in range(n):
        M[a, a] = 1.0
        M[a, a + 1] = -1.0
    return M


def sum_pairs_row(n: int, alpha: float) -> np.ndarray:
    return np.array([[n, n * (n - 1 - 2 * alpha) / (n + alpha ** 2)]])


def c_n(n: int) -> float:
    # 2 vol(S^3) for n = 2, 4 (n-2)(n-1) vol(S^{2n-1}) otherwise
    vol = lambda k: 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)
    return 2 * vol(3) if n == 2 else 4 * (n - 2) * (n - 1) * vol(2 * n - 1)


C_N = {2: 4 * math.pi ** 2, 3: 8 * math.pi ** 3}

# extrapolated lambda; DOP853 at rtol 1e-12 and RK45 at 1e-10 agree to 3e-11
LAMBDA = {3: 2.365094270741688, 4: 4.500138943724762, 5: 7.452700642275176,
          6: 11.255732963227603}
LAMBDA_TOL = 1e-8

EX6_WITNESS = np.array([1.0, 1.0, 1.0, 5.0 / 3.0])


def hp_margin(M: np.ndarray) -> float:
    """max t s.t. M a = 0, sum a = 1, a_i >= t, by HiGHS."""
    d, m = M.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((d + 1, m + 1))
    A_eq[:d, :m] = M
    A_eq[d, :m] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(None, None)] * (m + 1), method="highs")
    return -math.inf if res.status == 2 else float(-res.fun)


# ---------------------------------------------------------------------------
# exponent bookkeeping: r = eps^rho, R = eps^kappa


def rho(n):
    return F(2 * n - 1, 2 * n + 1)


def kappa(n):
    return F(-2, 2 * n + 1)


def ledger_gaps(n: int, delta: F, delta_model: F = F(1, 2)) -> dict:
    p, k = rho(n), kappa(n)
    dm = delta_model
    return {
        "i.a": (2 * n - 2) + p * (6 - 4 * n - delta),
        "i.b": (2 * n - 2) * (1 - p),
        "ii": min(5 * p, (4 * n - 4) + p * (10 - 6 * n - delta)) - 4 * p,
        "iii": p * (5 - 2 * n - delta),
        "iv.a": k * (2 - 2 * n) - k * (3 - 2 * n - dm),
        "iv.b": k * (4 - 4 * n) - k * (3 - 2 * n - dm),
        "iv.c": k * (3 - 2 * n - dm),
    }


def window_midpoint(n: int) -> F:
    return F(1, 3) if n == 2 else F(9 - 4 * n, 2)
