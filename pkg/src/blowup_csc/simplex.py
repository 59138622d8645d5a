"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Sized for the small LPs of the admissibility test (a few dozen rows and
columns).  The pivot sequence is fully deterministic, so repeated solves of
the same problem give bitwise identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
COST_TOL = 1e-11


class LPSolverError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float
    iterations: int


class _Tableau:
    def __init__(self, A, b, basis):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)
        self.iterations = 0

    @property
    def rows(self):
        return self.T.shape[0] - 1

    def set_objective(self, c):
        # last row stores reduced costs of "maximize c.x" as -c + c_B B^-1 A
        n = self.T.shape[1] - 1
        self.T[-1, :] = 0.0
        self.T[-1, :n] = -c
        for i, j in enumerate(self.basis):
            if c[j] != 0.0:
                self.T[-1, :] += c[j] * self.T[i, :]

    def pivot(self, row, col):
        self.T[row, :] /= self.T[row, col]
        for i in range(self.T.shape[0]):
            if i != row and self.T[i, col] != 0.0:
                self.T[i, :] -= self.T[i, col] * self.T[row, :]
        self.basis[row] = col
        self.iterations += 1

    def run(self, allowed, max_iter):
        """Optimise the current objective over columns in ``allowed`` (Bland's rule)."""
        while True:
            if self.iterations > max_iter:
                raise LPSolverError(
                    f"simplex exceeded {max_iter} pivots; basis={self.basis}")
            red = self.T[-1, :-1]
            entering = next((j for j in allowed if red[j] < -COST_TOL), None)
            if entering is None:
                return "optimal"
            col = self.T[:-1, entering]
            ratios = []
            for i in range(self.rows):
                if col[i] > PIVOT_TOL:
                    ratios.append((self.T[i, -1] / col[i], self.basis[i], i))
            if not ratios:
                return "unbounded"
            best = min(r[0] for r in ratios)
            # Bland: among ties take the leaving variable with smallest index
            ties = [r for r in ratios if r[0] <= best + 1e-12 * max(1.0, abs(best))]
            _, _, row = min(ties, key=lambda r: r[1])
            self.pivot(row, entering)


def solve_standard_form(c, A, b, max_iter: int | None = None) -> LPResult:
    """Maximise ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 100
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: artificials n..n+m-1 start basic
    A1 = np.hstack([A, np.eye(m)])
    tab = _Tableau(A1, b, range(n, n + m))
    c1 = np.zeros(n + m)
    c1[n:] = -1.0
    tab.set_objective(c1)
    tab.run(list(range(n + m)), max_iter)
    infeas = -tab.T[-1, -1]
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if infeas > 1e-9 * scale:
        return LPResult("infeasible", None, -np.inf, tab.iterations)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep_rows = []
    for i in range(m):
        j = tab.basis[i]
        if j < n:
            keep_rows.append(i)
            continue
        row = tab.T[i, :n]
        cand = next((k for k in range(n) if abs(row[k]) > 1e-9), None)
        if cand is None:
            continue
        tab.pivot(i, cand)
        keep_rows.append(i)
    T = tab.T[keep_rows + [tab.T.shape[0] - 1]][:, list(range(n)) + [n + m]]
    tab2 = _Tableau.__new__(_Tableau)
    tab2.T = T.copy()
    tab2.basis = [tab.basis[i] for i in keep_rows]
    tab2.iterations = tab.iterations
    tab2.set_objective(c)
    status = tab2.run(list(range(n)), max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, np.inf, tab2.iterations)
    x = np.zeros(n)
    for i, j in enumerate(tab2.basis):
        x[j] = tab2.T[i, -1]
    x[x < 0] = 0.0
    return LPResult("optimal", x, float(c @ x), tab2.iterations)
