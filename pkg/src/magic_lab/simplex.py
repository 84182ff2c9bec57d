"""Two-phase revised simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Dense explicit basis inverse with product-form updates and periodic
refactorization. Pricing is Dantzig's rule; after a run of degenerate
pivots the solver switches to Bland's rule until the objective moves again,
which rules out cycling.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from magic_lab.errors import SolverError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    dual: np.ndarray
    iterations: int
    duality_gap: float


class _Tableau:
    """Basis bookkeeping for columns of ``[A | I]`` (artificials last)."""

    def __init__(self, A, b, tol):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.tol = tol
        self.basis = np.arange(self.n, self.n + self.m)
        self.B_inv = np.eye(self.m)
        self.x_B = b.copy()

    def column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.A[:, j]
        e = np.zeros(self.m)
        e[j - self.n] = 1.0
        return e

    def refactor(self) -> None:
        B = np.column_stack([self.column(j) for j in self.basis])
        self.B_inv = np.linalg.inv(B)
        self.x_B = self.B_inv @ self.b
        self.x_B[(self.x_B < 0) & (self.x_B > -self.tol)] = 0.0

    def pivot(self, r: int, q: int, u: np.ndarray) -> None:
        t = self.x_B[r] / u[r]
        self.x_B -= t * u
        self.x_B[r] = t
        row = self.B_inv[r] / u[r]
        self.B_inv -= np.outer(u, row)
        self.B_inv[r] = row
        self.basis[r] = q


def _iterate(tab: _Tableau, cost: np.ndarray, allowed: int, max_iter: int,
             bland_after: int, refactor_every: int, start_iter: int) -> int:
    """Run simplex pivots until optimal; returns the iteration counter."""
    tol = tab.tol
    it = start_iter
    degenerate = 0
    bland = False
    while True:
        if it - start_iter > max_iter:
            raise SolverError(f"simplex did not converge within {max_iter} iterations")
        if it % refactor_every == 0 and it > start_iter:
            tab.refactor()
        y = cost[tab.basis] @ tab.B_inv
        d = cost[:allowed].copy()
        n_orig = min(allowed, tab.n)
        d[:n_orig] -= tab.A[:, :n_orig].T @ y
        if allowed > tab.n:
            d[tab.n:] -= y[: allowed - tab.n]
        d[tab.basis[tab.basis < allowed]] = 0.0
        candidates = np.flatnonzero(d < -tol)
        if candidates.size == 0:
            return it
        q = int(candidates[0]) if bland else int(candidates[np.argmin(d[candidates])])
        u = tab.B_inv @ tab.column(q)
        rows = np.flatnonzero(u > tol)
        if rows.size == 0:
            raise SolverError("LP is unbounded")
        ratios = tab.x_B[rows] / u[rows]
        tmin = ratios.min()
        ties = rows[ratios <= tmin + tol * max(1.0, abs(tmin))]
        if bland:
            r = int(ties[np.argmin(tab.basis[ties])])
        else:
            r = int(ties[np.argmax(u[ties])])
        if tmin <= tol:
            degenerate += 1
            if degenerate >= bland_after:
                bland = True
        else:
            degenerate = 0
            bland = False
        tab.pivot(r, q, u)
        it += 1


def revised_simplex(c, A, b, *, tol: float = 1e-9, max_iter: int = 100_000,
                    bland_after: int = 50, refactor_every: int = 50) -> LPResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    tab = _Tableau(A, b, tol)

    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    it = _iterate(tab, phase1, n + m, max_iter, bland_after, refactor_every, 0)
    tab.refactor()
    infeas = float(tab.x_B[tab.basis >= n].sum())
    if infeas > tol * max(1.0, np.abs(b).max()):
        raise SolverError(f"LP is infeasible (phase-1 residual {infeas:.3e})")

    # drive zero-level artificials out; rows where that fails are redundant
    for r in np.flatnonzero(tab.basis >= n):
        row = tab.B_inv[r] @ A
        row[tab.basis[tab.basis < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-7:
            tab.pivot(r, j, tab.B_inv @ A[:, j])
    tab.refactor()

    cost = np.concatenate([c, np.zeros(m)])
    it = _iterate(tab, cost, n, max_iter, bland_after, refactor_every, it)
    tab.refactor()
    x = np.zeros(n)
    mask = tab.basis < n
    x[tab.basis[mask]] = np.maximum(tab.x_B[mask], 0.0)
    y = cost[tab.basis] @ tab.B_inv
    y[flip] *= -1
    objective = float(c @ x)
    b_orig = np.where(flip, -b, b)
    gap = abs(objective - float(b_orig @ y))
    log.debug("simplex finished in %d iterations, gap %.2e", it, gap)
    return LPResult(x, objective, y, it, gap)
