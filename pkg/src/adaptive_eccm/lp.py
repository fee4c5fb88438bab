"""Small dense linear programs: two-phase tableau simplex with Bland's rule.

Solves ``min c'x  s.t.  A_ub x <= b_ub,  lo <= x <= hi`` where bounds may be
infinite. Intended for problems with a handful of variables and at most a
few hundred rows; callers with more rows use row generation on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SolverError

PIVOT_TOL = 1e-9
DRIVE_OUT_TOL = 1e-7
COST_TOL = 1e-11
FEAS_TOL = 1e-9
MAX_ITER = 100_000


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float
    nit: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Tableau in canonical form: ``T[:m]`` are rows ``[A | b]``, ``T[m]`` the cost row.

    The original ``[A | b]`` is kept so the tableau can be rebuilt from the
    current basis, which wipes out rounding accumulated by long pivot chains.
    """

    REFACTOR_EVERY = 50

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.m, self.n = m, n
        self.A0 = np.hstack([A, b[:, None]])
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m] = self.A0
        self.basis = list(basis)
        self.cost = np.zeros(n)
        self.nit = 0
        self.since_refactor = 0

    def set_cost(self, c: np.ndarray) -> None:
        self.cost = np.asarray(c, dtype=float).copy()
        self._price()

    def _price(self) -> None:
        m = self.m
        self.T[m, : self.n] = self.cost
        self.T[m, self.n] = 0.0
        cb = self.cost[self.basis]
        self.T[m] -= cb @ self.T[:m]

    def refactor(self) -> None:
        B = self.A0[:, self.basis]
        try:
            self.T[: self.m] = np.linalg.solve(B, self.A0)
        except np.linalg.LinAlgError as exc:
            raise SolverError("basis matrix became singular", {"iterations": self.nit}) from exc
        self.T[: self.m, self.basis] = np.eye(self.m)
        # basic values drift slightly negative under rounding
        rhs = self.T[: self.m, self.n]
        rhs[(rhs < 0) & (rhs > -1e-9)] = 0.0
        self._price()
        self.since_refactor = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.nit += 1
        self.since_refactor += 1
        if self.since_refactor >= self.REFACTOR_EVERY:
            self.refactor()

    def objective(self) -> float:
        return -float(self.T[self.m, self.n])

    def run(self, allowed: np.ndarray, max_iter: int, stop_at: float = -np.inf) -> str:
        """Pivot until optimal or unbounded; stop early once the objective reaches ``stop_at``.

        A terminal verdict is only trusted on a freshly rebuilt tableau.
        """
        T, m, n = self.T, self.m, self.n
        while True:
            if self.nit >= max_iter:
                raise SolverError(
                    "simplex iteration cap reached",
                    {"iterations": self.nit, "rows": m, "cols": n, "basis": list(self.basis)},
                )
            if self.objective() <= stop_at:
                return "optimal"
            reduced = T[m, :n]
            candidates = np.flatnonzero((reduced < -COST_TOL) & allowed)
            verdict = None
            if candidates.size == 0:
                verdict = "optimal"
            else:
                col = int(candidates[0])  # Bland: lowest index enters
                column = T[:m, col]
                rows = np.flatnonzero(column > PIVOT_TOL)
                if rows.size == 0:
                    verdict = "unbounded"
            if verdict is not None:
                if self.since_refactor == 0:
                    return verdict
                self.refactor()
                continue
            ratios = T[rows, n] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-14 * max(1.0, abs(best))]
            # Bland: among tied rows leave the basic variable with lowest index
            row = int(min(tied, key=lambda r: self.basis[r]))
            self.pivot(row, col)


def linprog(
    c: Sequence[float],
    A_ub: np.ndarray | None = None,
    b_ub: Sequence[float] | None = None,
    bounds: Sequence[tuple[float | None, float | None]] | None = None,
    max_iter: int = MAX_ITER,
) -> LPResult:
    """Minimize ``c'x`` subject to ``A_ub x <= b_ub`` and per-variable bounds.

    ``bounds`` defaults to ``(0, None)`` for every variable; ``None`` means
    unbounded on that side.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    A = np.zeros((0, nv)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    if A.shape != (b.size, nv):
        raise ValueError(f"A_ub shape {A.shape} does not match b_ub {b.shape} and c {c.shape}")
    if bounds is None:
        bounds = [(0.0, None)] * nv
    if len(bounds) != nv:
        raise ValueError("bounds length must equal the number of variables")
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("LP data must be finite")

    # x = shift + M y with y >= 0
    shift = np.zeros(nv)
    M_cols: list[tuple[int, float]] = []
    extra_rows: list[tuple[int, float]] = []  # (y index, upper bound on y)
    for j, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            return LPResult("infeasible", None, np.nan, 0)
        if np.isfinite(lo):
            shift[j] = lo
            M_cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(M_cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            M_cols.append((j, -1.0))
        else:
            M_cols.append((j, 1.0))
            M_cols.append((j, -1.0))
    ny = len(M_cols)
    M = np.zeros((nv, ny))
    for k, (j, s) in enumerate(M_cols):
        M[j, k] = s

    # equilibrate rows: Afriat rows span many orders of magnitude
    b = b - A @ shift
    A = A @ M
    scale = np.abs(A).max(axis=1) if A.size else np.zeros(0)
    empty = scale == 0.0
    if np.any(b[empty] < -FEAS_TOL):
        return LPResult("infeasible", None, np.nan, 0)
    A, b = A[~empty] / scale[~empty, None], b[~empty] / scale[~empty]
    rows_A = [A]
    rows_b = [b]
    if extra_rows:
        E = np.zeros((len(extra_rows), ny))
        for r, (k, ub) in enumerate(extra_rows):
            E[r, k] = 1.0
        rows_A.append(E)
        rows_b.append(np.array([ub for _, ub in extra_rows]))
    Ay = np.vstack(rows_A)
    by = np.concatenate(rows_b)
    cy = c @ M
    const = float(c @ shift)
    m = by.size

    if m == 0:
        if np.any(cy < -COST_TOL):
            return LPResult("unbounded", None, -np.inf, 0)
        return LPResult("optimal", shift.copy(), const, 0)

    # slacks s >= 0: Ay y + s = by; negative rhs rows get an artificial
    neg = by < 0
    sign = np.where(neg, -1.0, 1.0)
    n_art = int(neg.sum())
    n_cols = ny + m + n_art
    full = np.zeros((m, n_cols))
    full[:, :ny] = Ay * sign[:, None]
    full[np.arange(m), ny + np.arange(m)] = sign
    rhs = by * sign
    basis = []
    art = 0
    for i in range(m):
        if neg[i]:
            full[i, ny + m + art] = 1.0
            basis.append(ny + m + art)
            art += 1
        else:
            basis.append(ny + i)

    tab = _Tableau(full, rhs, basis)
    allowed = np.ones(n_cols, dtype=bool)
    if n_art:
        phase1 = np.zeros(n_cols)
        phase1[ny + m :] = 1.0
        tab.set_cost(phase1)
        if tab.run(allowed, max_iter, stop_at=0.0) != "optimal":
            raise SolverError(
                "phase 1 reported an unbounded direction (numerical breakdown)",
                {"iterations": tab.nit, "rows": m, "cols": n_cols},
            )
        infeas = tab.objective()
        if infeas > FEAS_TOL * max(1.0, float(np.abs(rhs).max())):
            return LPResult("infeasible", None, np.nan, tab.nit)
        # drive zero-level artificials out of the basis
        for i in range(m):
            if tab.basis[i] >= ny + m:
                row = np.abs(tab.T[i, : ny + m])
                j = int(np.argmax(row))
                # a row with no usable entry is redundant; its artificial stays basic at zero
                if row[j] > DRIVE_OUT_TOL:
                    tab.pivot(i, j)
        allowed[ny + m :] = False

    cost = np.zeros(n_cols)
    cost[:ny] = cy
    tab.set_cost(cost)
    status = tab.run(allowed, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, -np.inf, tab.nit)

    y = np.zeros(n_cols)
    for i, j in enumerate(tab.basis):
        y[j] = tab.T[i, n_cols]
    x = shift + M @ y[:ny]
    return LPResult("optimal", x, float(c @ x), tab.nit)
