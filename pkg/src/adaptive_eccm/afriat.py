"""Revealed-preference estimation of the jammer's cost coefficients.

For records ``(alpha_s, beta_s)`` the jammer's optimality at probe ``alpha_t``
requires, for every ordered pair ``(s, t)``,

    L_st(theta) = -sum_i theta_i (beta_s,i^2 - beta_t,i^2) + lam * alpha_t.(beta_s - beta_t) <= 0

Each ``L_st`` is affine in ``theta``; the feasible set, the margin and the
max-margin estimate all reduce to small linear programs. Systems grow
quadratically with the dataset, so LPs are solved by row generation: solve on
a working set of rows, add the most violated rows, repeat until none is
violated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import InteractionDataset
from .errors import InvalidInputError, SolverError
from .lp import LPResult, linprog

TOL_FEAS = 1e-8
CUT_TOL = 1e-10
TIE_GAP = 1e-10
ROWS_PER_ROUND = 8
MAX_ROUNDS = 500


@dataclass(frozen=True)
class AfriatSystem:
    """Rows ``L_r(theta) = coef[r] @ theta + const[r]`` for ordered pairs ``pairs[r] = (s, t)``.

    Pair indices are 1-based to match dataset positions.
    """

    coef: np.ndarray
    const: np.ndarray
    pairs: np.ndarray
    lo: float
    hi: float
    dim: int
    lam: float

    @property
    def n_rows(self) -> int:
        return int(self.const.size)

    def values(self, theta) -> np.ndarray:
        return self.coef @ np.asarray(theta, dtype=float) + self.const

    @property
    def midpoint(self) -> np.ndarray:
        return np.full(self.dim, 0.5 * (self.lo + self.hi))

    def in_box(self, theta) -> bool:
        th = np.asarray(theta, dtype=float)
        return bool(th.shape == (self.dim,) and np.all(th >= self.lo) and np.all(th <= self.hi))


@dataclass(frozen=True)
class MarginResult:
    feasible: bool
    theta_hat: np.ndarray
    margin: float
    worst_violation: float
    used_fallback: bool = False


def build_system(
    data: InteractionDataset,
    lam: float,
    lo: float = 0.0,
    hi: float = 1.0,
    include_diagonal: bool = False,
) -> AfriatSystem:
    """Afriat rows for every ordered pair of records (diagonal rows are identically zero)."""
    if len(data) == 0:
        raise InvalidInputError("cannot build an Afriat system from an empty dataset")
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    if lo > hi:
        raise InvalidInputError(f"empty theta box [{lo}, {hi}]")
    A = data.probes
    B = data.responses
    k, d = B.shape
    s_idx, t_idx = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    s_idx, t_idx = s_idx.ravel(), t_idx.ravel()
    if not include_diagonal:
        keep = s_idx != t_idx
        s_idx, t_idx = s_idx[keep], t_idx[keep]
    sq = B * B
    coef = -(sq[s_idx] - sq[t_idx])
    const = lam * np.einsum("ij,ij->i", A[t_idx], B[s_idx] - B[t_idx])
    pairs = np.column_stack([s_idx + 1, t_idx + 1]) if s_idx.size else np.zeros((0, 2), dtype=int)
    return AfriatSystem(coef.reshape(-1, d), const, pairs, float(lo), float(hi), d, float(lam))


def margin_of(sys: AfriatSystem, theta) -> float:
    """Smallest Afriat row value at ``theta``; 0 for an empty system."""
    if sys.n_rows == 0:
        return 0.0
    return float(sys.values(theta).min())


def worst_violation(sys: AfriatSystem, theta) -> float:
    """Largest Afriat row value at ``theta``; 0 for an empty system."""
    if sys.n_rows == 0:
        return 0.0
    return float(sys.values(theta).max())


def membership(sys: AfriatSystem, theta, tol: float = TOL_FEAS) -> bool:
    """Whether ``theta`` lies in the box and satisfies every Afriat row to ``tol``."""
    if not sys.in_box(theta):
        return False
    return worst_violation(sys, theta) <= tol


# --- row generation -------------------------------------------------------

# A working-set LP: given the active row indices, return (c, A_ub, b_ub, bounds).
LPBuilder = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray, list]]
# Per-row violation of a candidate LP solution (positive means violated).
Violation = Callable[[np.ndarray], np.ndarray]


def _row_generation(
    sys: AfriatSystem, build: LPBuilder, violation: Violation, seed_rows: np.ndarray
) -> LPResult:
    active = np.unique(seed_rows)
    total_iters = 0
    for _ in range(MAX_ROUNDS):
        c, A, b, bounds = build(active)
        res = linprog(c, A, b, bounds)
        total_iters += res.nit
        if not res.ok:
            return LPResult(res.status, res.x, res.fun, total_iters)
        viol = violation(res.x)
        viol[active] = -np.inf
        worst = np.argsort(-viol)[:ROWS_PER_ROUND]
        worst = worst[viol[worst] > CUT_TOL]
        if worst.size == 0:
            return LPResult("optimal", res.x, res.fun, total_iters)
        active = np.union1d(active, worst)
    raise SolverError(
        "row generation did not converge",
        {"rounds": MAX_ROUNDS, "active_rows": int(active.size), "rows": sys.n_rows},
    )


def _theta_bounds(sys: AfriatSystem) -> list:
    return [(sys.lo, sys.hi)] * sys.dim


def _extremes(values: np.ndarray, n: int = 2) -> np.ndarray:
    order = np.argsort(values)
    return np.concatenate([order[:n], order[-n:]])


def _min_max_row(sys: AfriatSystem, start: np.ndarray) -> tuple[float, np.ndarray]:
    """``min_theta max_r L_r(theta)`` over the box; variables ``(theta, v)``."""
    d = sys.dim

    def build(rows):
        A = np.hstack([sys.coef[rows], -np.ones((rows.size, 1))])
        c = np.zeros(d + 1)
        c[-1] = 1.0
        return c, A, -sys.const[rows], _theta_bounds(sys) + [(None, None)]

    def violation(z):
        return sys.values(z[:d]) - z[d]

    res = _row_generation(sys, build, violation, _extremes(sys.values(start)))
    if not res.ok:
        raise SolverError(f"feasibility LP ended with status {res.status}", {"rows": sys.n_rows})
    return float(res.x[d]), np.clip(res.x[:d], sys.lo, sys.hi)


def _max_min_row(sys: AfriatSystem, start: np.ndarray, tol: float) -> tuple[float, np.ndarray] | None:
    """``max m`` s.t. ``m <= L_r(theta) <= tol`` for all rows; ``None`` if infeasible."""
    d = sys.dim
    n = sys.n_rows

    def build(rows):
        # active indices < n are margin rows, >= n are feasibility rows
        lower = rows[rows < n]
        upper = rows[rows >= n] - n
        A = np.vstack(
            [
                np.hstack([-sys.coef[lower], np.ones((lower.size, 1))]),
                np.hstack([sys.coef[upper], np.zeros((upper.size, 1))]),
            ]
        )
        b = np.concatenate([sys.const[lower], tol - sys.const[upper]])
        c = np.zeros(d + 1)
        c[-1] = -1.0
        return c, A, b, _theta_bounds(sys) + [(None, None)]

    def violation(z):
        vals = sys.values(z[:d])
        return np.concatenate([z[d] - vals, vals - tol])

    vals = sys.values(start)
    seed = np.concatenate([_extremes(vals), n + _extremes(vals)])
    res = _row_generation(sys, build, violation, seed)
    if res.status == "infeasible":
        return None
    if not res.ok:
        raise SolverError(f"max-margin LP ended with status {res.status}", {"rows": n})
    return float(res.x[d]), np.clip(res.x[:d], sys.lo, sys.hi)


def _nearest_in_band(
    sys: AfriatSystem, target: np.ndarray, floor: float, ceiling: float, start: np.ndarray
) -> np.ndarray | None:
    """Point minimizing ``||theta - target||_1`` with ``floor <= L_r(theta) <= ceiling`` for all rows.

    Variables are ``(theta, t)`` with ``t_i >= |theta_i - target_i|``.
    """
    d = sys.dim
    n = sys.n_rows
    eye = np.eye(d)
    abs_rows = np.vstack([np.hstack([eye, -eye]), np.hstack([-eye, -eye])])
    abs_rhs = np.concatenate([target, -target])
    use_floor = np.isfinite(floor)

    def build(rows):
        lower = rows[rows < n]
        upper = rows[rows >= n] - n
        zeros_l = np.zeros((lower.size, d))
        zeros_u = np.zeros((upper.size, d))
        A = np.vstack(
            [abs_rows, np.hstack([-sys.coef[lower], zeros_l]), np.hstack([sys.coef[upper], zeros_u])]
        )
        b = np.concatenate([abs_rhs, sys.const[lower] - floor, ceiling - sys.const[upper]])
        c = np.concatenate([np.zeros(d), np.ones(d)])
        return c, A, b, _theta_bounds(sys) + [(0.0, None)] * d

    def violation(z):
        vals = sys.values(z[:d])
        low = floor - vals if use_floor else np.full(n, -np.inf)
        return np.concatenate([low, vals - ceiling])

    vals = sys.values(start)
    seed = n + _extremes(vals)
    if use_floor:
        seed = np.concatenate([_extremes(vals), seed])
    res = _row_generation(sys, build, violation, seed)
    if not res.ok:
        return None
    return np.clip(res.x[:d], sys.lo, sys.hi)


# --- public estimators ----------------------------------------------------


def feasibility_test(sys: AfriatSystem, tol: float = TOL_FEAS) -> tuple[bool, np.ndarray | None]:
    """Does some theta in the box satisfy every Afriat row?

    Solves ``min v`` s.t. ``L_r(theta) <= v``; feasible iff the optimum is at
    most ``tol``. The witness is the minimizing theta (box midpoint when the
    system is empty).
    """
    if sys.n_rows == 0:
        return True, sys.midpoint
    v, theta = _min_max_row(sys, sys.midpoint)
    if v <= tol:
        return True, theta
    return False, None


def max_margin_estimate(
    sys: AfriatSystem,
    fallback,
    tol: float = TOL_FEAS,
    estimator: str = "max-margin",
) -> MarginResult:
    """Point estimate of theta from the Afriat system.

    ``"max-margin"`` maximizes the smallest row value over the feasible set.
    ``"slack"`` instead minimizes the largest row value (the deepest point of
    the feasible set). The optimum of either LP is often a whole face, so the
    returned point is the optimizer closest in L1 to ``fallback``; this keeps
    the estimate deterministic and stops it jumping between vertices.

    Empty or infeasible systems return ``fallback`` unchanged with margin 0.
    """
    fb = np.asarray(fallback, dtype=float)
    if fb.shape != (sys.dim,):
        raise InvalidInputError(f"fallback has shape {fb.shape}, expected ({sys.dim},)")
    if estimator not in ("max-margin", "slack"):
        raise InvalidInputError(f"unknown estimator {estimator!r}")
    if sys.n_rows == 0:
        return MarginResult(True, fb.copy(), 0.0, 0.0, used_fallback=True)

    feasible, witness = feasibility_test(sys, tol)
    if not feasible:
        return MarginResult(False, fb.copy(), 0.0, worst_violation(sys, fb), used_fallback=True)

    if estimator == "max-margin":
        best = _max_min_row(sys, witness, tol)
        if best is None:
            # the two LPs disagree only at the feasibility boundary
            return MarginResult(False, fb.copy(), 0.0, worst_violation(sys, fb), used_fallback=True)
        m_star, theta = best
        floor = m_star - TIE_GAP * max(1.0, abs(m_star))
        refined = _nearest_in_band(sys, fb, floor, tol, theta)
    else:
        v_star, theta = _min_max_row(sys, witness)
        ceiling = min(tol, v_star + TIE_GAP * max(1.0, abs(v_star)))
        refined = _nearest_in_band(sys, fb, -np.inf, ceiling, theta)
    if refined is not None and worst_violation(sys, refined) <= tol:
        theta = refined
    theta = _pull_inside(sys, theta, witness, tol)
    return MarginResult(True, theta, margin_of(sys, theta), worst_violation(sys, theta))


def _pull_inside(sys: AfriatSystem, theta: np.ndarray, anchor: np.ndarray, tol: float) -> np.ndarray:
    """Undo roundoff overshoot past ``tol`` by a short step toward ``anchor``.

    The LPs put rows exactly on the ``tol`` boundary, so the returned point can
    exceed it by a few ulps. Rows are affine, so the convex combination with a
    point strictly inside the band satisfies every row.
    """
    over = worst_violation(sys, theta)
    if over <= tol:
        return theta
    inner = worst_violation(sys, anchor)
    if inner >= tol:
        return anchor
    t = min(1.0, 2.0 * (over - tol) / (over - inner))
    moved = np.clip((1.0 - t) * theta + t * anchor, sys.lo, sys.hi)
    return moved if worst_violation(sys, moved) <= tol else anchor
