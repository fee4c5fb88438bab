"""Jammer best response: maximize ``-b'diag(theta)b + lam*a'b`` over the nonnegative unit ball."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import JammerParams, jammer_utility
from .errors import BudgetExceededError, InvalidInputError, InvalidParamsError

BISECTION_TOL = 1e-10
MAX_BISECTIONS = 200
ORACLE_CELL_BUDGET = 5_000_000


@dataclass(frozen=True)
class BestResponseReport:
    beta_star: np.ndarray
    multiplier: float
    kkt_residual: float


def _response_at(coef: list[float], theta: list[float], mu: float) -> list[float]:
    # coef[i] = lam * alpha[i] / 2; coordinates with no pull stay at zero
    return [c / (t + mu) if c > 0.0 else 0.0 for c, t in zip(coef, theta)]


def _sq_norm(v: list[float]) -> float:
    return math.fsum(x * x for x in v)


def solve_kernel(coef: list[float], theta: list[float]) -> tuple[list[float], float]:
    """Best response on plain floats; ``coef[i] = lam * alpha_i / 2``.

    Returns the response and the ball multiplier. Shared by ``best_response``
    and the probe optimizer's inner loop.
    """
    if all(t > 0.0 or c == 0.0 for c, t in zip(coef, theta)):
        beta = _response_at(coef, theta, 0.0)
        if _sq_norm(beta) <= 1.0:
            return beta, 0.0

    # ball binds; at mu_hi = lam*||alpha||/2 the response norm is at most 1
    lo = 0.0
    hi = 2.0 * math.sqrt(_sq_norm(coef))
    beta = _response_at(coef, theta, hi)
    for _ in range(MAX_BISECTIONS):
        if 1.0 - _sq_norm(beta) <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        trial = _response_at(coef, theta, mid)
        if _sq_norm(trial) > 1.0:
            lo = mid
        else:
            hi, beta = mid, trial
    return beta, hi


def kkt_residual(p: JammerParams, alpha, beta, mu: float) -> float:
    """Largest violation among stationarity, dual/primal feasibility and complementarity."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    grad = p.lam * a - 2.0 * (p.theta + mu) * b
    interior = b > 0.0
    stat = float(np.max(np.abs(grad[interior]), initial=0.0))
    dual = float(np.max(np.maximum(grad[~interior], 0.0), initial=0.0))
    excess = float(np.dot(b, b)) - 1.0
    return max(stat, dual, max(excess, 0.0), abs(mu * excess), max(-mu, 0.0))


def best_response(p: JammerParams, alpha) -> BestResponseReport:
    """Exact global maximizer of the jammer utility for probe ``alpha``.

    The problem is separable apart from the ball constraint, so the KKT point
    is ``beta_i(mu) = lam*alpha_i / (2(theta_i + mu))`` with ``mu`` found by
    bisection whenever the unconstrained optimum leaves the ball.
    """
    a = np.asarray(alpha, dtype=float)
    if a.shape != p.theta.shape:
        raise InvalidInputError(f"dimension mismatch: theta {p.theta.shape} vs alpha {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"non-finite probe {a}")
    if np.any(p.theta < 0.0):
        raise InvalidParamsError(f"theta must be nonnegative for a concave utility, got {p.theta}")

    beta, mu = solve_kernel([0.5 * p.lam * max(x, 0.0) for x in a.tolist()], p.theta.tolist())
    beta_arr = np.array(beta)
    return BestResponseReport(beta_arr, mu, kkt_residual(p, a, beta_arr, mu))


def best_response_oracle(
    p: JammerParams, alpha, step: float, cell_budget: int = ORACLE_CELL_BUDGET
) -> np.ndarray:
    """Brute-force maximizer over the grid ``{0, step, 2*step, ...}^d`` inside the unit ball."""
    if not (0.0 < step <= 0.5):
        raise InvalidInputError(f"step must be in (0, 0.5], got {step}")
    a = np.asarray(alpha, dtype=float)
    d = a.size
    ticks = np.arange(0.0, 1.0 + 1e-12, step)
    n_cells = ticks.size**d
    if n_cells > cell_budget:
        raise BudgetExceededError(f"grid needs {n_cells} cells, budget is {cell_budget}")
    grid = np.stack(np.meshgrid(*([ticks] * d), indexing="ij"), axis=-1).reshape(-1, d)
    grid = grid[np.einsum("ij,ij->i", grid, grid) <= 1.0 + 1e-12]
    values = -(grid * grid) @ p.theta + p.lam * (grid @ a)
    # argmax returns the first maximum; the origin comes first, so ties go to it
    best = grid[int(np.argmax(values))]
    return best


def response_utility(p: JammerParams, alpha) -> float:
    """Jammer utility attained by its best response to ``alpha``."""
    return jammer_utility(p, alpha, best_response(p, alpha).beta_star)
