"""Radar probe selection: the bilevel principal-agent problem.

The radar maximizes ``F(alpha) = U_R(alpha, beta*(alpha))`` where ``beta*`` is
the jammer's best response under the model parameters the radar believes.
``beta*`` has kinks where the ball constraint starts binding, so the outer
problem is solved by derivative-free multi-start pattern search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import JammerParams, RadarWeights, project_feasible, radar_utility
from .errors import InvalidInputError, SolverError
from .jammer import best_response, solve_kernel


@dataclass(frozen=True)
class SolverBudget:
    n_random: int = 8
    step_init: float = 0.25
    step_min: float = 1e-4
    max_evals: int = 20_000

    def __post_init__(self):
        if self.n_random < 0:
            raise InvalidInputError("n_random must be >= 0")
        if not (0 < self.step_min <= self.step_init):
            raise InvalidInputError("need 0 < step_min <= step_init")
        if self.max_evals < 1:
            raise InvalidInputError("max_evals must be >= 1")


@dataclass(frozen=True)
class PapSolution:
    alpha_star: np.ndarray
    beta_predicted: np.ndarray
    radar_value: float
    starts_evaluated: int
    best_start_index: int
    n_evals: int


def evaluate_outer(model: JammerParams, w: RadarWeights, alpha) -> tuple[np.ndarray, float]:
    """Jammer response predicted by ``model`` and the radar utility it yields."""
    beta = best_response(model, alpha).beta_star
    return beta, radar_utility(w, model, alpha, beta)


class _Objective:
    """``F`` on tuples of floats with memoization; mirrors ``evaluate_outer``."""

    def __init__(self, model: JammerParams, w: RadarWeights, max_evals: int):
        self.theta = model.theta.tolist()
        self.half_lam = 0.5 * model.lam
        self.lam = model.lam
        self.delta = w.delta
        self.eps = w.eps_sinr
        self.max_evals = max_evals
        self.n_evals = 0
        self.cache: dict[tuple[float, ...], float] = {}

    @property
    def exhausted(self) -> bool:
        return self.n_evals >= self.max_evals

    def __call__(self, alpha: tuple[float, ...]) -> float:
        hit = self.cache.get(alpha)
        if hit is not None:
            return hit
        self.n_evals += 1
        beta, _ = solve_kernel([self.half_lam * a for a in alpha], self.theta)
        num = sum(b * a * a for a, b in zip(alpha, beta))
        bb = sum(b * b for b in beta)
        u_j = -sum(t * b * b for t, b in zip(self.theta, beta)) + self.lam * sum(
            a * b for a, b in zip(alpha, beta)
        )
        value = num / (num + bb + self.eps) - self.delta * u_j
        if not math.isfinite(value):
            raise SolverError("non-finite radar objective", {"alpha": list(alpha)})
        self.cache[alpha] = value
        return value


def _project(x: list[float]) -> tuple[float, ...]:
    v = [a if a > 0.0 else 0.0 for a in x]
    nrm = math.sqrt(sum(a * a for a in v))
    if nrm > 1.0:
        return tuple(project_feasible(v).tolist())
    return tuple(v)


def start_points(d: int, n_random: int, rng: np.random.Generator) -> list[tuple[float, ...]]:
    """Unit vectors, the uniform direction, then seeded uniform draws from the feasible set."""
    if d < 1:
        raise InvalidInputError("dimension must be >= 1")
    starts = [tuple(float(i == j) for j in range(d)) for i in range(d)]
    starts.append(tuple([1.0 / math.sqrt(d)] * d))
    for _ in range(n_random):
        direction = np.abs(rng.standard_normal(d))
        direction /= np.linalg.norm(direction)
        radius = rng.random() ** (1.0 / d)
        starts.append(_project((radius * direction).tolist()))
    return starts


def _pattern_search(f: _Objective, x: tuple[float, ...], budget: SolverBudget):
    fx = f(x)
    step = budget.step_init
    d = len(x)
    while step >= budget.step_min and not f.exhausted:
        improved = False
        for i in range(d):
            for sign in (1.0, -1.0):
                if f.exhausted:
                    break
                trial = list(x)
                trial[i] += sign * step
                cand = _project(trial)
                if cand == x:
                    continue
                fc = f(cand)
                if fc > fx:
                    x, fx, improved = cand, fc, True
        if not improved:
            step *= 0.5
    return x, fx


def solve_pap(
    model: JammerParams, w: RadarWeights, budget: SolverBudget = SolverBudget(), seed: int = 0
) -> PapSolution:
    """Best probe against a jammer with parameters ``model``.

    Passing the true parameters gives the information-symmetric probe;
    passing the current estimate gives the adaptive one.
    """
    d = model.dim
    rng = np.random.default_rng(seed)
    starts = start_points(d, budget.n_random, rng)
    f = _Objective(model, w, budget.max_evals)

    best_x, best_f, best_idx = None, -math.inf, -1
    used = 0
    for idx, s in enumerate(starts):
        if f.exhausted:
            break
        used += 1
        x, fx = _pattern_search(f, s, budget)
        if fx > best_f:  # strict: earlier start wins ties
            best_x, best_f, best_idx = x, fx, idx

    alpha = np.array(best_x)
    beta, value = evaluate_outer(model, w, alpha)
    return PapSolution(alpha, beta, value, used, best_idx, f.n_evals)
