"""Slow-timescale engagement loop: probe, observe the jammer, refine the estimate.

Randomness comes from one master seed split into labelled substreams, so
switching a feature (tracker, exploration) on or off never perturbs the other
streams:

* ``theta``    draw of the true jammer parameters when they are random
* ``pap``      random start points of the probe optimizer (fixed per engagement)
* ``explore``  exploration perturbations, one draw per step
* ``tracker``  target and measurement noise, one child stream per step
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .afriat import TOL_FEAS, build_system, max_margin_estimate
from .core import (
    InteractionDataset,
    JammerParams,
    RadarWeights,
    jammer_utility,
    project_feasible,
    radar_utility,
)
from .errors import EccmError, EngagementError, InvalidInputError
from .jammer import best_response
from .pap import SolverBudget, solve_pap
from .tracker import KinematicsModel, NoiseModel, simulate_fast_timescale

STREAMS = {"theta": 0, "pap": 1, "explore": 2, "tracker": 3}


def substream(seed: int, label: str, *extra: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(STREAMS[label], *extra))


@dataclass(frozen=True)
class EngagementConfig:
    d: int = 4
    K: int = 50
    lam: float = 0.5
    delta: float = 1.0
    eps_sinr: float = 1e-9
    theta_true: tuple[float, ...] | None = None  # None means draw uniformly from the box
    theta_hat0: tuple[float, ...] | None = None  # None means the box midpoint
    theta_lo: float = 0.0
    theta_hi: float = 1.0
    mode: str = "adaptive"
    estimator: str = "max-margin"
    exploration: bool = True
    exploration_scale: float = 0.2
    n_random: int = 8
    step_init: float = 0.25
    step_min: float = 1e-4
    max_evals: int = 20_000
    tol_feas: float = TOL_FEAS
    tracker: bool = True
    n_fast: int = 100
    T: float = 1.0
    q: float = 0.01
    sigma0_sq: float = 1.0
    c_r: float = 1.0
    c_j: float = 4.0
    noise_eps: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise InvalidInputError("d must be >= 1")
        if self.K < 0:
            raise InvalidInputError("K must be >= 0")
        if self.lam < 0 or self.delta < 0:
            raise InvalidInputError("lambda and delta must be >= 0")
        if self.theta_lo > self.theta_hi:
            raise InvalidInputError("theta box is empty")
        if self.theta_lo < 0:
            raise InvalidInputError("theta box must be nonnegative for a concave jammer utility")
        if self.mode not in ("adaptive", "symmetric"):
            raise InvalidInputError(f"mode must be adaptive or symmetric, got {self.mode!r}")
        if self.estimator not in ("max-margin", "slack"):
            raise InvalidInputError(f"estimator must be max-margin or slack, got {self.estimator!r}")
        if self.exploration_scale < 0:
            raise InvalidInputError("exploration_scale must be >= 0")
        if self.n_fast < 1:
            raise InvalidInputError("n_fast must be >= 1")
        for name in ("theta_true", "theta_hat0"):
            vec = getattr(self, name)
            if vec is None:
                continue
            vec = tuple(float(v) for v in vec)
            object.__setattr__(self, name, vec)
            if len(vec) != self.d:
                raise InvalidInputError(f"{name} has {len(vec)} entries, expected d={self.d}")
            if any(v < self.theta_lo or v > self.theta_hi for v in vec):
                raise InvalidInputError(f"{name} {vec} outside box [{self.theta_lo}, {self.theta_hi}]")

    @property
    def budget(self) -> SolverBudget:
        return SolverBudget(self.n_random, self.step_init, self.step_min, self.max_evals)

    @property
    def weights(self) -> RadarWeights:
        return RadarWeights(self.delta, self.eps_sinr)

    def with_seed(self, seed: int) -> "EngagementConfig":
        return replace(self, seed=seed)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class EngagementTrace:
    """Per-step metrics of one engagement; row ``k-1`` holds slow step ``k``."""

    seed: int
    mode: str
    theta_true: np.ndarray
    theta_hat0: np.ndarray
    est_error0: float
    alpha: np.ndarray
    beta: np.ndarray
    theta_hat: np.ndarray
    est_error: np.ndarray
    jammer_utility: np.ndarray
    radar_utility: np.ndarray
    margin: np.ndarray
    feasible: np.ndarray
    tracking_rmse: np.ndarray
    dataset: InteractionDataset = field(repr=False, default_factory=InteractionDataset)

    @property
    def K(self) -> int:
        return int(self.est_error.size)

    @property
    def final_theta_hat(self) -> np.ndarray:
        return self.theta_hat[-1] if self.K else self.theta_hat0

    @property
    def final_est_error(self) -> float:
        return float(self.est_error[-1]) if self.K else self.est_error0


def draw_theta(cfg: EngagementConfig) -> np.ndarray:
    if cfg.theta_true is not None:
        return np.array(cfg.theta_true)
    rng = np.random.default_rng(substream(cfg.seed, "theta"))
    return rng.uniform(cfg.theta_lo, cfg.theta_hi, cfg.d)


def pap_seed(cfg: EngagementConfig) -> int:
    return int(substream(cfg.seed, "pap").generate_state(1, dtype=np.uint64)[0])


def exploration_noise(rng: np.random.Generator, k: int, d: int, scale: float) -> np.ndarray:
    """Random direction of length ``scale / sqrt(k)``."""
    g = rng.standard_normal(d)
    nrm = np.linalg.norm(g)
    if nrm == 0:
        return np.zeros(d)
    return (scale / math.sqrt(k)) * g / nrm


def run_engagement(cfg: EngagementConfig) -> EngagementTrace:
    """Run ``cfg.K`` slow steps of the adaptive (or information-symmetric) scheme."""
    d, K = cfg.d, cfg.K
    theta_true = draw_theta(cfg)
    truth = JammerParams(theta_true, cfg.lam, cfg.theta_lo, cfg.theta_hi)
    theta_hat0 = (
        np.array(cfg.theta_hat0)
        if cfg.theta_hat0 is not None
        else np.full(d, 0.5 * (cfg.theta_lo + cfg.theta_hi))
    )
    weights, budget = cfg.weights, cfg.budget
    seed_pap = pap_seed(cfg)
    explore_rng = np.random.default_rng(substream(cfg.seed, "explore"))
    km = KinematicsModel(T=cfg.T, q=cfg.q)
    nm = NoiseModel(cfg.sigma0_sq, cfg.c_r, cfg.c_j, cfg.noise_eps)

    alpha = np.zeros((K, d))
    beta = np.zeros((K, d))
    theta_hat = np.zeros((K, d))
    est_error = np.zeros(K)
    u_j = np.zeros(K)
    u_r = np.zeros(K)
    margin = np.zeros(K)
    feasible = np.zeros(K, dtype=bool)
    rmse = np.full(K, np.nan)

    data = InteractionDataset()
    estimate = theta_hat0.copy()
    for k in range(1, K + 1):
        try:
            model_theta = theta_true if cfg.mode == "symmetric" else estimate
            model = truth.with_theta(model_theta)
            a_k = solve_pap(model, weights, budget, seed_pap).alpha_star
            if cfg.exploration:
                a_k = project_feasible(a_k + exploration_noise(explore_rng, k, d, cfg.exploration_scale))
            b_k = best_response(truth, a_k).beta_star
            data.append(a_k, b_k)

            system = build_system(data, cfg.lam, cfg.theta_lo, cfg.theta_hi)
            result = max_margin_estimate(system, estimate, cfg.tol_feas, cfg.estimator)
            estimate = np.asarray(result.theta_hat, dtype=float)

            i = k - 1
            alpha[i], beta[i], theta_hat[i] = a_k, b_k, estimate
            est_error[i] = float(np.linalg.norm(theta_true - estimate))
            u_j[i] = jammer_utility(truth, a_k, b_k)
            u_r[i] = radar_utility(weights, model, a_k, b_k)
            margin[i] = result.margin
            feasible[i] = result.feasible
            if cfg.tracker:
                tracker_rng = np.random.default_rng(substream(cfg.seed, "tracker", k))
                rmse[i], _ = simulate_fast_timescale(km, nm, a_k, b_k, cfg.n_fast, tracker_rng)
        except EccmError as exc:
            raise EngagementError(k, exc) from exc

    return EngagementTrace(
        seed=cfg.seed,
        mode=cfg.mode,
        theta_true=theta_true,
        theta_hat0=theta_hat0,
        est_error0=float(np.linalg.norm(theta_true - theta_hat0)),
        alpha=alpha,
        beta=beta,
        theta_hat=theta_hat,
        est_error=est_error,
        jammer_utility=u_j,
        radar_utility=u_r,
        margin=margin,
        feasible=feasible,
        tracking_rmse=rmse,
        dataset=data,
    )


# --- aggregation ------------------------------------------------------------

SUMMARY_METRICS = ("est_error", "jammer_utility", "radar_utility")


@dataclass(frozen=True)
class SummaryStats:
    n_traces: int
    K: int
    median: dict[str, np.ndarray]
    q25: dict[str, np.ndarray]
    q75: dict[str, np.ndarray]
    est_error0_median: float

    def iqr(self, metric: str) -> np.ndarray:
        return self.q75[metric] - self.q25[metric]


def summarize(traces: Sequence[EngagementTrace]) -> SummaryStats:
    """Per-step median and quartiles across replications."""
    if not traces:
        raise InvalidInputError("cannot summarize an empty list of traces")
    Ks = {t.K for t in traces}
    if len(Ks) != 1:
        raise InvalidInputError(f"traces have different lengths: {sorted(Ks)}")
    med, lo, hi = {}, {}, {}
    for name in SUMMARY_METRICS:
        stack = np.array([getattr(t, name) for t in traces]).reshape(len(traces), -1)
        med[name] = np.median(stack, axis=0)
        lo[name] = np.percentile(stack, 25, axis=0)
        hi[name] = np.percentile(stack, 75, axis=0)
    e0 = float(np.median([t.est_error0 for t in traces]))
    return SummaryStats(len(traces), Ks.pop(), med, lo, hi, e0)


def trend_checks(traces: Sequence[EngagementTrace], window: int = 5) -> dict:
    """Convergence-trend statistics across seeds.

    Estimation error compares the final estimate with the initial guess.
    Jammer utility compares the median over all (seed, step) values of the
    first ``window`` steps with that of the last ``window`` steps.
    """
    if not traces:
        raise InvalidInputError("no traces")
    e0 = np.array([t.est_error0 for t in traces])
    eK = np.array([t.final_est_error for t in traces])
    K = traces[0].K
    out = {
        "median_est_error_initial": float(np.median(e0)),
        "median_est_error_final": float(np.median(eK)),
        "fraction_seeds_improved": float(np.mean(eK < e0)),
    }
    out["est_error_decreases"] = out["median_est_error_final"] < out["median_est_error_initial"]
    out["est_error_improved_in_80pct"] = out["fraction_seeds_improved"] >= 0.8
    if K >= window:
        early = np.concatenate([t.jammer_utility[:window] for t in traces])
        late = np.concatenate([t.jammer_utility[K - window :] for t in traces])
        out["median_jammer_utility_early"] = float(np.median(early))
        out["median_jammer_utility_late"] = float(np.median(late))
        out["jammer_utility_decreases"] = out["median_jammer_utility_late"] < out["median_jammer_utility_early"]
    out["all_steps_feasible"] = bool(all(t.feasible.all() for t in traces))
    return out
