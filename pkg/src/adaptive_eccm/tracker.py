"""Fast-timescale target kinematics and the radar's Kalman tracker.

The state stacks (position, velocity) per axis, so with three axes it is
``[x, vx, y, vy, z, vz]``. Measurements are noisy positions whose variance
depends on the slow-timescale radar/jammer actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidModelError, NumericalError

PSD_TOL = 1e-9


def _is_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
        return False
    return bool(np.linalg.eigvalsh(m).min() >= -tol)


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Symmetric square root; tolerates singular covariances such as Q = 0."""
    w, U = np.linalg.eigh(m)
    return (U * np.sqrt(np.clip(w, 0.0, None))) @ U.T


def transition_matrix(T: float, n_axes: int = 3) -> np.ndarray:
    block = np.array([[1.0, T], [0.0, 1.0]])
    return np.kron(np.eye(n_axes), block)


def position_selector(n_axes: int = 3) -> np.ndarray:
    return np.kron(np.eye(n_axes), np.array([[1.0, 0.0]]))


@dataclass(frozen=True)
class KinematicsModel:
    """Constant-velocity model ``x' = A x + w`` with ``w ~ N(0, Q)`` and position measurements."""

    T: float = 1.0
    q: float = 0.01
    n_axes: int = 3
    x0_mean: np.ndarray | None = None
    x0_cov: np.ndarray | None = None
    Q: np.ndarray | None = None
    A: np.ndarray = field(init=False, repr=False)
    C: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = 2 * self.n_axes
        if self.T <= 0 or not np.isfinite(self.T):
            raise InvalidModelError(f"sampling period must be positive, got {self.T}")
        Q = self.q * np.eye(n) if self.Q is None else np.asarray(self.Q, dtype=float)
        if self.x0_mean is None:
            # 10 m/s along every axis from the origin
            mean = np.tile([0.0, 10.0], self.n_axes)
        else:
            mean = np.asarray(self.x0_mean, dtype=float)
        cov = np.eye(n) if self.x0_cov is None else np.asarray(self.x0_cov, dtype=float)
        if Q.shape != (n, n) or cov.shape != (n, n) or mean.shape != (n,):
            raise InvalidModelError(f"model matrices must be {n}x{n} with a length-{n} mean")
        if not _is_psd(Q):
            raise InvalidModelError("process noise covariance Q is not symmetric PSD")
        if not _is_psd(cov):
            raise InvalidModelError("initial covariance is not symmetric PSD")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "x0_mean", mean)
        object.__setattr__(self, "x0_cov", cov)
        object.__setattr__(self, "A", transition_matrix(self.T, self.n_axes))
        object.__setattr__(self, "C", position_selector(self.n_axes))


@dataclass(frozen=True)
class NoiseModel:
    """Measurement variance ``sigma0_sq * (1 + c_j b'b) / (eps + c_r ||a||^2)``."""

    sigma0_sq: float = 1.0
    c_r: float = 1.0
    c_j: float = 4.0
    eps: float = 1e-3

    def __post_init__(self):
        if not self.sigma0_sq > 0:
            raise InvalidInputError("sigma0_sq must be > 0")
        if self.c_r < 0 or self.c_j < 0:
            raise InvalidInputError("coupling gains must be >= 0")
        if self.eps < 0:
            raise InvalidInputError("eps must be >= 0")


@dataclass(frozen=True)
class TrackerState:
    mean: np.ndarray
    cov: np.ndarray


def noise_variance(nm: NoiseModel, alpha, beta, n_axes: int = 3) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    denom = nm.eps + nm.c_r * float(a @ a)
    if denom <= 0:
        raise InvalidInputError("noise variance undefined: eps + c_r*||alpha||^2 is zero")
    sigma_sq = nm.sigma0_sq * (1.0 + nm.c_j * float(b @ b)) / denom
    return sigma_sq * np.eye(n_axes)


def kalman_step(km: KinematicsModel, tracker: TrackerState, measurement, V: np.ndarray) -> TrackerState:
    """One predict/update cycle; the covariance update uses the Joseph form."""
    A, C = km.A, km.C
    mean = A @ tracker.mean
    P = A @ tracker.cov @ A.T + km.Q

    S = C @ P @ C.T + V
    try:
        cho = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("innovation covariance is singular", {"S": S.tolist()}) from exc
    # K = P C' S^-1 via two triangular solves
    PCt = P @ C.T
    K = np.linalg.solve(cho.T, np.linalg.solve(cho, PCt.T)).T

    innovation = np.asarray(measurement, dtype=float) - C @ mean
    mean = mean + K @ innovation
    IKC = np.eye(A.shape[0]) - K @ C
    P = IKC @ P @ IKC.T + K @ V @ K.T
    P = 0.5 * (P + P.T)
    return TrackerState(mean, P)


def simulate_fast_timescale(
    km: KinematicsModel,
    nm: NoiseModel,
    alpha,
    beta,
    n_steps: int = 100,
    seed: int | np.random.Generator = 0,
) -> tuple[float, float]:
    """Simulate the target under fixed actions and track it.

    Returns the position RMSE over the window and the trace of the final
    posterior covariance.
    """
    if n_steps < 1:
        raise InvalidInputError("n_steps must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    V = noise_variance(nm, alpha, beta, km.n_axes)
    n = km.A.shape[0]

    L0, LQ, LV = _sqrt_psd(km.x0_cov), _sqrt_psd(km.Q), _sqrt_psd(V)

    x = km.x0_mean + L0 @ rng.standard_normal(n)
    state = TrackerState(km.x0_mean.copy(), km.x0_cov.copy())
    sq_err = 0.0
    for _ in range(n_steps):
        x = km.A @ x + LQ @ rng.standard_normal(n)
        y = km.C @ x + LV @ rng.standard_normal(km.n_axes)
        state = kalman_step(km, state, y, V)
        err = km.C @ (state.mean - x)
        sq_err += float(err @ err)
    rmse = float(np.sqrt(sq_err / n_steps))
    return rmse, float(np.trace(state.cov))
