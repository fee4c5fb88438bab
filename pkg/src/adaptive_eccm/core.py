"""Domain types, feasible-set geometry and the two utility functions.

Action vectors (radar probe ``alpha`` and jammer response ``beta``) are plain
read-only float arrays living in the nonnegative part of the unit ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInputError

NORM_TOL = 1e-12
DEFAULT_DIM = 4


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


def as_action(x, tol: float = NORM_TOL) -> np.ndarray:
    """Validate ``x`` as an action vector and return a read-only copy."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"action must be a nonempty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"action has non-finite entries: {v}")
    if np.any(v < 0.0):
        raise InvalidInputError(f"action has negative entries: {v}")
    if float(np.dot(v, v)) > (1.0 + tol) ** 2:
        raise InvalidInputError(f"action norm {np.linalg.norm(v)} exceeds 1")
    return _frozen(v)


def is_feasible(x, tol: float = NORM_TOL) -> bool:
    v = np.asarray(x, dtype=float)
    return bool(np.all(np.isfinite(v)) and np.all(v >= 0.0) and np.linalg.norm(v) <= 1.0 + tol)


def project_feasible(x) -> np.ndarray:
    """Euclidean projection onto ``{v >= 0, ||v|| <= 1}``.

    Clip negatives, then shrink onto the ball if needed. The two steps commute
    with the projection because the ball is centred at the origin.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"cannot project non-finite vector {v}")
    v = np.maximum(v, 0.0)
    nrm = float(np.sqrt(np.dot(v, v)))
    if nrm > 1.0:
        v = v / nrm
        # rounding can leave the norm a hair above 1; another pass settles it
        nrm = float(np.sqrt(np.dot(v, v)))
        if nrm > 1.0:
            v = v / nrm
    return _frozen(v)


@dataclass(frozen=True)
class JammerParams:
    """Diagonal quadratic cost ``theta`` and radar-coupling weight ``lam``."""

    theta: np.ndarray
    lam: float = 0.5
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size == 0:
            raise InvalidInputError(f"theta must be a nonempty vector, got shape {theta.shape}")
        if not np.all(np.isfinite(theta)) or not np.isfinite(self.lam):
            raise InvalidInputError("jammer parameters must be finite")
        if self.lam < 0:
            raise InvalidInputError(f"lambda must be >= 0, got {self.lam}")
        if self.lo > self.hi:
            raise InvalidInputError(f"empty theta box [{self.lo}, {self.hi}]")
        if np.any(theta < self.lo) or np.any(theta > self.hi):
            raise InvalidInputError(f"theta {theta} outside box [{self.lo}, {self.hi}]")
        object.__setattr__(self, "theta", _frozen(theta))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dim(self) -> int:
        return self.theta.size

    def with_theta(self, theta) -> "JammerParams":
        return JammerParams(theta, self.lam, self.lo, self.hi)


@dataclass(frozen=True)
class RadarWeights:
    delta: float = 1.0
    eps_sinr: float = 1e-9

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise InvalidInputError(f"delta must be finite and >= 0, got {self.delta}")
        if not (np.isfinite(self.eps_sinr) and self.eps_sinr > 0):
            raise InvalidInputError(f"eps_sinr must be > 0, got {self.eps_sinr}")


@dataclass
class InteractionDataset:
    """Append-only record of (probe, response) pairs."""

    _records: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    def append(self, probe, response) -> None:
        a, b = as_action(probe), as_action(response)
        if a.shape != b.shape:
            raise InvalidInputError(f"probe/response dimension mismatch {a.shape} vs {b.shape}")
        if self._records and a.shape != self._records[0][0].shape:
            raise InvalidInputError("record dimension differs from dataset dimension")
        self._records.append((a, b))

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        return iter(list(self._records))

    def __getitem__(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        return self._records[k]

    def prefix(self, k: int) -> "InteractionDataset":
        return InteractionDataset(list(self._records[:k]))

    @property
    def probes(self) -> np.ndarray:
        return np.array([a for a, _ in self._records])

    @property
    def responses(self) -> np.ndarray:
        return np.array([b for _, b in self._records])

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Sequence[float], Sequence[float]]]) -> "InteractionDataset":
        data = cls()
        for a, b in pairs:
            data.append(a, b)
        return data


def _check_dims(*vecs: np.ndarray) -> None:
    n = vecs[0].shape
    for v in vecs[1:]:
        if v.shape != n:
            raise InvalidInputError(f"dimension mismatch: {n} vs {v.shape}")


def jammer_utility(p: JammerParams, alpha, beta) -> float:
    """``-sum(theta * beta**2) + lam * alpha.beta``."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    _check_dims(p.theta, a, b)
    return float(-np.dot(p.theta, b * b) + p.lam * np.dot(a, b))


def sinr_term(alpha, beta, eps_sinr: float = 1e-9) -> float:
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    num = float(np.dot(b, a * a))
    return num / (num + float(np.dot(b, b)) + eps_sinr)


def radar_utility(w: RadarWeights, p_hat: JammerParams, alpha, beta) -> float:
    """SINR proxy minus ``delta`` times the jammer utility under the estimate ``p_hat``."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    _check_dims(p_hat.theta, a, b)
    return sinr_term(a, b, w.eps_sinr) - w.delta * jammer_utility(p_hat, a, b)
