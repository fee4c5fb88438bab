import numpy as np
import pytest

from adaptive_eccm.core import InteractionDataset, JammerParams, project_feasible
from adaptive_eccm.jammer import best_response


def random_feasible(rng: np.random.Generator, d: int) -> np.ndarray:
    """Uniform draw from the nonnegative part of the unit ball."""
    direction = np.abs(rng.standard_normal(d))
    direction /= np.linalg.norm(direction)
    return project_feasible(direction * rng.random() ** (1.0 / d))


def generated_dataset(truth: JammerParams, probes) -> InteractionDataset:
    data = InteractionDataset()
    for a in probes:
        data.append(a, best_response(truth, a).beta_star)
    return data


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
