import numpy as np
import pytest

from adaptive_eccm.core import JammerParams, jammer_utility
from adaptive_eccm.errors import BudgetExceededError, InvalidInputError, InvalidParamsError
from adaptive_eccm.jammer import best_response, best_response_oracle

from conftest import random_feasible


def test_zero_probe_gives_zero_response():
    rep = best_response(JammerParams([0.3, 0.7, 0.2, 0.9], 0.5), np.zeros(4))
    np.testing.assert_array_equal(rep.beta_star, np.zeros(4))
    assert rep.multiplier == 0.0


def test_interior_optimum():
    p = JammerParams([0.5] * 4, 0.5)
    rep = best_response(p, [1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(rep.beta_star, [0.5, 0, 0, 0], atol=1e-15)
    assert rep.multiplier == 0.0
    # grid oracle on a grid that contains 0.5 exactly
    np.testing.assert_allclose(best_response_oracle(p, [1.0, 0, 0, 0], 0.05), [0.5, 0, 0, 0], atol=1e-12)


def test_ball_binds():
    p = JammerParams([0.05] * 4, 0.5)
    rep = best_response(p, [1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(rep.beta_star, [1.0, 0, 0, 0], atol=1e-10)
    assert rep.multiplier == pytest.approx(0.2, abs=1e-9)  # 0.5 / (2 (0.05 + mu)) = 1
    np.testing.assert_allclose(best_response_oracle(p, [1.0, 0, 0, 0], 0.05), [1.0, 0, 0, 0], atol=1e-12)


@pytest.mark.parametrize(
    "theta, expected",
    [([0.5, 0.5], [0.5, 0.0]), ([0.05, 0.05], [1.0, 0.0])],
)
def test_oracle_examples_d2(theta, expected):
    p = JammerParams(theta, 0.5)
    got = best_response_oracle(p, [1.0, 0.0], 0.01)
    np.testing.assert_allclose(got, expected, atol=0.01 + 1e-12)
    np.testing.assert_array_equal(best_response_oracle(p, [0.0, 0.0], 0.01), [0.0, 0.0])


def test_oracle_budget():
    with pytest.raises(BudgetExceededError):
        best_response_oracle(JammerParams([0.5] * 4, 0.5), [1, 0, 0, 0], 0.01, cell_budget=10_000)
    with pytest.raises(InvalidInputError):
        best_response_oracle(JammerParams([0.5, 0.5], 0.5), [1, 0], 0.6)


def test_optimality_against_grid(rng):
    for _ in range(200):
        p = JammerParams(rng.random(2), 0.5)
        a = random_feasible(rng, 2)
        rep = best_response(p, a)
        grid_best = best_response_oracle(p, a, 0.01)
        assert jammer_utility(p, a, rep.beta_star) >= jammer_utility(p, a, grid_best) - 1e-3
        assert rep.kkt_residual <= 1e-8


def test_kkt_conditions(rng):
    for _ in range(500):
        theta = rng.random(4) * rng.choice([0.05, 1.0])
        if rng.random() < 0.2:
            theta[rng.integers(4)] = 0.0
        lam = rng.random()
        p = JammerParams(theta, lam)
        a = random_feasible(rng, 4)
        rep = best_response(p, a)
        b, mu = rep.beta_star, rep.multiplier
        assert np.all(b >= 0) and np.linalg.norm(b) <= 1 + 1e-12
        assert mu * (b @ b - 1.0) <= 1e-8
        interior = (b > 0) & (b < 1)
        assert np.all(np.abs(lam * a[interior] - 2 * (theta[interior] + mu) * b[interior]) <= 1e-8)
        assert rep.kkt_residual <= 1e-8


def test_zero_cost_coordinate_binds_ball():
    p = JammerParams([0.0, 0.5], 0.5)
    rep = best_response(p, [0.6, 0.8])
    assert rep.multiplier > 0
    assert np.linalg.norm(rep.beta_star) == pytest.approx(1.0, abs=1e-10)


def test_zero_cost_zero_probe_tie_breaks_to_zero():
    rep = best_response(JammerParams([0.0, 0.5], 0.5), [0.0, 1.0])
    assert rep.beta_star[0] == 0.0
    assert rep.beta_star[1] == pytest.approx(0.5)


def test_monotone_coupling(rng):
    for _ in range(100):
        theta = rng.random(4)
        a = random_feasible(rng, 4)
        lam1 = rng.random()
        lam2 = lam1 + rng.random()
        b1 = best_response(JammerParams(theta, lam1), a).beta_star
        b2 = best_response(JammerParams(theta, lam2), a).beta_star
        assert a @ b2 >= a @ b1 - 1e-9


def test_errors():
    with pytest.raises(InvalidParamsError):
        best_response(JammerParams([-0.1, 0.5], 0.5, lo=-1.0), [0.5, 0.5])
    with pytest.raises(InvalidInputError):
        best_response(JammerParams([0.1, 0.5], 0.5), [np.nan, 0.5])
    with pytest.raises(InvalidInputError):
        best_response(JammerParams([0.1, 0.5], 0.5), [0.5, 0.5, 0.1])
