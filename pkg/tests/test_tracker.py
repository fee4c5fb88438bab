import numpy as np
import pytest

from adaptive_eccm.errors import InvalidInputError, InvalidModelError, NumericalError
from adaptive_eccm.tracker import (
    KinematicsModel,
    NoiseModel,
    TrackerState,
    kalman_step,
    noise_variance,
    simulate_fast_timescale,
    transition_matrix,
)


def test_transition_matrix_block_form():
    A = transition_matrix(0.5)
    expected = np.zeros((6, 6))
    for i in range(3):
        expected[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = [[1.0, 0.5], [0.0, 1.0]]
    np.testing.assert_array_equal(A, expected)
    C = KinematicsModel().C
    np.testing.assert_array_equal(C @ np.arange(6.0), [0.0, 2.0, 4.0])


def test_noise_variance_examples():
    nm = NoiseModel(sigma0_sq=2.0, c_r=1.0, c_j=1.0, eps=0.0)
    np.testing.assert_allclose(noise_variance(nm, [1.0, 0.0], [0.0, 0.0]), 2.0 * np.eye(3))
    np.testing.assert_allclose(noise_variance(nm, [1.0, 0.0], [1.0, 0.0]), 4.0 * np.eye(3))
    with pytest.raises(InvalidInputError):
        noise_variance(nm, [0.0, 0.0], [0.0, 0.0])


def test_noise_variance_monotone(rng):
    nm = NoiseModel()
    for _ in range(200):
        a = rng.random(4)
        b1, b2 = sorted([rng.random(4) * rng.random(), rng.random(4)], key=np.linalg.norm)
        assert noise_variance(nm, a, b1)[0, 0] <= noise_variance(nm, a, b2)[0, 0]
        assert noise_variance(nm, 0.5 * a, b1)[0, 0] > noise_variance(nm, a, b1)[0, 0]


def test_invalid_models():
    with pytest.raises(InvalidModelError):
        KinematicsModel(Q=-np.eye(6))
    with pytest.raises(InvalidModelError):
        KinematicsModel(x0_cov=np.diag([1.0, 1, 1, 1, 1, -1]))
    with pytest.raises(InvalidModelError):
        KinematicsModel(T=0.0)
    with pytest.raises(InvalidInputError):
        NoiseModel(sigma0_sq=0.0)


def test_noiseless_limit():
    km = KinematicsModel(Q=np.zeros((6, 6)), x0_cov=np.zeros((6, 6)))
    nm = NoiseModel(sigma0_sq=1e-12, c_r=0.0, c_j=0.0, eps=1.0)
    rmse, _ = simulate_fast_timescale(km, nm, [1.0, 0.0], [0.0, 0.0], 100, seed=3)
    assert rmse <= 1e-4


def test_deterministic_per_seed():
    km, nm = KinematicsModel(), NoiseModel()
    a = simulate_fast_timescale(km, nm, [0.6, 0.8], [0.3, 0.1], 50, seed=11)
    b = simulate_fast_timescale(km, nm, [0.6, 0.8], [0.3, 0.1], 50, seed=11)
    c = simulate_fast_timescale(km, nm, [0.6, 0.8], [0.3, 0.1], 50, seed=12)
    assert a == b and a != c


def test_matches_hand_riccati_recursion():
    q, T, n = 0.03, 1.0, 60
    km = KinematicsModel(T=T, q=q, n_axes=1)
    nm = NoiseModel(sigma0_sq=0.7, c_r=1.0, c_j=4.0, eps=1e-3)
    alpha, beta = [0.6, 0.8], [0.2, 0.0]
    sigma_sq = 0.7 * (1 + 4 * 0.04) / (1e-3 + 1.0)
    # textbook covariance recursion written out by hand
    p11, p12, p22 = 1.0, 0.0, 1.0
    for _ in range(n):
        p11, p12, p22 = p11 + 2 * T * p12 + T * T * p22 + q, p12 + T * p22, p22 + q
        s = p11 + sigma_sq
        k1, k2 = p11 / s, p12 / s
        p11, p12, p22 = p11 - k1 * k1 * s, p12 - k1 * k2 * s, p22 - k2 * k2 * s
    _, trace = simulate_fast_timescale(km, nm, alpha, beta, n, seed=0)
    assert abs(trace - (p11 + p22)) <= 1e-9


def test_uninformative_measurement():
    km = KinematicsModel()
    prior = TrackerState(np.arange(6.0), np.eye(6))
    post = kalman_step(km, prior, [1e3, -1e3, 5e2], 1e12 * np.eye(3))
    predicted = km.A @ prior.mean
    assert np.max(np.abs(post.mean - predicted)) <= 1e-3


def test_perfect_measurement():
    km = KinematicsModel()
    y = np.array([3.0, -2.0, 7.5])
    post = kalman_step(km, TrackerState(np.zeros(6), np.eye(6)), y, 1e-12 * np.eye(3))
    np.testing.assert_allclose(km.C @ post.mean, y, atol=1e-4)


def test_singular_innovation():
    km = KinematicsModel(Q=np.zeros((6, 6)))
    with pytest.raises(NumericalError):
        kalman_step(km, TrackerState(np.zeros(6), np.zeros((6, 6))), np.zeros(3), np.zeros((3, 3)))


def test_covariance_stays_symmetric_psd(rng):
    km = KinematicsModel()
    state = TrackerState(np.zeros(6), np.eye(6))
    for _ in range(1000):
        V = 10.0 ** rng.uniform(-6, 6) * np.eye(3)
        state = kalman_step(km, state, rng.normal(size=3) * 10, V)
        assert np.max(np.abs(state.cov - state.cov.T)) <= 1e-10
        assert np.linalg.eigvalsh(state.cov).min() >= -1e-9


def test_steady_state_trace_monotone_in_noise():
    km = KinematicsModel()
    sigmas = [1e-3, 0.01, 0.1, 1.0, 10.0, 100.0]
    traces = []
    for s in sigmas:
        nm = NoiseModel(sigma0_sq=s, c_r=0.0, c_j=0.0, eps=1.0)
        traces.append(simulate_fast_timescale(km, nm, [1.0], [0.0], 200, seed=0)[1])
    assert all(a <= b + 1e-9 for a, b in zip(traces, traces[1:]))


def test_jammer_hurts_tracking():
    km, nm = KinematicsModel(), NoiseModel()
    alpha = np.array([0.5, 0.5, 0.5, 0.5])
    off = [simulate_fast_timescale(km, nm, alpha, np.zeros(4), 100, seed=s)[0] for s in range(50)]
    on = [simulate_fast_timescale(km, nm, alpha, np.array([1.0, 0, 0, 0]), 100, seed=s)[0] for s in range(50)]
    assert np.median(on) > np.median(off)
