import numpy as np
import pytest

import falqon.engine as engine
from falqon.engine import (
    FeedbackLaw,
    RunConfig,
    feedback,
    layer,
    replay,
    run,
    run_independent,
    run_nominal,
    run_systematic,
)
from falqon.graphs import Graph, reference_instance
from falqon.hamiltonian import DiagonalHamiltonian, driver_x, maxcut_hamiltonian
from falqon.noise import NoiseKind, NoiseModel, trajectory
from falqon.statevector import StateVector, uniform_state

from oracles import dense_layer_unitary, random_unit_state

K2 = Graph.from_edges(2, [(0, 1)])


def test_feedback_identities():
    assert feedback(0.3, FeedbackLaw(lam=0.5, gain=1.0)) == -0.3
    assert feedback(0.0, FeedbackLaw()) == 0.0
    assert feedback(0.3, FeedbackLaw(lam=1.0, gain=1.0)) == -0.15
    assert feedback(-0.4, FeedbackLaw(lam=2.0, gain=3.0)) == pytest.approx(0.3)


def test_feedback_opposes_measurement_sign():
    rng = np.random.default_rng(20)
    for _ in range(1000):
        a = rng.uniform(-5, 5)
        law = FeedbackLaw(lam=rng.uniform(0.1, 3), gain=rng.uniform(0.1, 3))
        b = feedback(a, law)
        assert np.sign(b) == -np.sign(a)


def test_feedback_law_validation():
    with pytest.raises(ValueError):
        FeedbackLaw(lam=0.0)
    with pytest.raises(ValueError):
        FeedbackLaw(gain=-1.0)
    with pytest.raises(ValueError):
        FeedbackLaw(kind="quadratic")


def test_layer_matches_dense_unitary():
    rng = np.random.default_rng(21)
    for n in (1, 2, 3):
        diag_arr = rng.normal(size=1 << n)
        diag = DiagonalHamiltonian(n, diag_arr)
        driver = driver_x(n)
        for _ in range(6):
            state = StateVector(n, random_unit_state(rng, n))
            beta = rng.uniform(-1.5, 1.5)
            eps = rng.uniform(-0.8, 0.8)
            u = dense_layer_unitary(diag_arr, driver.terms, n, beta, 0.05, eps)
            out = layer(state, beta, 0.05, eps, diag, driver)
            np.testing.assert_allclose(out.amplitudes, u @ state.amplitudes, atol=1e-10)


def test_layer_error_is_time_rescaling():
    # a layer with error eps equals a clean layer run for (1+eps)*delta_t
    diag = maxcut_hamiltonian(K2)
    driver = driver_x(2)
    state = uniform_state(2)
    for eps in (-0.5, 0.25, 0.9):
        noisy = layer(state, 0.3, 0.05, eps, diag, driver)
        clean = layer(state, 0.3, (1 + eps) * 0.05, 0.0, diag, driver)
        np.testing.assert_allclose(noisy.amplitudes, clean.amplitudes, atol=1e-14)


def test_layer_rejects_total_detuning():
    diag = maxcut_hamiltonian(K2)
    with pytest.raises(ValueError):
        layer(uniform_state(2), 0.1, 0.05, 1.0, diag, driver_x(2))


def test_run_nominal_trace_contract():
    trace = run_nominal(RunConfig(K2, 0.05, 50))
    assert trace.depth == 50
    assert trace.betas[0] == 0.0
    assert trace.betas.shape == trace.a_values.shape == trace.costs.shape
    np.testing.assert_array_equal(trace.epsilons, np.zeros(50))
    assert trace.ground_energy == -1.0
    # beta_{t+1} = -A_t exactly at lam = 1/2, gain 1
    np.testing.assert_array_equal(trace.betas[1:], -trace.a_values[:-1])


def test_run_nominal_converges_on_k2():
    trace = run_nominal(RunConfig(K2, 0.05, 200))
    assert trace.final_cost_error < 0.01
    rises = np.diff(trace.costs)
    assert np.all(rises <= 1e-6)


def test_run_nominal_constant_cost_is_a_fixed_point():
    # no edges: H_p = 0, so A stays 0 and beta stays 0
    g = Graph(3)
    trace = run_nominal(RunConfig(g, 0.05, 10))
    np.testing.assert_array_equal(trace.betas, np.zeros(10))
    np.testing.assert_array_equal(trace.a_values, np.zeros(10))
    np.testing.assert_array_equal(trace.costs, np.zeros(10))


def test_noise_free_descent_on_reference_instance():
    trace = run_nominal(RunConfig(reference_instance(), 0.05, 300))
    rises = np.diff(trace.costs)
    assert np.all(rises <= 1e-6)
    assert trace.costs[-1] < trace.costs[0]


def test_run_systematic_zero_magnitude_equals_nominal():
    noisy_cfg = RunConfig(K2, 0.05, 40, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.0, 3))
    clean_cfg = RunConfig(K2, 0.05, 40)
    noisy = run_systematic(noisy_cfg)
    clean = run_nominal(clean_cfg)
    np.testing.assert_array_equal(noisy.betas, clean.betas)
    np.testing.assert_array_equal(noisy.costs, clean.costs)
    np.testing.assert_array_equal(
        noisy.final_state.amplitudes, clean.final_state.amplitudes
    )


def test_run_systematic_uses_master_sequence():
    config = RunConfig(K2, 0.05, 25, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.4, 11))
    trace = run_systematic(config)
    np.testing.assert_array_equal(
        trace.epsilons, trajectory(config.noise, 25, rebuild_index=1).values
    )


def _explicit_rebuild_systematic(config):
    """Reference loop: rebuild the circuit from scratch at every step."""
    diag = maxcut_hamiltonian(config.graph)
    driver = driver_x(config.graph.n_nodes)
    from falqon.statevector import a_value, expectation_diagonal

    depth = config.depth
    betas = np.zeros(depth)
    beta = 0.0
    state = None
    for t in range(depth):
        betas[t] = beta
        eps = trajectory(config.noise, t + 1, rebuild_index=t + 1).values
        state = uniform_state(config.graph.n_nodes)
        for tau in range(t + 1):
            state = layer(state, betas[tau], config.delta_t, eps[tau], diag, driver)
        beta = feedback(a_value(state, diag, driver), config.law)
    return betas, state


def test_systematic_incremental_equals_explicit_rebuilds():
    # prefix consistency must make the incremental shortcut exact
    for graph, depth in ((K2, 20), (reference_instance(), 12)):
        config = RunConfig(
            graph, 0.05, depth, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.5, 7)
        )
        fast = run_systematic(config)
        betas, state = _explicit_rebuild_systematic(config)
        np.testing.assert_allclose(fast.betas, betas, atol=1e-12, rtol=0)
        np.testing.assert_allclose(
            fast.final_state.amplitudes, state.amplitudes, atol=1e-12, rtol=0
        )


def test_run_independent_zero_magnitude_equals_nominal():
    noisy = run_independent(
        RunConfig(K2, 0.05, 30, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.0, 5))
    )
    clean = run_nominal(RunConfig(K2, 0.05, 30))
    np.testing.assert_array_equal(noisy.betas, clean.betas)
    np.testing.assert_array_equal(noisy.a_values, clean.a_values)
    np.testing.assert_array_equal(
        noisy.final_state.amplitudes, clean.final_state.amplitudes
    )


def test_run_independent_is_deterministic():
    config = RunConfig(K2, 0.05, 15, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.3, 8))
    t1 = run_independent(config)
    t2 = run_independent(config)
    np.testing.assert_array_equal(t1.betas, t2.betas)
    np.testing.assert_array_equal(t1.costs, t2.costs)


def test_run_independent_rebuild_count(monkeypatch):
    calls = {"n": 0}
    real_layer = engine.layer

    def counting_layer(*args, **kwargs):
        calls["n"] += 1
        return real_layer(*args, **kwargs)

    monkeypatch.setattr(engine, "layer", counting_layer)
    depth = 6
    run_independent(
        RunConfig(K2, 0.05, depth, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.2, 1))
    )
    assert calls["n"] == depth * (depth + 1) // 2


def test_run_independent_records_last_rebuild_errors():
    config = RunConfig(K2, 0.05, 9, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.3, 2))
    trace = run_independent(config)
    np.testing.assert_array_equal(
        trace.epsilons, trajectory(config.noise, 9, rebuild_index=9).values
    )


def test_run_dispatch_matches_kind():
    assert run(RunConfig(K2, 0.05, 5)).depth == 5
    sys_cfg = RunConfig(K2, 0.05, 5, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.1, 0))
    np.testing.assert_array_equal(
        run(sys_cfg).betas, run_systematic(sys_cfg).betas
    )
    ind_cfg = RunConfig(K2, 0.05, 5, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.1, 0))
    np.testing.assert_array_equal(
        run(ind_cfg).betas, run_independent(ind_cfg).betas
    )


def test_run_mode_rejects_wrong_kind():
    with pytest.raises(ValueError):
        run_nominal(RunConfig(K2, 0.05, 5, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.1, 0)))
    with pytest.raises(ValueError):
        run_systematic(RunConfig(K2, 0.05, 5))
    with pytest.raises(ValueError):
        run_independent(RunConfig(K2, 0.05, 5))


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(K2, 0.0, 10)
    with pytest.raises(ValueError):
        RunConfig(K2, 0.05, 0)
    with pytest.raises(ValueError):
        RunConfig(K2, 0.05, 2001)
    with pytest.raises(ValueError):
        RunConfig(K2, 0.05, 501, noise=NoiseModel(NoiseKind.INDEPENDENT, 0.1, 0))
    with pytest.raises(ValueError):
        RunConfig(Graph(13), 0.05, 10)
    # the systematic/none cap is looser
    RunConfig(K2, 0.05, 2000)


def test_replay_reproduces_closed_loop_states():
    config = RunConfig(K2, 0.05, 30, noise=NoiseModel(NoiseKind.SYSTEMATIC, 0.4, 4))
    trace = run_systematic(config)
    diag = maxcut_hamiltonian(K2)
    state = replay(trace.betas, trace.epsilons, 0.05, diag, driver_x(2))
    np.testing.assert_allclose(
        state.amplitudes, trace.final_state.amplitudes, atol=1e-13, rtol=0
    )


def test_replay_validates_lengths():
    diag = maxcut_hamiltonian(K2)
    with pytest.raises(ValueError):
        replay(np.zeros(3), np.zeros(4), 0.05, diag, driver_x(2))
