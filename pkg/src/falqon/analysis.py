"""Robustness analysis: sensitivity bounds, replay fidelity, sweep statistics.

The central object is the control-path length

    L = sum_t delta_t * ||H_p + beta_t * H_d||_2,

a Lipschitz constant for the map from per-layer errors to the final state.
For errors bounded by epsilon_bar it yields the worst-case fidelity bound

    |<ideal|noisy>| >= 1 - (L * epsilon_bar)^2 / 2,

which is clamped to [0, 1] and flagged vacuous once the raw value drops
below zero (deep circuits make L grow linearly, so the bound is a
short-horizon tool).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import RunTrace, replay
from .hamiltonian import (
    DiagonalHamiltonian,
    DriverHamiltonian,
    driver_x,
    maxcut_hamiltonian,
    spectral_norm,
)
from .noise import ErrorTrajectory
from .statevector import StateVector, inner_product


@dataclass(frozen=True, eq=False)
class LipschitzReport:
    """Path length L, the fidelity bound it implies, and the per-layer norms."""

    per_layer_norms: np.ndarray
    l_value: float
    epsilon_bar: float
    fidelity_lower_bound: float
    vacuous: bool


@dataclass(frozen=True)
class SweepSummary:
    """Aggregate statistics for one (epsilon_bar, lam) sweep cell."""

    epsilon_bar: float
    lam: float
    n_seeds: int
    mean_final_cost_error: float
    std_final_cost_error: float
    mean_fidelity: float


def lipschitz_from_betas(betas, delta_t: float, diag: DiagonalHamiltonian,
                         driver: DriverHamiltonian,
                         epsilon_bar: float) -> LipschitzReport:
    """Sensitivity report for a recorded control sequence."""
    betas = np.asarray(betas, dtype=np.float64)
    if betas.size < 1:
        raise ValueError("need at least one control input")
    eb = float(epsilon_bar)
    if eb < 0.0:
        raise ValueError(f"epsilon_bar must be nonnegative, got {eb}")
    norms = np.array([spectral_norm(diag, driver, float(b)) for b in betas])
    l_value = float(delta_t) * float(norms.sum())
    raw = 1.0 - 0.5 * (l_value * eb) ** 2
    return LipschitzReport(
        per_layer_norms=norms,
        l_value=l_value,
        epsilon_bar=eb,
        fidelity_lower_bound=min(1.0, max(0.0, raw)),
        vacuous=bool(raw < 0.0),
    )


def lipschitz_bound(trace: RunTrace, delta_t: float, diag: DiagonalHamiltonian,
                    driver: DriverHamiltonian,
                    epsilon_bar: float) -> LipschitzReport:
    """Sensitivity report for a finished run (see lipschitz_from_betas)."""
    return lipschitz_from_betas(trace.betas, delta_t, diag, driver, epsilon_bar)


def replay_fidelity(betas, epsilons, delta_t: float, diag: DiagonalHamiltonian,
                    driver: DriverHamiltonian) -> float:
    """|<ideal|noisy>| for one control sequence under one error sequence.

    Both states are open-loop replays of the same inputs, one error-free and
    one under ``epsilons`` (an ErrorTrajectory or plain array).
    """
    eps = epsilons.values if isinstance(epsilons, ErrorTrajectory) else np.asarray(epsilons)
    betas = np.asarray(betas, dtype=np.float64)
    if betas.shape != eps.shape:
        raise ValueError(
            f"betas and epsilons disagree on depth: {betas.shape} vs {eps.shape}"
        )
    ideal = replay(betas, np.zeros_like(betas), delta_t, diag, driver)
    noisy = replay(betas, eps, delta_t, diag, driver)
    return abs(inner_product(ideal, noisy))


def aggregate(runs: list[RunTrace], ground: float) -> SweepSummary:
    """Summary statistics over repeated runs of one sweep cell.

    All runs must share depth, feedback law and noise settings. The mean
    fidelity compares each final state against the noiseless replay of its
    own control sequence. The standard deviation is the sample one (ddof=1)
    and defined as 0.0 for a single run.
    """
    if not runs:
        raise ValueError("need at least one run to aggregate")
    head = runs[0].config
    for trace in runs[1:]:
        c = trace.config
        if (c.graph, c.depth, c.law, c.noise.kind, c.noise.epsilon_bar) != (
            head.graph, head.depth, head.law, head.noise.kind, head.noise.epsilon_bar
        ):
            raise ValueError("runs in one cell must share instance, depth, law and noise shape")
    diag = maxcut_hamiltonian(head.graph)
    driver = driver_x(head.graph.n_nodes)
    errors = np.array([float(t.costs[-1]) - float(ground) for t in runs])
    fidelities = np.array([
        abs(inner_product(
            replay(t.betas, np.zeros_like(t.betas), t.config.delta_t, diag, driver),
            t.final_state,
        ))
        for t in runs
    ])
    std = 0.0 if errors.size == 1 else float(np.std(errors, ddof=1))
    return SweepSummary(
        epsilon_bar=head.noise.epsilon_bar,
        lam=head.law.lam,
        n_seeds=len(runs),
        mean_final_cost_error=float(errors.mean()),
        std_final_cost_error=std,
        mean_fidelity=float(fidelities.mean()),
    )


def success_probability(state: StateVector, ground_states) -> float:
    """Total probability mass the state puts on the listed basis indices."""
    idxs = [int(i) for i in ground_states]
    for i in idxs:
        if not 0 <= i < state.dim:
            raise ValueError(f"basis index {i} out of range for {state.n_qubits} qubits")
    if len(set(idxs)) != len(idxs):
        raise ValueError("ground-state indices must be distinct")
    amps = state.amplitudes[idxs]
    p = float(np.sum(amps.real ** 2 + amps.imag ** 2))
    assert -1e-10 <= p <= 1.0 + 1e-10, f"probability {p} outside [0, 1]"
    return p
