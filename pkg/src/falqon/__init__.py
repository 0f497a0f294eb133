"""Feedback-driven combinatorial optimization on a dense statevector simulator.

The package covers a full desk-scale experiment loop: MaxCut instances
(graphs), their cost and driver operators (hamiltonian), statevector
primitives (statevector), multiplicative control-error models (noise), the
closed-loop optimizer (engine), robustness bounds and sweep statistics
(analysis), and a config-driven command line (cli).
"""
from .analysis import (
    LipschitzReport,
    SweepSummary,
    aggregate,
    lipschitz_bound,
    lipschitz_from_betas,
    replay_fidelity,
    success_probability,
)
from .engine import (
    FeedbackLaw,
    RunConfig,
    RunTrace,
    feedback,
    layer,
    replay,
    run,
    run_independent,
    run_nominal,
    run_systematic,
)
from .graphs import (
    GenerationError,
    Graph,
    GraphFormatError,
    erdos_renyi,
    format_edge_list,
    load_edge_list,
    max_cut_brute_force,
    parse_edge_list,
    random_regular,
    reference_instance,
    save_edge_list,
)
from .hamiltonian import (
    DiagonalHamiltonian,
    DriverHamiltonian,
    PowerIterationError,
    SpectrumReport,
    assumption_report,
    driver_x,
    ground_energy,
    maxcut_hamiltonian,
    spectral_norm,
)
from .noise import ErrorTrajectory, NoiseKind, NoiseModel, trajectory
from .statevector import (
    StateVector,
    a_value,
    apply_diagonal_phase,
    apply_x_rotations,
    expectation_diagonal,
    inner_product,
    uniform_state,
)

__version__ = "0.1.0"

__all__ = [
    "DiagonalHamiltonian",
    "DriverHamiltonian",
    "ErrorTrajectory",
    "FeedbackLaw",
    "GenerationError",
    "Graph",
    "GraphFormatError",
    "LipschitzReport",
    "NoiseKind",
    "NoiseModel",
    "PowerIterationError",
    "RunConfig",
    "RunTrace",
    "SpectrumReport",
    "StateVector",
    "SweepSummary",
    "a_value",
    "aggregate",
    "apply_diagonal_phase",
    "apply_x_rotations",
    "assumption_report",
    "driver_x",
    "erdos_renyi",
    "expectation_diagonal",
    "feedback",
    "format_edge_list",
    "ground_energy",
    "inner_product",
    "layer",
    "lipschitz_bound",
    "lipschitz_from_betas",
    "load_edge_list",
    "max_cut_brute_force",
    "maxcut_hamiltonian",
    "parse_edge_list",
    "random_regular",
    "reference_instance",
    "replay",
    "replay_fidelity",
    "run",
    "run_independent",
    "run_nominal",
    "run_systematic",
    "save_edge_list",
    "spectral_norm",
    "success_probability",
    "trajectory",
    "uniform_state",
]
