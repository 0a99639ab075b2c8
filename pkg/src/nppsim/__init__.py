"""Simulation library for annealing and variational-circuit benchmarks on
random number-partitioning instances, with hardness diagnostics and
optimization-efficiency accounting."""
from .instances import (
    GroundTruth,
    NppInstance,
    generate_instance,
    load_instances,
    save_instances,
    solve_exact,
)
from .linalg import (
    DenseHermitian,
    DiagonalOp,
    StateVector,
    apply_diagonal_phase,
    apply_x_rotations,
    basis_spins,
    eig_hermitian,
    flip_all,
    inner_product,
    signed_sums,
)
from .hamiltonians import (
    AdaptiveWeights,
    DriveSpec,
    ProblemHamiltonian,
    ScheduleSpec,
    build_adaptive_hp,
    build_hp,
    build_ht,
    schedule_lambda,
)
from .metrics import (
    approx_error,
    energy_expectation,
    eval_efficiency,
    efficiency_ratio,
    success_probability,
)
from .qa import QaConfig, QaResult, evolve, evolve_dense_reference
from .qaoa import QaoaParams, QaoaResult, ansatz_state, cost, duration, evaluate
from .optimizer import OptOutcome, OptProblem, default_problem_for, multistart_minimize
from .spectra import SpectralScan, count_quasi_optimal, scan_gap
from .cd import AgpAnsatz, BchReport, bch_check, build_agp, minimize_action

__version__ = "0.1.0"

__all__ = [
    "AdaptiveWeights", "AgpAnsatz", "BchReport", "DenseHermitian", "DiagonalOp",
    "DriveSpec", "GroundTruth", "NppInstance", "OptOutcome", "OptProblem",
    "ProblemHamiltonian", "QaConfig", "QaResult", "QaoaParams", "QaoaResult",
    "ScheduleSpec", "SpectralScan", "StateVector",
    "ansatz_state", "apply_diagonal_phase", "apply_x_rotations", "approx_error",
    "basis_spins", "bch_check", "build_adaptive_hp", "build_agp", "build_hp",
    "build_ht", "cost", "count_quasi_optimal", "default_problem_for", "duration",
    "efficiency_ratio", "eig_hermitian", "energy_expectation", "eval_efficiency",
    "evaluate", "evolve", "evolve_dense_reference", "flip_all", "generate_instance",
    "inner_product", "load_instances", "minimize_action", "multistart_minimize",
    "save_instances", "scan_gap", "schedule_lambda", "signed_sums", "solve_exact",
    "success_probability",
]
