"""Shared result metrics: approximation error, success probability, efficiency."""
from __future__ import annotations

import numpy as np

from .hamiltonians import ProblemHamiltonian
from .linalg import StateVector


def energy_expectation(state: StateVector, hp: ProblemHamiltonian) -> float:
    """<psi| H_P |psi> via the diagonal form."""
    return float(hp.diag.diag @ state.populations())


def approx_error(energy: float, e_min: float, e_max: float) -> float:
    """Normalized residual energy (E - E_min) / (E_max - E_min), in [0, 1].

    Rounding can push an essentially converged energy a few ulp below e_min;
    clamp so downstream ratios stay well defined.
    """
    eps = (energy - e_min) / (e_max - e_min)
    return float(min(max(eps, 0.0), 1.0))


def success_probability(state: StateVector, hp: ProblemHamiltonian) -> float:
    """Total population on the exact ground manifold."""
    pops = state.populations()
    return float(pops[hp.ground_indices].sum())


def eval_efficiency(p_success: float, n_eval: int) -> float:
    """Success probability bought per objective evaluation, P_S / N_eval."""
    if n_eval <= 0:
        raise ValueError(f"n_eval = {n_eval} must be positive")
    return p_success / n_eval


def efficiency_ratio(i_eff_variant: float, i_eff_baseline: float) -> float:
    """Ratio of per-evaluation efficiencies; > 1 means the variant pays off."""
    if i_eff_baseline <= 0:
        return float("inf") if i_eff_variant > 0 else float("nan")
    return i_eff_variant / i_eff_baseline
