"""Standard and adaptive alternating-ansatz circuits, evaluated exactly.

One layer applies the problem phase exp(-i gamma_k H_phase) and then the
uniform-drive rotation exp(-i beta_k H_D).  The standard ansatz phases with
the true problem Hamiltonian; the adaptive ansatz phases with the deformed
diagonal (sum_i alpha_i sigma^z_i)^2, sharing one alpha vector across all
layers.  The cost is ALWAYS the true H_P expectation: the deformation is an
ansatz enrichment, not a different objective.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import metrics
from .hamiltonians import AdaptiveWeights, ProblemHamiltonian, build_adaptive_hp, build_hp
from .instances import NppInstance
from .linalg import StateVector, apply_diagonal_phase, apply_x_rotations

BETA_MAX = np.pi / 2
GAMMA_MAX = np.pi
ALPHA_BOUND = 0.5
# The adaptive phase angle is scale-coupled to alpha: (gamma, alpha) and
# (gamma c^2, alpha/c) generate the same layer.  Re-expressing a standard
# layer (gamma <= pi, weights <= 1) inside the alpha box therefore needs
# gamma up to pi / ALPHA_BOUND^2; a shared pi ceiling would exclude most
# standard circuits from the adaptive family.
GAMMA_MAX_ADAPTIVE = GAMMA_MAX / ALPHA_BOUND**2


@dataclass(frozen=True)
class QaoaParams:
    """Layer durations (beta, gamma) and optional shared ansatz weights alpha.

    Bounds (beta in [0, pi/2], alpha in [-0.5, 0.5], gamma in [0, pi] for
    the standard ansatz and [0, 4 pi] for the adaptive one) are the
    search-space restrictions justified by the cost symmetries and the
    gamma-alpha scale coupling; they are enforced at evaluation time, not
    construction, so symmetry tests can probe out-of-box parameters
    explicitly.
    """

    beta: tuple[float, ...]
    gamma: tuple[float, ...]
    alpha: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.beta) != len(self.gamma):
            raise ValueError(
                f"beta and gamma lengths differ: {len(self.beta)} vs {len(self.gamma)}"
            )

    @property
    def p(self) -> int:
        return len(self.beta)

    def check_bounds(self, n: int) -> None:
        for k, v in enumerate(self.beta):
            if not 0.0 <= v <= BETA_MAX:
                raise ValueError(f"beta[{k}] = {v} outside [0, pi/2]")
        gamma_max = GAMMA_MAX if self.alpha is None else GAMMA_MAX_ADAPTIVE
        for k, v in enumerate(self.gamma):
            if not 0.0 <= v <= gamma_max:
                raise ValueError(
                    f"gamma[{k}] = {v} outside [0, {'pi' if self.alpha is None else '4 pi'}]"
                )
        if self.alpha is not None:
            if len(self.alpha) != n:
                raise ValueError(f"alpha has {len(self.alpha)} entries, need n = {n}")
            for i, v in enumerate(self.alpha):
                if not -ALPHA_BOUND <= v <= ALPHA_BOUND:
                    raise ValueError(f"alpha[{i}] = {v} outside [-0.5, 0.5]")


@dataclass(frozen=True)
class QaoaResult:
    """Metrics of one circuit evaluation; n_eval is filled by the optimizer."""

    energy: float
    epsilon: float
    p_success: float
    t_total: float
    n_eval: int
    params: QaoaParams
    wall_time: float = 0.0


class AnsatzEvaluator:
    """Reusable evaluator holding the prebuilt problem diagonal.

    The optimizer calls cost() hundreds of thousands of times per instance;
    caching H_P here keeps each call at the two-kernel minimum.
    """

    def __init__(self, inst: NppInstance, hp: ProblemHamiltonian | None = None):
        self.inst = inst
        self.hp = hp if hp is not None else build_hp(inst)

    def state(self, params: QaoaParams, enforce_bounds: bool = True) -> StateVector:
        if enforce_bounds:
            params.check_bounds(self.inst.n)
        n = self.inst.n
        phase_op = self.hp.diag
        if params.alpha is not None:
            phase_op = build_adaptive_hp(self.inst, AdaptiveWeights(params.alpha))
        state = StateVector.plus_state(n)
        betas = np.empty(n, dtype=np.float64)
        for gamma_k, beta_k in zip(params.gamma, params.beta):
            apply_diagonal_phase(state, phase_op, gamma_k)
            betas.fill(beta_k)
            apply_x_rotations(state, betas)
        return state

    def cost(self, params: QaoaParams, enforce_bounds: bool = True) -> float:
        return metrics.energy_expectation(self.state(params, enforce_bounds), self.hp)

    def evaluate(self, params: QaoaParams, n_eval: int = 0) -> QaoaResult:
        t0 = time.perf_counter()
        state = self.state(params)
        energy = metrics.energy_expectation(state, self.hp)
        return QaoaResult(
            energy=energy,
            epsilon=metrics.approx_error(energy, self.hp.e_min, self.hp.e_max),
            p_success=metrics.success_probability(state, self.hp),
            t_total=duration(params),
            n_eval=n_eval,
            params=params,
            wall_time=time.perf_counter() - t0,
        )


def ansatz_state(inst: NppInstance, params: QaoaParams, enforce_bounds: bool = True) -> StateVector:
    """The circuit state for the given parameters, starting from |+>^n."""
    return AnsatzEvaluator(inst).state(params, enforce_bounds)


def cost(inst: NppInstance, params: QaoaParams, enforce_bounds: bool = True) -> float:
    """Expectation of the TRUE problem Hamiltonian in the ansatz state."""
    return AnsatzEvaluator(inst).cost(params, enforce_bounds)


def duration(params: QaoaParams) -> float:
    """Total pulse duration sum_k (beta_k + gamma_k)."""
    return float(sum(params.beta) + sum(params.gamma))


def evaluate(inst: NppInstance, params: QaoaParams, n_eval: int = 0) -> QaoaResult:
    """Convenience wrapper bundling all metrics for one parameter set."""
    return AnsatzEvaluator(inst).evaluate(params, n_eval=n_eval)
