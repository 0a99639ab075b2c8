"""Schrodinger-equation integration of the annealing Hamiltonian.

Evolves |+>^n under H(lambda(t)) = (1 - lambda) H_D + lambda H_P by
second-order Strang splitting: half drive step, full diagonal phase, half
drive step, with lambda evaluated at the step midpoint.  Both sub-steps are
exact unitaries (per-qubit x rotations, diagonal phases), so the norm is
conserved up to rounding regardless of step size.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .hamiltonians import (
    DriveSpec,
    ProblemHamiltonian,
    ScheduleSpec,
    build_hp,
    build_ht,
    schedule_lambda,
)
from .instances import NppInstance
from .linalg import StateVector, apply_diagonal_phase, apply_x_rotations, eig_hermitian

DENSE_REFERENCE_MAX_N = 6


class IntegratorError(RuntimeError):
    """Raised when amplitudes leave the finite range mid-evolution."""


@dataclass(frozen=True)
class QaConfig:
    """Annealing run parameters; dt defaults to total_time / 1000."""

    total_time: float = 50.0
    dt: float | None = None
    schedule: ScheduleSpec | None = None
    drive: DriveSpec | None = None
    method: str = "strang2"

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError(f"total_time = {self.total_time} must be positive")
        if self.dt is not None and not 0 < self.dt <= self.total_time:
            raise ValueError(f"dt = {self.dt} outside (0, {self.total_time}]")
        if self.schedule is not None and self.schedule.total_time != self.total_time:
            raise ValueError("schedule.total_time differs from config total_time")
        if self.method != "strang2":
            raise ValueError(f"unknown method tag '{self.method}'")

    def resolved(self, n: int) -> tuple[float, ScheduleSpec, DriveSpec, int]:
        """Fill defaults for an n-qubit run: dt, linear ramp, uniform drive."""
        dt = self.dt if self.dt is not None else self.total_time / 1000.0
        schedule = self.schedule or ScheduleSpec.linear(self.total_time)
        drive = self.drive or DriveSpec.uniform(n)
        if drive.n != n:
            raise ValueError(f"drive on {drive.n} qubits, instance has n = {n}")
        steps = max(1, round(self.total_time / dt))
        return dt, schedule, drive, steps


@dataclass(frozen=True)
class QaResult:
    """Final state and metrics of one annealing run."""

    final_state: StateVector
    energy: float
    epsilon: float
    p_success: float
    wall_time: float
    config: QaConfig
    instance_seed: int = field(repr=False, default=0)


def evolve_amplitudes(hp: ProblemHamiltonian, cfg: QaConfig) -> np.ndarray:
    """Amplitude-only fast path used by evolve and the optimizer objectives."""
    n = hp.inst.n
    dt, schedule, drive, steps = cfg.resolved(n)
    dt = cfg.total_time / steps
    t_mid = (np.arange(steps) + 0.5) * dt
    lams = np.asarray(schedule_lambda(schedule, t_mid), dtype=np.float64)
    h = np.asarray(drive.h, dtype=np.float64)
    state = StateVector.plus_state(n)
    half = 0.5 * dt
    for k in range(steps):
        lam = lams[k]
        theta = (1.0 - lam) * h * half
        apply_x_rotations(state, theta)
        apply_diagonal_phase(state, hp.diag, lam * dt)
        apply_x_rotations(state, theta)
        if not np.isfinite(state.amps[0]):
            _raise_nonfinite(state, k, steps, dt)
    if not np.all(np.isfinite(state.amps.view(np.float64))):
        _raise_nonfinite(state, steps - 1, steps, dt)
    return state.amps


def _raise_nonfinite(state: StateVector, step: int, steps: int, dt: float):
    raise IntegratorError(
        f"non-finite amplitudes at step {step + 1}/{steps} (t = {(step + 1) * dt:.6g})"
    )


def evolve(inst: NppInstance, cfg: QaConfig) -> QaResult:
    """Full annealing run returning state plus energy / error / success metrics."""
    t0 = time.perf_counter()
    hp = build_hp(inst)
    amps = evolve_amplitudes(hp, cfg)
    state = StateVector(inst.n, amps)
    energy = metrics.energy_expectation(state, hp)
    return QaResult(
        final_state=state,
        energy=energy,
        epsilon=metrics.approx_error(energy, hp.e_min, hp.e_max),
        p_success=metrics.success_probability(state, hp),
        wall_time=time.perf_counter() - t0,
        config=cfg,
        instance_seed=inst.seed,
    )


def evolve_dense_reference(inst: NppInstance, cfg: QaConfig, lam_fn=None) -> QaResult:
    """Oracle integrator: exact matrix exponential of the midpoint Hamiltonian
    each step, via eigendecomposition.  Shares the midpoint discretization
    with evolve so the comparison isolates the splitting error.  Tests only.

    lam_fn optionally overrides the schedule (maps t to lambda), for probing
    frozen-lambda behavior that no in-bounds ScheduleSpec can express.
    """
    if inst.n > DENSE_REFERENCE_MAX_N:
        raise ValueError(f"dense reference capped at n <= {DENSE_REFERENCE_MAX_N}")
    t0 = time.perf_counter()
    hp = build_hp(inst)
    n = inst.n
    dt, schedule, drive, steps = cfg.resolved(n)
    dt = cfg.total_time / steps
    state = StateVector.plus_state(n)
    for k in range(steps):
        t_mid = (k + 0.5) * dt
        lam = lam_fn(t_mid) if lam_fn is not None else schedule_lambda(schedule, t_mid)
        w, v = eig_hermitian(build_ht(hp, drive, lam))
        phases = np.exp(-1j * w * dt)
        state.amps = v @ (phases * (v.conj().T @ state.amps))
    energy = metrics.energy_expectation(state, hp)
    return QaResult(
        final_state=state,
        energy=energy,
        epsilon=metrics.approx_error(energy, hp.e_min, hp.e_max),
        p_success=metrics.success_probability(state, hp),
        wall_time=time.perf_counter() - t0,
        config=cfg,
        instance_seed=inst.seed,
    )
