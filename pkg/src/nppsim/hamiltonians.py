"""Every Hamiltonian in the study, plus the annealing schedule.

Problem Hamiltonian (diagonal):   H_P = (sum_i w_i sigma^z_i)^2
Transverse drive:                 H_D = -sum_i h_i sigma^x_i   (h_i = 1 uniform)
Annealer:                         H(lambda) = (1 - lambda) H_D + lambda H_P
Schedule:                         lambda(t) = t/T + sum_m b_m sin(m pi t / T)
Adaptive problem family:          H(alpha) = (sum_i alpha_i sigma^z_i)^2

The square form keeps the i = j terms of the pairwise expansion, a constant
offset sum_i w_i^2 that shifts every level equally and cancels out of the
normalized approximation error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instances import NppInstance
from .linalg import DenseHermitian, DiagonalOp, signed_sums


@dataclass(frozen=True)
class ProblemHamiltonian:
    """Diagonal of H_P with its exact extremes and ground manifold.

    The weights are dyadic rationals and their signed sums square without
    rounding (numerators stay far below 2^53 for n <= 20), so e_min, e_max
    and ground_indices come from exact float comparisons, not tolerances.
    """

    inst: NppInstance
    diag: DiagonalOp
    e_min: float
    e_max: float
    ground_indices: np.ndarray


@dataclass(frozen=True)
class DriveSpec:
    """Per-qubit transverse field strengths; all 1 is the uniform drive."""

    h: tuple[float, ...]

    def __post_init__(self):
        for i, v in enumerate(self.h):
            if not 0.0 < v <= 1.0:
                raise ValueError(f"h[{i}] = {v} outside (0, 1]")

    @classmethod
    def uniform(cls, n: int) -> "DriveSpec":
        return cls(h=(1.0,) * n)

    @property
    def n(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class ScheduleSpec:
    """Sine-parameterized path coefficients; empty b is the linear ramp.

    The sine terms vanish at t = 0 and t = T, pinning lambda(0) = 0 and
    lambda(T) = 1 for every coefficient vector.  Mid-anneal excursions of
    lambda outside [0, 1] are allowed; the Hamiltonian extrapolates linearly.
    """

    total_time: float
    b: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.total_time > 0:
            raise ValueError(f"total_time = {self.total_time} must be positive")
        for m, v in enumerate(self.b, start=1):
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"b[{m}] = {v} outside [-1, 1]")

    @classmethod
    def linear(cls, total_time: float) -> "ScheduleSpec":
        return cls(total_time=total_time, b=())

    @property
    def cutoff(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class AdaptiveWeights:
    """Ansatz weight vector alpha; the builder accepts any finite values,
    the optimizer confines them to [-0.5, 0.5]."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        if not all(np.isfinite(v) for v in self.alpha):
            raise ValueError("alpha entries must be finite")


def build_hp(inst: NppInstance) -> ProblemHamiltonian:
    """Diagonal (sum_i w_i s_i(b))^2 over all basis states, exactly."""
    sums = signed_sums(np.asarray(inst.weights, dtype=np.float64))
    diag = sums * sums
    e_min = float(diag.min())
    e_max = float(diag.max())
    ground = np.flatnonzero(diag == e_min)
    return ProblemHamiltonian(
        inst=inst,
        diag=DiagonalOp(inst.n, diag),
        e_min=e_min,
        e_max=e_max,
        ground_indices=ground,
    )


def build_adaptive_hp(inst: NppInstance, w: AdaptiveWeights) -> DiagonalOp:
    """Diagonal (sum_i alpha_i s_i(b))^2; reduces to build_hp at alpha = weights."""
    if len(w.alpha) != inst.n:
        raise ValueError(f"alpha has {len(w.alpha)} entries, instance has n = {inst.n}")
    sums = signed_sums(np.asarray(w.alpha, dtype=np.float64))
    return DiagonalOp(inst.n, sums * sums)


def schedule_lambda(sched: ScheduleSpec, t):
    """lambda(t) = t/T + sum_m b_m sin(m pi t / T) for t in [0, T].

    Accepts a scalar or an array of times; returns the matching shape.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    T = sched.total_time
    if np.any(t_arr < 0.0) or np.any(t_arr > T):
        raise ValueError(f"t outside [0, {T}]")
    lam = t_arr / T
    for m, b_m in enumerate(sched.b, start=1):
        lam = lam + b_m * np.sin(m * np.pi * t_arr / T)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(lam)
    return lam


def build_ht(hp: ProblemHamiltonian, drive: DriveSpec, lam: float) -> DenseHermitian:
    """Dense (1 - lambda) H_D + lambda H_P, real symmetric.

    Used by spectra and commutator analysis only; time evolution never
    materializes this matrix.
    """
    if not np.isfinite(lam):
        raise ValueError(f"lambda = {lam} must be finite")
    n = hp.inst.n
    if drive.n != n:
        raise ValueError(f"drive on {drive.n} qubits, instance has n = {n}")
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=np.float64)
    idx = np.arange(dim)
    m[idx, idx] = lam * hp.diag.diag
    for i in range(n):
        m[idx, idx ^ (1 << i)] += -(1.0 - lam) * drive.h[i]
    return DenseHermitian(dim, m)


def build_hd_dense(drive: DriveSpec) -> np.ndarray:
    """Dense -sum_i h_i sigma^x_i, real symmetric."""
    n = drive.n
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=np.float64)
    idx = np.arange(dim)
    for i in range(n):
        m[idx, idx ^ (1 << i)] += -drive.h[i]
    return m
