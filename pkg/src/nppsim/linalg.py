"""Statevector storage and the dense kernels every engine builds on.

Basis convention, fixed here and consumed repo-wide: a computational basis
state is an integer index b in [0, 2^n).  Bit i of b (qubit 0 = least
significant bit) encodes the Ising spin of qubit i as

    s_i(b) = +1  if bit i of b is 0
    s_i(b) = -1  if bit i of b is 1

``basis_spins`` and ``signed_sums`` are the canonical realizations of this
mapping; every diagonal operator in the package is constructed through them
so the convention lives in exactly one place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numba import njit

HERMITICITY_TOL = 1e-12


def basis_spins(b: int, n: int) -> np.ndarray:
    """Spin vector (s_0, ..., s_{n-1}) of basis index b, entries +/-1."""
    bits = (b >> np.arange(n)) & 1
    return 1 - 2 * bits


def flip_all(b: int, n: int) -> int:
    """Global spin flip: complement all n bits of basis index b."""
    return b ^ ((1 << n) - 1)


def signed_sums(values: np.ndarray) -> np.ndarray:
    """All 2^n signed sums S[b] = sum_i values[i] * s_i(b).

    Built by doubling so that entry b follows the bit convention above.
    Integer input stays integer (exact); float input is exact whenever the
    values are dyadic rationals with numerators small enough for float64,
    which holds for weights a_i / 2^n at n <= 20.
    """
    values = np.asarray(values)
    sums = np.zeros(1, dtype=values.dtype)
    for v in values:
        sums = np.concatenate([sums + v, sums - v])
    return sums


@dataclass
class StateVector:
    """Complex amplitudes over the 2^n basis states."""

    n: int
    amps: np.ndarray

    @classmethod
    def plus_state(cls, n: int) -> "StateVector":
        """Uniform superposition |+>^n, ground state of the uniform drive."""
        dim = 1 << n
        return cls(n, np.full(dim, dim ** -0.5, dtype=np.complex128))

    @classmethod
    def basis_state(cls, n: int, b: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[b] = 1.0
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def populations(self) -> np.ndarray:
        return self.amps.real ** 2 + self.amps.imag ** 2


@dataclass(frozen=True)
class DiagonalOp:
    """A sigma^z-only operator: 2^n real energies indexed by basis state."""

    n: int
    diag: np.ndarray

    def __post_init__(self):
        if self.diag.shape != (1 << self.n,):
            raise ValueError(f"diag has shape {self.diag.shape}, expected ({1 << self.n},)")
        if not np.all(np.isfinite(self.diag)):
            raise ValueError("diagonal entries must be finite")


@dataclass(frozen=True)
class DenseHermitian:
    """Dense Hermitian matrix; real-symmetric storage is accepted."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dim {self.dim}")
        err = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if err >= HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |M - M^+| = {err:.3e}")


@njit(cache=True)
def _phase_kernel(amps, diag, angle):
    for b in range(amps.shape[0]):
        amps[b] = amps[b] * np.exp(-1j * angle * diag[b])


@njit(cache=True)
def _xrot_kernel(amps, thetas):
    # qubit i pairs indices (b, b + 2^i); exp(+i theta sigma^x) butterfly
    n = thetas.shape[0]
    dim = amps.shape[0]
    for i in range(n):
        c = np.cos(thetas[i])
        s = 1j * np.sin(thetas[i])
        stride = 1 << i
        block = stride << 1
        for base in range(0, dim, block):
            for off in range(base, base + stride):
                a0 = amps[off]
                a1 = amps[off + stride]
                amps[off] = c * a0 + s * a1
                amps[off + stride] = s * a0 + c * a1


def apply_diagonal_phase(state: StateVector, op: DiagonalOp, angle: float) -> StateVector:
    """In-place amps[b] *= exp(-i * angle * diag[b]); returns the state."""
    if op.n != state.n:
        raise ValueError(f"operator on {op.n} qubits applied to {state.n}-qubit state")
    _phase_kernel(state.amps, op.diag, float(angle))
    return state


def apply_x_rotations(state: StateVector, angles: np.ndarray) -> StateVector:
    """In-place exp(+i * theta_i * sigma^x_i) on every qubit; returns the state.

    The + sign absorbs the minus carried by the drive Hamiltonian, so a
    drive step with duration dt uses theta_i = (coefficient) * h_i * dt.
    """
    angles = np.ascontiguousarray(angles, dtype=np.float64)
    if angles.shape != (state.n,):
        raise ValueError(f"need {state.n} angles, got shape {angles.shape}")
    _xrot_kernel(state.amps, angles)
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_b conj(a_b) * b_b."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return complex(np.vdot(a.amps, b.amps))


def _real_view(m: DenseHermitian) -> np.ndarray:
    # eigensolvers on real symmetric input run ~3x faster than complex
    if np.isrealobj(m.matrix):
        return m.matrix
    if np.max(np.abs(m.matrix.imag)) == 0.0:
        return m.matrix.real
    return m.matrix


def eig_hermitian(m: DenseHermitian) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors as columns."""
    if m.dim > 4096:
        raise ValueError(f"dim {m.dim} exceeds the dense-solver cap 4096")
    return np.linalg.eigh(_real_view(m))


def lowest_eigenvalues(m: DenseHermitian, k: int) -> np.ndarray:
    """The k smallest eigenvalues, ascending; partial solve when profitable."""
    if k >= m.dim:
        return np.linalg.eigvalsh(_real_view(m))
    return scipy.linalg.eigh(
        _real_view(m), eigvals_only=True, subset_by_index=(0, k - 1)
    )
