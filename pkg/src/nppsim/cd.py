"""Counterdiabatic structure checks: gauge-potential coefficients and the
product-formula effective Hamiltonian.

The approximate gauge potential at order l is A = i * sum_k alpha_k O_{2k-1}
with O_1 = [H, dH/dlambda] and O_{m+1} = [H, O_m].  For the linear
interpolation H = (1 - lambda) H_D + lambda H_P the first operator collapses
to the lambda-independent [H_D, H_P].  The coefficients minimize the
Hilbert-Schmidt action S = Tr[G^2] of G = dH/dlambda + sum_k alpha_k O_{2k},
which is quadratic in alpha, so the stationary point is a linear solve, not
an iterative search.

A product step exp(-i beta H_D) exp(-i gamma H_P) equals, to second order in
the durations, exp(-i H_eff) with

    H_eff = beta H_D + gamma H_P - (i beta gamma / 2) [H_D, H_P],

whose commutator term carries the same operator content and sign as the
first-order counterdiabatic correction with alpha_1 < 0: that is the sense
in which the alternating circuit implements counterdiabatic driving without
new hardware terms.

Everything here is dense verification tooling; the optimization pipeline
never materializes these matrices.  Commutators with H_D and H_P use their
permutation / diagonal structure, so first order stays fast through n = 10
(the full instance bank); higher orders stay at tiny n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import DriveSpec, build_hd_dense, build_hp
from .instances import NppInstance
from .linalg import DenseHermitian, eig_hermitian

AGP_MAX_ORDER = 3
AGP_MAX_N_FIRST_ORDER = 10
AGP_MAX_N_HIGHER_ORDER = 6
BCH_MAX_N = 6


@dataclass(frozen=True)
class AgpAnsatz:
    """Order-l gauge-potential ansatz at one interpolation point."""

    order: int
    lam: float
    coefficients: tuple[float, ...]
    operators: tuple[np.ndarray, ...]  # O_1, O_3, ... (real antisymmetric)
    singular: bool


class ActionCoefficients(list):
    """Stationary coefficients of the quadratic action; behaves as a list.

    singular is True when the normal equations are rank deficient (for
    example a vanishing drive), in which case the minimal-norm solution is
    returned.
    """

    def __init__(self, values, singular: bool):
        super().__init__(float(v) for v in values)
        self.singular = singular


@dataclass(frozen=True)
class BchReport:
    """Frobenius distance between a product step and its effective generator."""

    beta: float
    gamma: float
    exact_product: np.ndarray
    effective: np.ndarray
    frobenius_error: float


def _drive_vector(drive) -> np.ndarray:
    h = drive.h if isinstance(drive, DriveSpec) else drive
    return np.asarray(h, dtype=np.float64)


def _commutator_with_diag(diag: np.ndarray, m: np.ndarray) -> np.ndarray:
    """[H_P, M] for diagonal H_P: entrywise (diag_b - diag_c) M[b, c]."""
    return diag[:, None] * m - m * diag[None, :]


def _commutator_with_drive(h: np.ndarray, m: np.ndarray) -> np.ndarray:
    """[H_D, M] for H_D = -sum_i h_i X_i via row/column index flips."""
    dim = m.shape[0]
    idx = np.arange(dim)
    out = np.zeros_like(m)
    for i, hi in enumerate(h):
        fl = idx ^ (1 << i)
        out -= hi * (m[fl, :] - m[:, fl])
    return out


def _hd_dense_raw(h: np.ndarray) -> np.ndarray:
    # like build_hd_dense but tolerant of h_i = 0 (degenerate-drive tests)
    n = len(h)
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=np.float64)
    idx = np.arange(dim)
    for i, hi in enumerate(h):
        m[idx, idx ^ (1 << i)] += -hi
    return m


def agp_from_parts(h: np.ndarray, hp_diag: np.ndarray, lam: float, l: int) -> AgpAnsatz:
    """Gauge-potential ansatz for an explicit (drive vector, problem diagonal).

    Exposed separately from build_agp so deformed problem families (for
    example the all-zero diagonal) can be analyzed directly.
    """
    if not 1 <= l <= AGP_MAX_ORDER:
        raise ValueError(f"order l = {l} outside [1, {AGP_MAX_ORDER}]")
    h = np.asarray(h, dtype=np.float64)
    hp_diag = np.asarray(hp_diag, dtype=np.float64)

    def comm_h(m: np.ndarray) -> np.ndarray:
        return (1.0 - lam) * _commutator_with_drive(h, m) + lam * _commutator_with_diag(hp_diag, m)

    dh = np.diag(hp_diag) - _hd_dense_raw(h)  # dH/dlambda = H_P - H_D
    odd: list[np.ndarray] = []
    even: list[np.ndarray] = []
    op = comm_h(dh)  # O_1
    for _ in range(l):
        odd.append(op)
        op = comm_h(op)  # O_{2k}
        even.append(op)
        op = comm_h(op)  # O_{2k+1}
    # normal equations of S(alpha) = Tr[(dH + sum_k alpha_k O_2k)^2]
    gram = np.empty((l, l))
    rhs = np.empty(l)
    for a in range(l):
        rhs[a] = -float(np.sum(dh * even[a].T))
        for b in range(a, l):
            gram[a, b] = gram[b, a] = float(np.sum(even[a] * even[b].T))
    coeff, _, rank, _ = np.linalg.lstsq(gram, rhs, rcond=None)
    return AgpAnsatz(
        order=l,
        lam=float(lam),
        coefficients=tuple(float(c) for c in coeff),
        operators=tuple(odd),
        singular=rank < l,
    )


def build_agp(inst: NppInstance, drive, lam: float, l: int) -> AgpAnsatz:
    """Nested-commutator ansatz for an instance; first order runs to n = 10,
    higher orders stay dense-tiny (n <= 6)."""
    cap = AGP_MAX_N_FIRST_ORDER if l == 1 else AGP_MAX_N_HIGHER_ORDER
    if inst.n > cap:
        raise ValueError(f"n = {inst.n} exceeds the order-{l} cap {cap}")
    hp = build_hp(inst)
    return agp_from_parts(_drive_vector(drive), hp.diag.diag, lam, l)


def minimize_action(inst: NppInstance, drive, lam: float, l: int) -> ActionCoefficients:
    """Coefficients minimizing Tr[G^2]; .singular flags a degenerate system."""
    ansatz = build_agp(inst, drive, lam, l)
    return ActionCoefficients(ansatz.coefficients, ansatz.singular)


def bch_check(inst: NppInstance, beta: float, gamma: float) -> BchReport:
    """Compare exp(-i beta H_D) exp(-i gamma H_P) against the second-order
    effective generator, both via eigendecomposition."""
    if inst.n > BCH_MAX_N:
        raise ValueError(f"n = {inst.n} exceeds the dense cap {BCH_MAX_N}")
    hp = build_hp(inst)
    drive = DriveSpec.uniform(inst.n)
    hd = build_hd_dense(drive)
    hp_dense = np.diag(hp.diag.diag)

    w, v = eig_hermitian(DenseHermitian(hd.shape[0], hd))
    u_drive = (v * np.exp(-1j * beta * w)) @ v.conj().T
    u_phase = np.diag(np.exp(-1j * gamma * hp.diag.diag))
    exact = u_drive @ u_phase

    h_eff = beta * hd + gamma * hp_dense - 0.5j * beta * gamma * (hd @ hp_dense - hp_dense @ hd)
    w2, v2 = np.linalg.eigh(h_eff)
    effective = (v2 * np.exp(-1j * w2)) @ v2.conj().T

    return BchReport(
        beta=float(beta),
        gamma=float(gamma),
        exact_product=exact,
        effective=effective,
        frobenius_error=float(np.linalg.norm(exact - effective)),
    )


_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_decompose(matrix: np.ndarray, n: int, tol: float = 1e-12) -> dict[str, complex]:
    """Nonzero Pauli-string coefficients of a 2^n-dimensional operator.

    Strings are written qubit 0 first (qubit 0 = least significant bit), so
    "YZ" means Y on qubit 0 and Z on qubit 1.  Dense 4^n sweep; n <= 4.
    """
    if n > 4:
        raise ValueError(f"n = {n} exceeds the decomposition cap 4")
    dim = 1 << n
    if matrix.shape != (dim, dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match n = {n}")
    out: dict[str, complex] = {}
    labels = "IXYZ"
    for code in range(4 ** n):
        string = ""
        op = np.eye(1, dtype=np.complex128)
        c = code
        for _ in range(n):
            label = labels[c % 4]
            string += label
            # later (higher) qubits wrap around the accumulated operator,
            # leaving qubit 0 in the least significant tensor slot
            op = np.kron(_PAULI[label], op)
            c //= 4
        coeff = complex(np.trace(op.conj().T @ matrix)) / dim
        if abs(coeff) > tol:
            out[string] = coeff
    return out
