"""Hardness diagnostics: relevant gap along the anneal and quasi-optimal counts.

The relevant gap is the minimum over the interpolation of the distance from
the instantaneous ground level to the first level that does NOT merge into
the (D-fold degenerate) final ground manifold, i.e. min over lambda of
E_D(lambda) - E_0(lambda) with levels sorted ascending.  The scan always
includes lambda = 1, where that distance is exactly the diagonal gap of the
problem Hamiltonian, so the reported gap never exceeds it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import DriveSpec, ProblemHamiltonian, build_hp
from .instances import NppInstance, solve_exact

SCAN_MAX_N = 12
DEFAULT_GRID_POINTS = 201
DEFAULT_DELTA = 0.1


@dataclass(frozen=True)
class SpectralScan:
    """Low-lying levels across the anneal plus the derived diagnostics.

    levels[j, k] is the k-th lowest eigenvalue at lambda_grid[j]; k runs
    over the D + 2 lowest levels (or the full dimension if smaller).
    n_quasi counts micro-states within delta above the ground energy; the
    distinct-level variant is exposed separately by count_quasi_optimal.
    """

    lambda_grid: np.ndarray
    levels: np.ndarray
    relevant_gap: float
    argmin_lambda: float
    d: int
    n_quasi: int
    delta: float


def scan_gap(
    inst: NppInstance,
    drive: DriveSpec,
    grid_points: int = DEFAULT_GRID_POINTS,
    delta: float = DEFAULT_DELTA,
    lam_min: float = 0.0,
    lam_max: float = 1.0,
) -> SpectralScan:
    """Track the lowest D + 2 levels of H(lambda) on a uniform grid.

    lam_min / lam_max widen the scan when a sine-parameterized path leaves
    [0, 1]; the endpoints 0 and 1 are always inserted so the problem-gap
    upper bound stays checkable.
    """
    if inst.n > SCAN_MAX_N:
        raise ValueError(f"n = {inst.n} exceeds the scan cap {SCAN_MAX_N}")
    if grid_points < 11:
        raise ValueError(f"grid_points = {grid_points} is below the minimum 11")
    if drive.n != inst.n:
        raise ValueError(f"drive on {drive.n} qubits, instance has n = {inst.n}")
    lam_min = min(float(lam_min), 0.0)
    lam_max = max(float(lam_max), 1.0)
    gt = solve_exact(inst)
    d = gt.degeneracy
    hp = build_hp(inst)
    dim = 1 << inst.n
    k = min(d + 2, dim)
    grid = np.unique(np.concatenate([
        np.linspace(lam_min, lam_max, grid_points), [0.0, 1.0]
    ]))
    levels = np.empty((grid.size, k))
    for j, lam in enumerate(grid):
        levels[j] = _lowest_levels_z2(hp, drive, float(lam), k)
    if d >= dim:  # fully degenerate problem diagonal: no level outside the manifold
        gaps = np.zeros(grid.size)
    else:
        gaps = levels[:, min(d, k - 1)] - levels[:, 0]
    j_min = int(np.argmin(gaps))
    return SpectralScan(
        lambda_grid=grid,
        levels=levels,
        relevant_gap=float(gaps[j_min]),
        argmin_lambda=float(grid[j_min]),
        d=d,
        n_quasi=count_quasi_optimal(inst, delta),
        delta=delta,
    )


def _z2_sector_matrices(hp: ProblemHamiltonian, drive: DriveSpec,
                        lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonalize H(lambda) over the global-flip symmetry.

    H_P is flip-symmetric and every sigma^x commutes with the full flip, so
    H(lambda) splits into even/odd sectors spanned by |b> +/- |~b| with the
    representatives b running over the lower half of the basis (top bit 0).
    Each sector is a real symmetric matrix of half the dimension, cutting
    the dense eigensolve cost roughly fourfold.
    """
    n = hp.inst.n
    half = 1 << (n - 1)
    idx = np.arange(half)
    sym = np.zeros((half, half))
    asym = np.zeros((half, half))
    d = lam * hp.diag.diag[:half]
    sym[idx, idx] = d
    asym[idx, idx] = d
    for i in range(n - 1):
        c = idx ^ (1 << i)
        sym[idx, c] += -(1.0 - lam) * drive.h[i]
        asym[idx, c] += -(1.0 - lam) * drive.h[i]
    # flipping the top bit leaves the lower half only via the partner state:
    # it couples representative b to the flip-partner of b ^ (half - 1)
    c = idx ^ (half - 1)
    sym[idx, c] += -(1.0 - lam) * drive.h[n - 1]
    asym[idx, c] -= -(1.0 - lam) * drive.h[n - 1]
    return sym, asym


def _lowest_levels_z2(hp: ProblemHamiltonian, drive: DriveSpec, lam: float, k: int) -> np.ndarray:
    """k lowest eigenvalues of H(lambda), merged over the two flip sectors."""
    sym, asym = _z2_sector_matrices(hp, drive, lam)
    w = np.concatenate([np.linalg.eigvalsh(sym), np.linalg.eigvalsh(asym)])
    w.sort()
    return w[:k]


def count_quasi_optimal(inst: NppInstance, delta: float, distinct_levels: bool = False) -> int:
    """States with energy in (e_min, e_min + delta], excluding the ground set.

    distinct_levels=True counts distinct energy values instead of
    computational-basis micro-states (the default convention).
    """
    if not delta > 0:
        raise ValueError(f"delta = {delta} must be positive")
    hp = build_hp(inst)
    diag = hp.diag.diag
    mask = (diag > hp.e_min) & (diag <= hp.e_min + delta)
    if distinct_levels:
        return int(np.unique(diag[mask]).size)
    return int(mask.sum())
