import numpy as np
import pytest

from nppsim.hamiltonians import DriveSpec, build_hp, build_ht
from nppsim.instances import NppInstance, generate_instance
from nppsim.spectra import (
    SCAN_MAX_N,
    count_quasi_optimal,
    scan_gap,
)


def inst(numbers, seed=0):
    return NppInstance(n=len(numbers), numbers=tuple(numbers), seed=seed)


def brute_levels(instance, drive, lam_grid, k):
    """Independent route: dense 2^n x 2^n eigvalsh at every grid point."""
    hp = build_hp(instance)
    out = np.empty((len(lam_grid), k))
    for j, lam in enumerate(lam_grid):
        w = np.linalg.eigvalsh(build_ht(hp, drive, lam).matrix)
        out[j] = w[:k]
    return out


def test_scan_matches_dense_diagonalization_route():
    instance = inst([1, 1])
    drive = DriveSpec.uniform(2)
    scan = scan_gap(instance, drive, grid_points=101)
    # D = 2 ground states, so levels carries D + 2 = 4 columns: everything
    oracle = brute_levels(instance, drive, scan.lambda_grid, 4)
    np.testing.assert_allclose(scan.levels, oracle, atol=1e-10)
    gaps = oracle[:, 2] - oracle[:, 0]
    assert scan.relevant_gap == pytest.approx(gaps.min(), abs=1e-12)
    assert scan.argmin_lambda == scan.lambda_grid[np.argmin(gaps)]
    assert scan.d == 2


def test_scan_matches_dense_route_random_instances():
    rng = np.random.default_rng(81)
    for n in (4, 5, 6):
        instance = generate_instance(n=n, seed=int(rng.integers(1 << 30)))
        h = tuple(rng.uniform(0.3, 1.0, n))
        drive = DriveSpec(h=h)
        scan = scan_gap(instance, drive, grid_points=21)
        k = scan.levels.shape[1]
        oracle = brute_levels(instance, drive, scan.lambda_grid, k)
        np.testing.assert_allclose(scan.levels, oracle, atol=1e-9)


def test_gap_at_lambda_one_is_diagonal_gap():
    instance = generate_instance(n=6, seed=82)
    hp = build_hp(instance)
    scan = scan_gap(instance, DriveSpec.uniform(6), grid_points=51)
    j = np.flatnonzero(scan.lambda_grid == 1.0)[0]
    diag = np.sort(hp.diag.diag)
    d = scan.d
    assert scan.levels[j, 0] == pytest.approx(hp.e_min, abs=1e-10)
    assert scan.levels[j, d] == pytest.approx(diag[d], abs=1e-10)
    # the relevant gap can never exceed its lambda = 1 value
    assert scan.relevant_gap <= diag[d] - hp.e_min + 1e-12


def test_relevant_gap_bounded_by_problem_gap_many_instances():
    rng = np.random.default_rng(83)
    for _ in range(8):
        instance = generate_instance(n=5, seed=int(rng.integers(1 << 30)))
        hp = build_hp(instance)
        scan = scan_gap(instance, DriveSpec.uniform(5), grid_points=31)
        diag = np.sort(hp.diag.diag)
        assert scan.relevant_gap <= diag[scan.d] - hp.e_min + 1e-12
        assert scan.relevant_gap > 0


def test_lambda_zero_ground_is_minus_total_field():
    instance = generate_instance(n=5, seed=84)
    h = (1.0, 0.8, 0.6, 0.9, 0.7)
    scan = scan_gap(instance, DriveSpec(h=h), grid_points=11)
    j = np.flatnonzero(scan.lambda_grid == 0.0)[0]
    assert scan.levels[j, 0] == pytest.approx(-sum(h), abs=1e-10)


def test_grid_refinement_is_stable():
    instance = generate_instance(n=6, seed=85)
    drive = DriveSpec.uniform(6)
    g1 = scan_gap(instance, drive, grid_points=101).relevant_gap
    g2 = scan_gap(instance, drive, grid_points=201).relevant_gap
    assert abs(g1 - g2) < 1e-3
    assert g2 <= g1 + 1e-12


def test_extended_lambda_range_for_path_excursions():
    instance = generate_instance(n=4, seed=86)
    scan = scan_gap(
        instance, DriveSpec.uniform(4), grid_points=51, lam_min=-0.2, lam_max=1.3
    )
    assert scan.lambda_grid[0] == pytest.approx(-0.2)
    assert scan.lambda_grid[-1] == pytest.approx(1.3)
    # endpoints 0 and 1 are force-included so the problem-gap bound is checkable
    assert np.any(scan.lambda_grid == 0.0)
    assert np.any(scan.lambda_grid == 1.0)
    assert np.all(np.diff(scan.lambda_grid) > 0)


def test_scan_guards():
    with pytest.raises(ValueError, match="exceeds the scan cap"):
        scan_gap(generate_instance(n=SCAN_MAX_N + 1, seed=87), DriveSpec.uniform(SCAN_MAX_N + 1))
    instance = inst([3, 1])
    with pytest.raises(ValueError):
        scan_gap(instance, DriveSpec.uniform(2), grid_points=5)
    with pytest.raises(ValueError):
        scan_gap(instance, DriveSpec.uniform(2), delta=0.0)
    with pytest.raises(ValueError):
        scan_gap(instance, DriveSpec.uniform(3))


def test_quasi_optimal_counts_hand_checked():
    # [3,1]: diag = (1, 1/4, 1/4, 1); ground 1/4 doubly degenerate,
    # excited 1 doubly degenerate at distance 3/4
    assert count_quasi_optimal(inst([3, 1]), delta=0.1) == 0
    assert count_quasi_optimal(inst([3, 1]), delta=0.75) == 2
    assert count_quasi_optimal(inst([3, 1]), delta=0.75, distinct_levels=True) == 1
    # [5,3,2]: diag x64 = 0,0,16,16,36,36,100,100; delta 0.3 covers only 16/64
    assert count_quasi_optimal(inst([5, 3, 2]), delta=0.3) == 2
    assert count_quasi_optimal(inst([5, 3, 2]), delta=0.3, distinct_levels=True) == 1
    assert count_quasi_optimal(inst([5, 3, 2]), delta=2.0) == 6
    assert count_quasi_optimal(inst([5, 3, 2]), delta=2.0, distinct_levels=True) == 3


def test_quasi_optimal_monotone_in_delta():
    instance = generate_instance(n=8, seed=88)
    deltas = [0.001, 0.005, 0.02, 0.1, 0.5]
    counts = [count_quasi_optimal(instance, d) for d in deltas]
    assert counts == sorted(counts)
    with pytest.raises(ValueError):
        count_quasi_optimal(instance, 0.0)


def test_scan_reports_quasi_count_consistently():
    instance = generate_instance(n=6, seed=89)
    scan = scan_gap(instance, DriveSpec.uniform(6), grid_points=11, delta=0.05)
    assert scan.n_quasi == count_quasi_optimal(instance, 0.05)
    assert scan.delta == 0.05
