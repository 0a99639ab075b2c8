import numpy as np
import pytest

from nppsim.hamiltonians import (
    AdaptiveWeights,
    DriveSpec,
    ScheduleSpec,
    build_adaptive_hp,
    build_hd_dense,
    build_ht,
    build_hp,
    schedule_lambda,
)
from nppsim.instances import NppInstance, solve_exact
from nppsim.linalg import flip_all


def inst(numbers):
    return NppInstance(n=len(numbers), numbers=tuple(numbers), seed=0)


def test_hp_diagonal_hand_computed_two_qubits():
    # [3,1] at n=2: weights 3/4, 1/4; signed sums +-1, +-1/2
    hp = build_hp(inst([3, 1]))
    np.testing.assert_array_equal(hp.diag.diag, [1.0, 0.25, 0.25, 1.0])
    assert hp.e_min == 0.25
    assert hp.e_max == 1.0
    assert set(hp.ground_indices) == {1, 2}
    hp = build_hp(inst([1, 1]))
    np.testing.assert_array_equal(hp.diag.diag, [0.25, 0.0, 0.0, 0.25])
    assert hp.e_min == 0.0
    assert hp.e_max == 0.25


def test_hp_energy_is_squared_scaled_residue():
    instance = inst([5, 3, 2])
    hp = build_hp(instance)
    gt = solve_exact(instance)
    # a zero-residue partition exists, so the ground energy is exactly zero
    assert gt.min_diff == 0
    assert hp.e_min == 0.0
    assert set(hp.ground_indices) == {1, 6}
    scale = float(instance.range_a) ** 2
    for b in range(8):
        spins = [1 - 2 * ((b >> i) & 1) for i in range(3)]
        diff = sum(a * s for a, s in zip([5, 3, 2], spins))
        assert hp.diag.diag[b] * scale == diff * diff


def test_hp_diag_has_global_flip_symmetry():
    rng = np.random.default_rng(21)
    for _ in range(5):
        numbers = tuple(int(v) for v in rng.integers(1, 1 << 6, 6))
        hp = build_hp(inst(numbers))
        for b in range(64):
            assert hp.diag.diag[b] == hp.diag.diag[flip_all(b, 6)]


def test_hp_matches_exact_solver_ground_set():
    rng = np.random.default_rng(22)
    for _ in range(10):
        numbers = tuple(int(v) for v in rng.integers(0, 1 << 7, 7))
        instance = inst(numbers)
        hp = build_hp(instance)
        gt = solve_exact(instance)
        assert set(hp.ground_indices) == set(gt.optimal_bitstrings)
        assert hp.e_min * float(instance.range_a) ** 2 == gt.min_diff**2


def test_adaptive_hp_hand_computed():
    diag = build_adaptive_hp(inst([1, 1]), AdaptiveWeights((0.5, -0.5)))
    np.testing.assert_array_equal(diag.diag, [0.0, 1.0, 1.0, 0.0])
    assert set(np.flatnonzero(diag.diag == 0.0)) == {0, 3}


def test_adaptive_hp_reduces_to_problem_at_scaled_numbers():
    instance = inst([5, 3, 2])
    hp_true = build_hp(instance)
    diag_adapt = build_adaptive_hp(instance, AdaptiveWeights(tuple(instance.weights)))
    np.testing.assert_array_equal(hp_true.diag.diag, diag_adapt.diag)


def test_adaptive_weights_validation():
    with pytest.raises(ValueError):
        AdaptiveWeights((0.1, float("inf")))
    with pytest.raises(ValueError, match="alpha"):
        build_adaptive_hp(inst([5, 3, 2]), AdaptiveWeights((0.1, 0.2)))


def test_schedule_linear_endpoints_and_midpoint():
    sched = ScheduleSpec.linear(total_time=50.0)
    assert sched.cutoff == 0
    assert schedule_lambda(sched, 0.0) == 0.0
    assert schedule_lambda(sched, 50.0) == pytest.approx(1.0, abs=1e-12)
    assert schedule_lambda(sched, 25.0) == pytest.approx(0.5, abs=1e-12)


def test_schedule_sine_terms_closed_form():
    # single mode: lambda(T/2) = 1/2 + b1 sin(pi/2) = 1/2 + b1
    sched = ScheduleSpec(total_time=10.0, b=(0.5,))
    assert schedule_lambda(sched, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert schedule_lambda(sched, 10.0) == pytest.approx(1.0, abs=1e-12)
    assert schedule_lambda(sched, 5.0) == pytest.approx(1.0, abs=1e-12)
    # excursion above 1 is legal mid-path
    sched = ScheduleSpec(total_time=10.0, b=(0.9,))
    assert schedule_lambda(sched, 5.0) == pytest.approx(1.4, abs=1e-12)


def test_schedule_multi_mode_matches_direct_sum():
    coeffs = (0.2, -0.1, 0.05)
    sched = ScheduleSpec(total_time=7.0, b=coeffs)
    ts = np.linspace(0.0, 7.0, 13)
    expected = ts / 7.0
    for m, b in enumerate(coeffs, start=1):
        expected = expected + b * np.sin(m * np.pi * ts / 7.0)
    np.testing.assert_allclose(schedule_lambda(sched, ts), expected, atol=1e-14)


def test_schedule_endpoints_pinned_for_any_coefficients():
    rng = np.random.default_rng(23)
    for _ in range(10):
        coeffs = tuple(rng.uniform(-1, 1, 6))
        sched = ScheduleSpec(total_time=50.0, b=coeffs)
        assert abs(schedule_lambda(sched, 0.0)) <= 1e-12
        assert abs(schedule_lambda(sched, 50.0) - 1.0) <= 1e-12


def test_schedule_validation():
    with pytest.raises(ValueError):
        ScheduleSpec(total_time=0.0)
    with pytest.raises(ValueError):
        ScheduleSpec(total_time=10.0, b=(1.5,))
    sched = ScheduleSpec.linear(10.0)
    with pytest.raises(ValueError):
        schedule_lambda(sched, -0.1)
    with pytest.raises(ValueError):
        schedule_lambda(sched, 10.1)


def test_drive_spec_validation():
    DriveSpec(h=(1.0, 0.5))
    with pytest.raises(ValueError):
        DriveSpec(h=(0.0, 1.0))
    with pytest.raises(ValueError):
        DriveSpec(h=(1.2, 1.0))
    assert DriveSpec.uniform(3).h == (1.0, 1.0, 1.0)


def test_ht_endpoints():
    hp = build_hp(inst([3, 1]))
    drive = DriveSpec.uniform(2)
    h1 = build_ht(hp, drive, 1.0)
    np.testing.assert_allclose(h1.matrix, np.diag(hp.diag.diag), atol=1e-15)
    h0 = build_ht(hp, drive, 0.0)
    w = np.linalg.eigvalsh(h0.matrix)
    assert w[0] == pytest.approx(-2.0, abs=1e-12)
    plus = np.full(4, 0.5)
    np.testing.assert_allclose(h0.matrix @ plus, -2.0 * plus, atol=1e-12)


def test_ht_hand_computed_matrix():
    hp = build_hp(inst([3, 1]))
    drive = DriveSpec(h=(0.8, 0.6))
    lam = 0.25
    got = build_ht(hp, drive, lam).matrix
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    # qubit 0 in the least significant slot -> rightmost kron factor
    hd = -0.8 * np.kron(np.eye(2), sx) - 0.6 * np.kron(sx, np.eye(2))
    expected = (1 - lam) * hd + lam * np.diag(hp.diag.diag)
    np.testing.assert_allclose(got, expected, atol=1e-15)
    np.testing.assert_allclose(build_hd_dense(drive), hd, atol=1e-15)


def test_ht_accepts_schedule_excursion_values():
    hp = build_hp(inst([3, 1]))
    drive = DriveSpec.uniform(2)
    m = build_ht(hp, drive, 1.3).matrix
    np.testing.assert_allclose(m, m.T.conj(), atol=1e-15)
    m = build_ht(hp, drive, -0.2).matrix
    np.testing.assert_allclose(m, m.T.conj(), atol=1e-15)


def test_ht_rejects_mismatched_drive():
    hp = build_hp(inst([3, 1]))
    with pytest.raises(ValueError):
        build_ht(hp, DriveSpec.uniform(3), 0.5)
