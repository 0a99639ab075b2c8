import numpy as np
import pytest
from scipy.linalg import expm

from nppsim.cd import (
    AGP_MAX_N_FIRST_ORDER,
    AGP_MAX_N_HIGHER_ORDER,
    AGP_MAX_ORDER,
    BCH_MAX_N,
    ActionCoefficients,
    agp_from_parts,
    bch_check,
    build_agp,
    minimize_action,
    pauli_decompose,
)
from nppsim.hamiltonians import DriveSpec, build_hd_dense, build_hp
from nppsim.instances import NppInstance, generate_instance

SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def inst(numbers, seed=0):
    return NppInstance(n=len(numbers), numbers=tuple(numbers), seed=seed)


def dense_parts(instance, drive):
    hp = build_hp(instance)
    return build_hd_dense(drive), np.diag(hp.diag.diag)


def test_first_operator_matches_dense_commutator():
    instance = inst([3, 1])
    drive = DriveSpec.uniform(2)
    hd, hp = dense_parts(instance, drive)
    lam = 0.5
    h_lam = (1 - lam) * hd + lam * hp
    dh = hp - hd
    oracle = h_lam @ dh - dh @ h_lam
    ansatz = build_agp(instance, drive, lam, l=1)
    np.testing.assert_allclose(ansatz.operators[0], oracle, atol=1e-12)


def test_first_operator_is_lambda_independent_commutator():
    # [H(lam), H_P - H_D] = [H_D, H_P] for every lam on the linear path
    instance = inst([3, 1])
    drive = DriveSpec.uniform(2)
    hd, hp = dense_parts(instance, drive)
    oracle = hd @ hp - hp @ hd
    for lam in (0.25, 0.75):
        ansatz = build_agp(instance, drive, lam, l=1)
        np.testing.assert_allclose(ansatz.operators[0], oracle, atol=1e-12)


def test_first_operator_is_real_antisymmetric():
    instance = generate_instance(n=4, seed=91)
    ansatz = build_agp(instance, DriveSpec.uniform(4), 0.5, l=1)
    o1 = ansatz.operators[0]
    assert np.isrealobj(o1)
    np.testing.assert_allclose(o1, -o1.T, atol=1e-12)
    # i O_1 is the Hermitian operator content of the gauge potential
    np.testing.assert_allclose(1j * o1, (1j * o1).conj().T, atol=1e-12)


def test_leading_coefficient_negative_across_lambda_and_instances():
    rng = np.random.default_rng(92)
    for _ in range(5):
        instance = generate_instance(n=5, seed=int(rng.integers(1 << 30)))
        for lam in (0.25, 0.5, 0.75):
            coeffs = minimize_action(instance, DriveSpec.uniform(5), lam, l=1)
            assert coeffs[0] < 0
            assert not coeffs.singular


def test_leading_coefficient_regression_two_qubits():
    coeffs = minimize_action(inst([3, 1]), DriveSpec.uniform(2), 0.5, l=1)
    assert isinstance(coeffs, list)
    assert len(coeffs) == 1
    assert coeffs[0] == pytest.approx(-0.24150943396226415, abs=1e-12)


def test_stationary_point_minimizes_action_on_grid():
    instance = generate_instance(n=4, seed=93)
    drive = DriveSpec.uniform(4)
    lam = 0.4
    hd, hp = dense_parts(instance, drive)
    h_lam = (1 - lam) * hd + lam * hp
    dh = hp - hd
    o1 = h_lam @ dh - dh @ h_lam
    o2 = h_lam @ o1 - o1 @ h_lam

    def action(alpha):
        g = dh + alpha * o2
        return float(np.sum(g * g.T))

    (alpha1,) = minimize_action(instance, drive, lam, l=1)
    s_star = action(alpha1)
    for eps in (1e-3, 1e-2, 0.1):
        assert s_star <= action(alpha1 + eps)
        assert s_star <= action(alpha1 - eps)
    # parabola vertex from three samples lands on the solved coefficient
    s_m, s_0, s_p = action(alpha1 - 0.1), action(alpha1), action(alpha1 + 0.1)
    vertex = alpha1 - 0.1 * (s_p - s_m) / (2 * (s_p - 2 * s_0 + s_m))
    assert vertex == pytest.approx(alpha1, abs=1e-9)


def test_higher_order_never_increases_action():
    instance = inst([5, 3, 2])
    drive = DriveSpec.uniform(3)
    lam = 0.5
    hd, hp = dense_parts(instance, drive)
    h_lam = (1 - lam) * hd + lam * hp
    dh = hp - hd

    chain = [h_lam @ dh - dh @ h_lam]
    for _ in range(5):
        chain.append(h_lam @ chain[-1] - chain[-1] @ h_lam)
    evens = chain[1::2]  # O_2, O_4, O_6

    def action(alphas):
        g = dh + sum(a * o for a, o in zip(alphas, evens))
        return float(np.sum(g * g.T))

    s_prev = None
    for l in (1, 2, 3):
        coeffs = minimize_action(instance, drive, lam, l=l)
        assert len(coeffs) == l
        s_l = action(coeffs)
        if s_prev is not None:
            assert s_l <= s_prev + 1e-9
        s_prev = s_l


def test_vanishing_drive_is_singular_with_zero_solution():
    # h = 0 makes every operator in the chain vanish: rank-deficient system
    ansatz = agp_from_parts(np.zeros(2), build_hp(inst([3, 1])).diag.diag, 0.5, l=1)
    assert ansatz.singular
    np.testing.assert_allclose(ansatz.operators[0], 0.0, atol=1e-15)
    assert ansatz.coefficients[0] == pytest.approx(0.0, abs=1e-15)


def test_constant_diagonal_is_singular():
    ansatz = agp_from_parts(np.ones(2), np.zeros(4), 0.5, l=1)
    assert ansatz.singular


def test_gauge_potential_support_is_one_y_one_z():
    for n, seed in ((2, 94), (3, 95), (4, 96)):
        instance = generate_instance(n=n, seed=seed)
        ansatz = build_agp(instance, DriveSpec.uniform(n), 0.5, l=1)
        support = pauli_decompose(1j * ansatz.operators[0], n)
        assert support, "gauge potential should not vanish on a generic instance"
        for string, coeff in support.items():
            assert string.count("Y") == 1
            assert string.count("Z") == 1
            assert string.count("I") == n - 2
            assert abs(coeff.imag) < 1e-12
        # in particular: no purely local terms and no X content
        assert all("X" not in s for s in support)


def test_bch_zero_durations_give_zero_error():
    rep = bch_check(inst([3, 1]), 0.0, 0.0)
    assert rep.frobenius_error == pytest.approx(0.0, abs=1e-13)
    np.testing.assert_allclose(rep.exact_product, np.eye(4), atol=1e-13)


def test_bch_product_matches_expm_oracle():
    instance = inst([3, 1])
    hp = build_hp(instance)
    beta, gamma = 0.3, 0.7
    rep = bch_check(instance, beta, gamma)
    hd = -(np.kron(np.eye(2), SX) + np.kron(SX, np.eye(2)))
    # the phase factor acts first, the drive factor second
    oracle = expm(-1j * beta * hd) @ expm(-1j * gamma * np.diag(hp.diag.diag))
    np.testing.assert_allclose(rep.exact_product, oracle, atol=1e-12)


def test_bch_error_regression_and_bound():
    rep = bch_check(inst([3, 1]), 0.05, 0.05)
    assert rep.frobenius_error < 1e-4
    assert rep.frobenius_error == pytest.approx(8.986e-5, rel=1e-3)


def test_bch_error_is_third_order_in_durations():
    instance = generate_instance(n=3, seed=97)
    e1 = bch_check(instance, 0.1, 0.1).frobenius_error
    e2 = bch_check(instance, 0.05, 0.05).frobenius_error
    # halving both durations should cut the residual ~8x; demand at least 4x
    assert e2 < e1 / 4
    assert e2 > 0


def test_size_and_order_guards():
    with pytest.raises(ValueError, match="order"):
        build_agp(inst([3, 1]), DriveSpec.uniform(2), 0.5, l=AGP_MAX_ORDER + 1)
    big = generate_instance(n=AGP_MAX_N_FIRST_ORDER + 1, seed=98)
    with pytest.raises(ValueError, match="cap"):
        build_agp(big, DriveSpec.uniform(big.n), 0.5, l=1)
    mid = generate_instance(n=AGP_MAX_N_HIGHER_ORDER + 1, seed=99)
    with pytest.raises(ValueError, match="cap"):
        build_agp(mid, DriveSpec.uniform(mid.n), 0.5, l=2)
    with pytest.raises(ValueError, match="dense cap"):
        bch_check(generate_instance(n=BCH_MAX_N + 1, seed=100), 0.1, 0.1)
    with pytest.raises(ValueError):
        pauli_decompose(np.eye(32, dtype=complex), 5)
    with pytest.raises(ValueError, match="shape"):
        pauli_decompose(np.eye(4, dtype=complex), 3)


def test_pauli_decompose_known_operators():
    assert pauli_decompose(np.eye(2, dtype=complex), 1) == {"I": 1.0}
    got = pauli_decompose(np.array([[1, 1], [1, -1]], dtype=complex), 1)
    assert got == {"X": 1.0, "Z": 1.0}
    # ZX means Z on qubit 0 (least significant bit), X on qubit 1
    zx = np.kron(SX, np.array([[1, 0], [0, -1]])).astype(complex)
    assert pauli_decompose(zx, 2) == {"ZX": (1 + 0j)}


def test_action_coefficients_container():
    c = ActionCoefficients([1.5, -2.0], singular=True)
    assert list(c) == [1.5, -2.0]
    assert c.singular
