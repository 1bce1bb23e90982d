import numpy as np
import pytest

from compressed_ising import compressed as cp
from compressed_ising.exact import exact_curve
from compressed_ising.linalg import max_abs
from compressed_ising.schedule import IsingSpec, TrotterSchedule, j_grid
from compressed_ising.statevector import trotter_curve
from compressed_ising.verify import check_r0_rl_compilation

SCHED = TrotterSchedule.from_params(T=10.0, dt=0.05)


def test_r0_examples():
    assert np.array_equal(cp.build_R0(3, 0.0).dense(), np.eye(8))
    r = cp.build_R0(1, np.pi / 4).dense()
    assert max_abs(r - np.array([[0.0, -1.0], [1.0, 0.0]])) <= 1e-15


def test_rl_examples():
    assert np.array_equal(cp.build_Rl(3, 0.0).dense(), np.eye(8))
    r = cp.build_Rl(2, 0.3).dense()
    c, s = np.cos(0.3), np.sin(0.3)
    expected = np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]])
    assert max_abs(r - expected) == 0


def test_ud_examples():
    assert np.array_equal(cp.build_Ud(2, 0.0).dense(), np.eye(4))
    assert max_abs(cp.build_Ud(1, np.pi).dense() - np.diag([1, -1])) <= 1e-15
    assert cp.ud_index(3) == 7


@pytest.mark.parametrize("m", [1, 2, 3, 5])
@pytest.mark.parametrize("transpose", [False, True])
def test_structured_apply_matches_dense(m, transpose, rng):
    d = 2 ** m
    for op in (cp.build_R0(m, 0.07), cp.build_Rl(m, 0.31), cp.build_Ud(m, 0.4)):
        w = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        dense = op.dense().T if transpose else op.dense()
        expected = dense @ w
        op.apply_left(w, transpose=transpose)
        assert max_abs(w - expected) <= 1e-14


@pytest.mark.parametrize("m", [1, 2, 4, 6])
def test_rotations_special_orthogonal(m):
    for op in (cp.build_R0(m, 0.05), cp.build_Rl(m, 0.21)):
        r = op.dense()
        assert max_abs(r @ r.T - np.eye(2 ** m)) <= 1e-8
        assert abs(np.linalg.det(r) - 1) <= 1e-8


def test_r0_rl_match_gate_compilation():
    result = check_r0_rl_compilation(8)
    assert result.passed, result


def test_opposite_r0_orientation_does_not_match():
    flipped = lambda m, dt: cp.build_R0(m, -dt)
    assert not check_r0_rl_compilation(4, build_R0=flipped).passed


def test_v_is_unitary_and_rejects_small_m():
    for m in range(2, 7):
        v = cp.build_V(m)
        assert max_abs(v.conj().T @ v - np.eye(2 ** m)) <= 1e-12
    with pytest.raises(ValueError):
        cp.build_V(1)


def test_identities_m2_five_steps():
    report = cp.verify_basis_change(2, [0.04 * l for l in range(1, 6)], 0.05)
    assert max(report.residuals.values()) <= 1e-12
    assert set(report.residuals) == set("abcdef")


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_identities_random(m, rng):
    dt = rng.uniform(0.0, 0.2)
    report = cp.verify_basis_change(m, rng.uniform(0.0, 2.0, size=20), dt)
    assert report.passed, report.failures
    report.check()


def test_tampered_v_fails():
    v = cp.build_V(3)
    v[0, 0] *= -1
    report = cp.verify_basis_change(3, [0.5, 1.0], 0.05, v=v)
    assert "a" in report.failures or "d" in report.failures
    with pytest.raises(cp.BasisChangeError) as err:
        report.check()
    assert err.value.residual > 1e-10


def test_identity_suite_range():
    with pytest.raises(ValueError):
        cp.verify_basis_change(8, [1.0], 0.05)


def test_y_expectation_column_formula(rng):
    for d in (2, 4, 16):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        w, _ = np.linalg.qr(a)
        assert abs(cp.y_expectation(w) - cp.y_expectation_dense(w)) <= 1e-12
    assert cp.y_expectation(np.eye(8)) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_registers_agree_with_statevector(n):
    spec, grid = IsingSpec(n), j_grid()
    hat = cp.compressed_evolution_mhat(spec, SCHED, grid)
    full = cp.compressed_evolution_m(spec, SCHED, grid)
    sv = trotter_curve(spec, SCHED, grid)
    assert hat.max_deviation(sv) <= 1e-9
    assert full.max_deviation(hat) <= 1e-10
    assert hat.M[0] == pytest.approx(1.0, abs=1e-15)


def test_n2_register_m_has_two_qubits():
    curve = cp.compressed_evolution_m(IsingSpec(2), SCHED, [0.0, 1.0])
    assert curve.provenance == "compressed-m"


def test_adiabatic_close_to_exact():
    sched = TrotterSchedule.from_params(T=100.0, dt=0.05)
    hat = cp.compressed_evolution_mhat(IsingSpec(2), sched, [0.0, 1.0])
    assert hat.M[1] == pytest.approx(2 / np.sqrt(5), abs=0.01)
    assert hat.max_deviation(exact_curve(2, [0.0, 1.0])) <= 0.01


@pytest.mark.parametrize("mode,width", [("m", 4), ("mhat", 3)])
def test_op_counter(mode, width):
    counter = cp.OpCounter()
    state = cp.CompressedState(8, SCHED, mode=mode, counter=counter)
    for _ in range(SCHED.L):
        state.advance()
    assert counter.applies == 2 * SCHED.L
    assert counter.row_updates <= 2 ** width * counter.applies
    assert state.unitarity_residual() <= 1e-8
    with pytest.raises(ValueError):
        state.advance()


def test_deterministic_and_zero_noise():
    spec, grid = IsingSpec(8), j_grid()
    a = cp.compressed_evolution_mhat(spec, SCHED, grid)
    b = cp.compressed_evolution_mhat(spec, SCHED, grid)
    c = cp.compressed_evolution_mhat(spec, SCHED, grid, noise=cp.NoiseSpec(0.0, 5))
    assert np.array_equal(a.M, b.M) and np.array_equal(a.M, c.M)


def test_noise_reproducible_and_seeded():
    spec, grid = IsingSpec(8), j_grid()
    a = cp.compressed_evolution_mhat(spec, SCHED, grid, noise=cp.NoiseSpec(0.01, 3))
    b = cp.compressed_evolution_mhat(spec, SCHED, grid, noise=cp.NoiseSpec(0.01, 3))
    c = cp.compressed_evolution_mhat(spec, SCHED, grid, noise=cp.NoiseSpec(0.01, 4))
    assert np.array_equal(a.M, b.M)
    assert not np.array_equal(a.M, c.M)
    assert a.M[0] == pytest.approx(1.0, abs=1e-15)
    assert a.meta["seed"] == 3 and a.meta["noise_x"] == 0.01


def test_noise_angles_are_in_range():
    state = cp.CompressedState(8, SCHED, noise=cp.NoiseSpec(0.01, 1))
    for _ in range(50):
        state.advance()
    angles = np.array(state.noise_angles)
    assert len(angles) == 50 and np.all((angles >= 0) & (angles <= 0.01))
    assert state.unitarity_residual() <= 1e-12


def test_noise_rejected_on_m_register_and_negative_x():
    with pytest.raises(ValueError):
        cp.CompressedState(8, SCHED, mode="m", noise=cp.NoiseSpec(0.01, 1))
    with pytest.raises(ValueError):
        cp.NoiseSpec(-0.1)


def test_schedule_spec_mismatch():
    with pytest.raises(ValueError):
        cp.compressed_evolution_mhat(IsingSpec(8, j_max=1.0), SCHED, [0.0])
