"""End-to-end acceptance runs, one test per criterion.

Each test records a single PASS/FAIL line, repeated in the terminal summary.
"""
import time

import numpy as np
import pytest

from compressed_ising import cli
from compressed_ising.compressed import (
    CompressedState,
    NoiseSpec,
    build_R0,
    build_Rl,
    compressed_evolution_m,
    compressed_evolution_mhat,
    verify_basis_change,
)
from compressed_ising.exact import (
    CONNECTED,
    GROUND,
    build_quadratic_form,
    diagonalize_modes,
    exact_curve,
    ground_energy,
    magnetization_exact,
    spectral_gap,
)
from compressed_ising.matchgate import antisym_trace_average
from compressed_ising.schedule import IsingSpec, TrotterSchedule, j_grid
from compressed_ising.statevector import trotter_curve
from compressed_ising.verify import check_majorana_expansion
from conftest import random_antisymmetric, record_criterion

GRID = j_grid(2.0, 41)


def test_criterion_1_gate_exact_equivalence():
    start = time.perf_counter()
    worst_sv = worst_reg = 0.0
    for n in (2, 4, 8):
        spec = IsingSpec(n)
        for T in (10.0, 30.0):
            sched = TrotterSchedule.from_params(T=T, dt=0.05)
            hat = compressed_evolution_mhat(spec, sched, GRID)
            worst_sv = max(worst_sv, hat.max_deviation(trotter_curve(spec, sched, GRID)))
            worst_reg = max(worst_reg, compressed_evolution_m(spec, sched, GRID).max_deviation(hat))
    seconds = time.perf_counter() - start
    ok = worst_sv <= 1e-9 and worst_reg <= 1e-10 and seconds < 30
    record_criterion(1, "gate-exact equivalence", ok,
                     f"vs statevector {worst_sv:.2e} (<=1e-9), m vs mhat {worst_reg:.2e} (<=1e-10), "
                     f"{seconds:.1f}s (<30s)")
    assert ok


def test_criterion_2_small_chain_reproduction():
    start = time.perf_counter()
    spec = IsingSpec(8)
    exact = exact_curve(8, GRID, CONNECTED)
    dev = {}
    for T, L in ((100.0, 2000), (30.0, 600), (10.0, 200)):
        sched = TrotterSchedule.from_params(T=T, L=L)
        assert sched.dt == pytest.approx(0.05)
        dev[T] = compressed_evolution_mhat(spec, sched, GRID).max_deviation(exact)
    seconds = time.perf_counter() - start
    ok = dev[100.0] <= 0.02 and dev[10.0] > dev[30.0] and seconds < 60
    record_criterion(2, "n=8 curve vs exact", ok,
                     f"T=100 dev {dev[100.0]:.4f} (<=0.02), T=10 dev {dev[10.0]:.4f} > "
                     f"T=30 dev {dev[30.0]:.4f}, {seconds:.1f}s (<60s)")
    assert ok


def test_criterion_3_large_chain_sweep():
    start = time.perf_counter()
    sched = TrotterSchedule.from_params(T=100.0, L=2000)
    curve = compressed_evolution_mhat(IsingSpec(256), sched, GRID)
    seconds = time.perf_counter() - start
    rise = float(np.max(np.diff(curve.M)))
    d2 = np.diff(curve.M, 2)
    # concave before the transition, first turn to convex marks the inflection
    first_convex = int(np.argmax(d2 > 0))
    inflection = float(GRID[1:-1][first_convex]) if d2[first_convex] > 0 else float("nan")
    ok = seconds < 300 and rise <= 1e-4 and 0.85 <= inflection <= 1.15
    record_criterion(3, "n=256 sweep", ok,
                     f"{seconds:.1f}s (<300s), max rise {rise:.2e} (<=1e-4), "
                     f"inflection at J={inflection:.2f} (in [0.85, 1.15])")
    assert ok


def test_criterion_4_finite_size_family():
    sizes = [2 ** k for k in range(1, 9)]
    grid = GRID[1:]
    family = np.array([exact_curve(n, grid, GROUND).M for n in sizes])
    gaps = np.diff(family, axis=0)
    ordered = bool(np.all(gaps > 0))

    fine = np.arange(0.5, 1.5 + 1e-12, 0.01)
    curvature = []
    for n in sizes[2:6]:
        m = np.array([magnetization_exact(n, J, CONNECTED) for J in fine])
        curvature.append(abs(float(np.min(np.diff(m, 2) / 0.01 ** 2))))
    sharpening = all(b > a for a, b in zip(curvature, curvature[1:]))
    ok = ordered and sharpening
    record_criterion(4, "finite-size family", ok,
                     f"ordered m_hat=1 lowest .. 8 highest: {ordered} (min gap {gaps.min():.2e}); "
                     f"|min d2M/dJ2| for m_hat=3..6: " + ", ".join(f"{c:.2f}" for c in curvature))
    assert ok


def test_criterion_5_noise_study():
    spec = IsingSpec(8)
    sched = TrotterSchedule.from_params(T=30.0, L=600)
    clean = compressed_evolution_mhat(spec, sched, GRID)
    mean_dev = {}
    for x in (1e-3, 1e-2):
        devs = [compressed_evolution_mhat(spec, sched, GRID, noise=NoiseSpec(x, seed)).max_deviation(clean)
                for seed in range(20)]
        mean_dev[x] = float(np.mean(devs))
    ok = mean_dev[1e-3] <= 0.02 and mean_dev[1e-3] < mean_dev[1e-2]
    record_criterion(5, "noise study (20 seeds)", ok,
                     f"x=1e-3 mean max dev {mean_dev[1e-3]:.4f} (<=0.02) < x=1e-2 {mean_dev[1e-2]:.4f}")
    assert ok


def test_criterion_6_identity_suite():
    rng = np.random.default_rng(6)
    res = {}
    res["expansion"] = check_majorana_expansion(4).residual

    so = 0.0
    for m in range(1, 8):
        for op in (build_R0(m, 0.05), build_Rl(m, 2 * 1.3 * 0.05)):
            r = op.dense()
            so = max(so, np.max(np.abs(r @ r.T - np.eye(2 ** m))), abs(np.linalg.det(r) - 1))
    for n in (2, 8, 64):
        state = CompressedState(n, TrotterSchedule.from_params(T=30.0, L=600), mode="m")
        for _ in range(600):
            state.advance()
        so = max(so, state.unitarity_residual(), abs(np.linalg.det(state.W) - 1))
    res["SO(2n)"] = so

    trace = 0.0
    for _ in range(100):
        d = 2 * int(rng.integers(1, 33))
        a = random_antisymmetric(rng, d)
        trace = max(trace, abs(antisym_trace_average(a) - sum(a[2 * k, 2 * k + 1] for k in range(d // 2))))
    res["trace"] = trace

    block = 0.0
    for m in range(2, 7):
        report = verify_basis_change(m, rng.uniform(0.0, 2.0, size=20), rng.uniform(0.0, 0.2))
        block = max(block, max(report.residuals.values()))
    res["block"] = block

    pair = 0.0
    for n in (2, 4, 8, 16, 32, 64, 128):
        for J in rng.uniform(0.0, 3.0, size=3):
            w = np.linalg.eigvalsh(build_quadratic_form(n, J).matrix)
            pair = max(pair, float(np.max(np.abs(w + w[::-1]))))
    res["pair"] = pair

    ok = (res["expansion"] <= 1e-10 and res["SO(2n)"] <= 1e-8 and res["trace"] <= 1e-12
          and res["block"] <= 1e-10 and res["pair"] <= 1e-10)
    record_criterion(6, "identity suite", ok,
                     f"expansion {res['expansion']:.1e}, SO {res['SO(2n)']:.1e}, trace {res['trace']:.1e}, "
                     f"block-diag {res['block']:.1e}, +-pairs {res['pair']:.1e}")
    assert ok


def test_criterion_7_analytic_points():
    sched = TrotterSchedule.from_params(T=100.0, dt=0.05)
    m_adiabatic = compressed_evolution_mhat(IsingSpec(2), sched, [1.0]).M[0]
    target = 2 / np.sqrt(5)
    spec = diagonalize_modes(build_quadratic_form(2, 1.0))
    root5 = np.sqrt(5)
    eig_err = float(np.max(np.abs(np.sort(spec.d) - np.sort(
        [(root5 + 1) / 2, (root5 - 1) / 2, -(root5 + 1) / 2, -(root5 - 1) / 2]))))
    zero = [diagonalize_modes(build_quadratic_form(n, 0.0)) for n in (2, 8, 64)]
    energy_ok = all(ground_energy(s) == -s.n for s in zero)
    gap_ok = all(spectral_gap(s) == 2.0 for s in zero)
    ok = abs(m_adiabatic - target) <= 0.01 and eig_err <= 1e-10 and energy_ok and gap_ok
    record_criterion(7, "analytic points", ok,
                     f"M(n=2,J=1)={m_adiabatic:.4f} vs {target:.4f} (+-0.01), eig err {eig_err:.1e}, "
                     f"E0(J=0)=-n {energy_ok}, gap(J=0)=2 {gap_ok}")
    assert ok


def test_criterion_8_determinism(tmp_path):
    runs = {
        "sweep": ["sweep", "--n", "8", "--T", "30", "--L", "600"],
        "noise": ["noise", "--n", "8", "--T", "30", "--L", "600", "--seeds", "3", "--seed", "11"],
        "exact": ["sweep", "--mode", "exact", "--n", "2,16,64"],
    }
    identical = {}
    for name, argv in runs.items():
        blobs = []
        for i in range(2):
            out = tmp_path / f"{name}-{i}.csv"
            assert cli.main(argv + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        identical[name] = blobs[0] == blobs[1]
    ok = all(identical.values())
    record_criterion(8, "determinism", ok,
                     "byte-identical reruns: " + ", ".join(f"{k} {v}" for k, v in identical.items()))
    assert ok
