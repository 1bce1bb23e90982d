"""Self-check suite behind ``compressed-ising verify``.

Each check computes a residual and compares it with a fixed threshold.
``overrides`` swaps builders (e.g. ``{"build_R0": ...}``) so negative controls
can prove a check actually bites.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from . import compressed
from .exact import CONNECTED, exact_curve, magnetization_exact
from .linalg import max_abs
from .matchgate import MatchGate, circuit_rotation, jordan_wigner, matchgate_rotation
from .schedule import IsingSpec, TrotterSchedule, j_grid
from .statevector import eigenstate_magnetization, trotter_curve


@dataclass
class CheckResult:
    name: str
    residual: float
    threshold: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.residual <= self.threshold)


@dataclass
class VerifyReport:
    level: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def lines(self):
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            yield f"{status}  {c.name:<32} residual={c.residual:.3e} threshold={c.threshold:.1e} {c.detail}"


def z_layer_gates(n, theta):
    """``exp(-i theta sum Z)`` as matchgates: one Z per qubit, the last one via the (n-1, n) pair."""
    gates = [MatchGate.z(theta, k) for k in range(1, n)]
    gates.append(MatchGate.z(theta, n - 1, which=1))
    return gates


def xx_layer_gates(n, theta):
    return [MatchGate.xx(theta, k) for k in range(1, n)]


def check_majorana_expansion(n_max, seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in range(2, n_max + 1):
        cs = [jordan_wigner(j, n) for j in range(1, 2 * n + 1)]
        for k in range(1, n):
            gate = MatchGate.random(rng, k)
            r = matchgate_rotation(gate, n)
            u = _embed(gate.unitary(), k, n)
            for j, cj in enumerate(cs):
                lhs = u.conj().T @ cj @ u
                rhs = sum(r[j, l] * cs[l] for l in range(2 * n))
                worst = max(worst, max_abs(lhs - rhs))
    return CheckResult("majorana_expansion", worst, 1e-10, f"n<={n_max}")


def _embed(u, k, n):
    return np.kron(np.kron(np.eye(2 ** (k - 1)), u), np.eye(2 ** (n - k - 1)))


def check_r0_rl_compilation(n_max, dt=0.05, couplings=(0.3, 1.0, 1.7), build_R0=None, build_Rl=None):
    build_R0 = build_R0 or compressed.build_R0
    build_Rl = build_Rl or compressed.build_Rl
    worst = 0.0
    n = 2
    while n <= n_max:
        m = n.bit_length()
        worst = max(worst, max_abs(build_R0(m, dt).dense() - circuit_rotation(z_layer_gates(n, dt), n)))
        for J in couplings:
            target = circuit_rotation(xx_layer_gates(n, J * dt), n)
            worst = max(worst, max_abs(build_Rl(m, 2 * J * dt).dense() - target))
        n *= 2
    return CheckResult("r0_rl_match_compilation", worst, 1e-12, f"n<={n_max}")


def check_basis_change(m_max, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    names = []
    for m in range(2, m_max + 1):
        dt = rng.uniform(0.0, 0.2)
        report = compressed.verify_basis_change(m, rng.uniform(0.0, 2.0, size=20), dt)
        worst = max(worst, max(report.residuals.values()))
        names.extend(f"m={m}:{k}" for k in report.failures)
    return CheckResult("basis_change_identities", worst, 1e-10, " ".join(names))


def check_gate_exactness(ns, Ts=(10.0, 30.0)):
    worst_sv, worst_reg, worst_so = 0.0, 0.0, 0.0
    grid = j_grid()
    for n in ns:
        spec = IsingSpec(n)
        for T in Ts:
            sched = TrotterSchedule.from_params(T=T, dt=0.05)
            hat = compressed.compressed_evolution_mhat(spec, sched, grid)
            full = compressed.compressed_evolution_m(spec, sched, grid)
            sv = trotter_curve(spec, sched, grid)
            worst_sv = max(worst_sv, hat.max_deviation(sv))
            worst_reg = max(worst_reg, hat.max_deviation(full))
            state = compressed.CompressedState(n, sched, mode="m")
            for _ in range(sched.L):
                state.advance()
            worst_so = max(worst_so, state.unitarity_residual())
    return [
        CheckResult("compressed_vs_statevector", worst_sv, 1e-9, f"n in {tuple(ns)}"),
        CheckResult("register_m_vs_mhat", worst_reg, 1e-10, f"n in {tuple(ns)}"),
        CheckResult("accumulated_rotation_orthogonal", worst_so, 1e-8, f"n in {tuple(ns)}"),
    ]


def check_exact_vs_dense(ns):
    worst = 0.0
    for n in ns:
        for J in j_grid():
            worst = max(worst, abs(magnetization_exact(n, J) - eigenstate_magnetization(n, J)))
    return CheckResult("modes_vs_dense_eigenstate", worst, 1e-9, f"n in {tuple(ns)}")


def check_n8_reproduction():
    grid = j_grid()
    sched = TrotterSchedule.from_params(T=100.0, L=2000)
    curve = compressed.compressed_evolution_mhat(IsingSpec(8), sched, grid)
    dev = curve.max_deviation(exact_curve(8, grid, CONNECTED))
    return CheckResult("n8_T100_vs_exact", dev, 0.02, "n=8 T=100 L=2000")


def run_verify(level="fast", overrides=None):
    """Run the named checks; ``fast`` covers n<=4 / m<=3, ``full`` n<=8 / m<=6."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    overrides = overrides or {}
    start = time.perf_counter()
    full = level == "full"
    n_max = 8 if full else 4
    report = VerifyReport(level)
    report.checks.append(check_majorana_expansion(4))
    report.checks.append(check_r0_rl_compilation(
        n_max, build_R0=overrides.get("build_R0"), build_Rl=overrides.get("build_Rl")))
    report.checks.append(check_basis_change(6 if full else 3))
    ns = (2, 4, 8) if full else (2, 4)
    report.checks.extend(check_gate_exactness(ns, (10.0, 30.0) if full else (10.0,)))
    report.checks.append(check_exact_vs_dense(ns))
    if full:
        report.checks.append(check_n8_reproduction())
    report.seconds = time.perf_counter() - start
    return report
