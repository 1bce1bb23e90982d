"""Brute-force 2^n amplitude simulation of the same Trotter plan.

Used as ground truth for the compressed registers and the free-fermion
solution.  Qubit 1 is the most significant bit of the amplitude index.
"""
import numpy as np

from . import _kernels
from .curves import STATEVECTOR, MagnetizationCurve
from .exact import BRANCHES, CONNECTED, GROUND
from .schedule import FULL_Z, HALF_Z, XX, checkpoint_steps, coupling_at, trotter_plan

MAX_QUBITS = 12
DEGENERACY_TOL = 1e-9


class DegenerateEigenstateError(ValueError):
    pass


def _check_n(n):
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"statevector oracle supports 1 <= n <= {MAX_QUBITS}, got {n}")


def zero_state(n):
    _check_n(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    return psi


def z_sums(n):
    """Eigenvalue of ``sum_k Z_k`` on each basis state."""
    idx = np.arange(2 ** n)
    ones = np.zeros(2 ** n, dtype=np.int64)
    for q in range(n):
        ones += (idx >> q) & 1
    return n - 2 * ones


def apply_step(psi, step, n, inplace=False):
    """Apply one plan step: ``exp(-i angle sum Z)`` or ``exp(-i angle sum X_i X_{i+1})``.

    The XX layer runs odd bonds (1-2, 3-4, ...) first, then even bonds.
    """
    _check_n(n)
    if not inplace:
        psi = psi.copy()
    if step.tag in (HALF_Z, FULL_Z):
        psi *= np.exp(-1j * step.angle * z_sums(n))
    elif step.tag == XX:
        c, s = np.cos(step.angle), np.sin(step.angle)
        _kernels.xx_layer(psi, n, 0, c, s)
        _kernels.xx_layer(psi, n, 1, c, s)
    else:
        raise ValueError(f"unknown step tag {step.tag!r}")
    return psi


def magnetization(psi, n):
    return float(np.abs(psi) ** 2 @ z_sums(n)) / n


def z_expectation(psi, k, n):
    """``<Z_k>`` for 1-based qubit ``k``."""
    bit = (np.arange(2 ** n) >> (n - k)) & 1
    return float(np.abs(psi) ** 2 @ (1 - 2 * bit))


def apply_two_qubit(psi, u, k, n):
    """Apply a 4x4 unitary to qubits ``(k, k+1)`` (1-based); returns a new state."""
    _check_n(n)
    view = psi.reshape(2 ** (k - 1), 4, 2 ** (n - k - 1))
    return np.einsum("ab,ibj->iaj", u, view).reshape(-1)


def run_plan(plan, n, psi=None):
    psi = zero_state(n) if psi is None else psi.copy()
    for step in plan:
        apply_step(psi, step, n, inplace=True)
    return psi


def trotter_magnetization(spec, schedule, J):
    """Site-averaged ``<Z>`` after the Trotter plan up to ``J``, starting from ``|0...0>``."""
    _check_n(spec.n)
    return magnetization(run_plan(trotter_plan(schedule, J), spec.n), spec.n)


def trotter_curve(spec, schedule, checkpoints):
    """Incremental version of :func:`trotter_magnetization` over ascending checkpoints.

    The closing half Z-step of each plan is diagonal and therefore left out of
    the measurement; the running state is the plan prefix up to ``xx(L(J))``.
    """
    n = spec.n
    _check_n(n)
    targets = checkpoint_steps(schedule, checkpoints)
    psi = zero_state(n)
    zs = z_sums(n)
    half = np.exp(-0.5j * schedule.dt * zs)
    full = half * half
    l = 0
    values = []
    for steps in targets:
        while l < steps:
            l += 1
            psi *= half if l == 1 else full
            theta = coupling_at(schedule, l) * schedule.dt
            c, s = np.cos(theta), np.sin(theta)
            _kernels.xx_layer(psi, n, 0, c, s)
            _kernels.xx_layer(psi, n, 1, c, s)
        values.append(float(np.abs(psi) ** 2 @ zs) / n)
    meta = {"n": n, "T": schedule.T, "L": schedule.L, "dt": schedule.dt,
            "J_max": schedule.j_max, "seed": 0, "noise_x": 0.0,
            "final_norm": float(np.linalg.norm(psi))}
    return MagnetizationCurve(checkpoints, values, STATEVECTOR, meta)


def dense_hamiltonian(n, J):
    """``sum Z_i + J sum X_i X_{i+1}`` as a dense real matrix."""
    _check_n(n)
    dim = 2 ** n
    h = np.diag(z_sums(n).astype(float))
    idx = np.arange(dim)
    for q in range(n - 1):
        mask = 3 << (n - 2 - q)
        h[idx, idx ^ mask] += J
    return h


def eigenstate_magnetization(n, J, branch=CONNECTED):
    """``<Z>`` per site in the top (``connected``) or bottom (``ground``) eigenstate of ``H(J)``."""
    if n > 10:
        raise ValueError("dense diagonalization is limited to n <= 10")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")
    w, v = np.linalg.eigh(dense_hamiltonian(n, J))
    i, j = (0, 1) if branch == GROUND else (-1, -2)
    if abs(w[i] - w[j]) <= DEGENERACY_TOL:
        raise DegenerateEigenstateError(f"extremal eigenvalue of H({J}) is degenerate")
    return magnetization(v[:, i], n)


def eigen_energies(n, J):
    return np.linalg.eigh(dense_hamiltonian(n, J))[0]
