"""Exact free-fermion solution of the open Ising chain.

With ``a = (a_1, a_1^dag, ..., a_n, a_n^dag)`` the Hamiltonian is the quadratic
form ``a^dag M a``; ``M`` is real symmetric with 2x2 diagonal blocks ``-Z`` and
off-diagonal blocks ``-(J/2)(Z + iY)``.  Its spectrum is symmetric,
``{+-lambda_i}``, and the ground state is the vacuum of the modes obtained by
diagonalizing ``M``.
"""
from dataclasses import dataclass

import numpy as np

from .curves import EXACT, MagnetizationCurve
from .linalg import eig_sym_real, max_abs

PAIR_TOL = 1e-9
# modes this soft are re-split jointly; eigenvectors of a +-lambda pair this
# close are not individually reliable
NEAR_ZERO_TOL = 1e-6

GROUND = "ground"
CONNECTED = "connected"
BRANCHES = (GROUND, CONNECTED)

_DIAG_BLOCK = np.array([[-1.0, 0.0], [0.0, 1.0]])
_COUPLING_BLOCK = np.array([[1.0, 1.0], [-1.0, -1.0]])


class UnpairedSpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticForm:
    n: int
    J: float
    matrix: np.ndarray


@dataclass(frozen=True)
class ModeSpectrum:
    """Mode energies ``lambdas`` (descending, all >= 0) and the orthogonal ``U``.

    Column ``2l-1`` of ``U`` has eigenvalue ``d[2l-1] = lambda``, column ``2l`` is
    its particle-hole partner with eigenvalue ``-lambda`` (1-based).
    """

    lambdas: np.ndarray
    U: np.ndarray
    d: np.ndarray
    n: int
    J: float


def build_quadratic_form(n, J):
    if n < 2:
        raise ValueError("chain needs at least two sites")
    mat = np.zeros((2 * n, 2 * n))
    off = -0.5 * J * _COUPLING_BLOCK
    for i in range(n):
        s = 2 * i
        mat[s:s + 2, s:s + 2] = _DIAG_BLOCK
        if i + 1 < n:
            mat[s:s + 2, s + 2:s + 4] = off
            mat[s + 2:s + 4, s:s + 2] = off.T
    return QuadraticForm(n, float(J), mat)


def _swap_pairs(n):
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [1.0, 0.0]]))


def diagonalize_modes(q, method="auto"):
    """Diagonalize ``M`` and arrange the eigenvectors into particle-hole pairs.

    The partner of a ``+lambda`` eigenvector ``u`` is ``(1 (x) X) u``.  Modes with
    ``|lambda| <= NEAR_ZERO_TOL`` (edge modes deep in the ordered phase) are
    rebuilt together: the swap operator splits their span into even and odd
    parts, ``M`` maps one onto the other, and the SVD of that map gives
    ``u = (v_even + v_odd) / sqrt(2)`` with energy equal to the singular value.
    """
    n = q.n
    w, vecs = eig_sym_real(q.matrix, method=method)
    scale = max(1.0, max_abs(w))
    pair_residual = max_abs(w + w[::-1]) if w.size else 0.0
    if pair_residual > PAIR_TOL * scale:
        raise UnpairedSpectrumError(f"eigenvalues are not +- paired (residual {pair_residual:.3e})")
    swap = _swap_pairs(n)

    soft = np.abs(w) <= NEAR_ZERO_TOL * scale
    positive = (w > 0) & ~soft
    particles = [vecs[:, i] for i in np.flatnonzero(positive)]
    energies = list(w[positive])

    k = int(soft.sum())
    if k:
        if k % 2:
            raise UnpairedSpectrumError("odd-dimensional soft-mode subspace")
        q_soft = vecs[:, soft]
        _, kv = np.linalg.eigh(q_soft.T @ swap @ q_soft)
        odd = q_soft @ kv[:, :k // 2]
        even = q_soft @ kv[:, k // 2:]
        left, sigma, right_t = np.linalg.svd(even.T @ q.matrix @ odd)
        even, odd = even @ left, odd @ right_t.T
        for i in range(k // 2):
            particles.append((even[:, i] + odd[:, i]) / np.sqrt(2))
            energies.append(float(sigma[i]))
    if len(particles) != n:
        raise UnpairedSpectrumError(f"found {len(particles)} positive modes for {n} sites")

    order = np.argsort(-np.asarray(energies), kind="stable")
    lambdas = np.asarray(energies)[order]
    u = np.empty((2 * n, 2 * n))
    for l, idx in enumerate(order):
        u[:, 2 * l] = particles[idx]
        u[:, 2 * l + 1] = swap @ particles[idx]
    d = np.empty(2 * n)
    d[0::2] = lambdas
    d[1::2] = -lambdas
    return ModeSpectrum(lambdas, u, d, n, q.J)


def ground_energy(spec):
    """Sum of the negative-branch mode energies, ``-sum lambda``."""
    return float(np.sum(spec.d[1::2]))


def spectral_gap(spec):
    """``E_1 - E_0``: one quasi-particle in the softest mode, ``2 lambda_min``."""
    return float(2.0 * spec.lambdas[-1])


def occupation_projector(n):
    """``sum_l |2l-1><2l-1|``; picks the ``a_l^dag a_l`` terms out of ``a^dag (.) a``."""
    p = np.zeros((2 * n, 2 * n))
    p[0::2, 0::2] = np.eye(n)
    return p


def magnetization_from_modes(spec, branch=CONNECTED):
    # <b^dag_2l b_2l> = 1 in the vacuum, so sum_l <a_l^dag a_l> = sum_l (U^T P U)_{2l,2l}
    holes = spec.U[:, 1::2]
    occupied = float(np.sum(holes[0::2] ** 2))
    ground = 1.0 - 2.0 * occupied / spec.n
    if branch == GROUND:
        return ground
    if branch == CONNECTED:
        return -ground
    raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")


def magnetization_exact(n, J, branch=CONNECTED):
    """Site-averaged ``<Z>`` in an extremal eigenstate of ``H(J)``.

    ``branch="ground"`` is the ground state (``M(0) = -1``);
    ``branch="connected"`` is the eigenstate reached adiabatically from
    ``|0...0>`` (``M(0) = +1``).  The two are related by the map
    ``H -> -H``, ``Z -> -Z`` so they differ only in sign.
    """
    if J < 0:
        raise ValueError("coupling must be non-negative")
    return magnetization_from_modes(diagonalize_modes(build_quadratic_form(n, J)), branch)


def exact_curve(n, checkpoints, branch=CONNECTED):
    checkpoints = np.asarray(checkpoints, dtype=float)
    values = [magnetization_exact(n, J, branch) for J in checkpoints]
    meta = {"n": n, "branch": branch, "seed": 0, "noise_x": 0.0}
    return MagnetizationCurve(checkpoints, values, EXACT, meta)
