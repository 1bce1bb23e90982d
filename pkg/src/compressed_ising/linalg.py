"""Dense matrix kernel shared by every other module.

Matrices are plain numpy arrays.  Functions here never mutate their inputs.
"""
from functools import reduce

import numpy as np

from . import _kernels
from ._config import get_tol

# Above this dimension eig_sym_real(method="auto") hands over to LAPACK;
# cyclic Jacobi is O(d^3) per sweep and ~10 sweeps are typical.
JACOBI_MAX_DIM = 128

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# i*Y as a real matrix
IY = np.array([[0.0, 1.0], [-1.0, 0.0]])


class LinalgError(ValueError):
    """Raised when an input violates a structural precondition."""


class NotConvergedError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _as_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise LinalgError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    return a


def max_abs(a):
    """Entrywise max norm."""
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def mat_mul(a, b):
    a = _as_matrix(a, "left factor")
    b = _as_matrix(b, "right factor")
    if a.shape[1] != b.shape[0]:
        raise LinalgError(f"inner dimensions disagree: {a.shape} @ {b.shape}")
    return a @ b


def dagger(a):
    return _as_matrix(a).conj().T.copy()


def transpose(a):
    return _as_matrix(a).T.copy()


def kron(factors):
    """Left-to-right Kronecker product of a non-empty sequence of matrices."""
    factors = list(factors)
    if not factors:
        raise LinalgError("kron needs at least one factor")
    return reduce(np.kron, (_as_matrix(f) for f in factors))


def is_unitary(u, tol=None):
    tol = get_tol() if tol is None else tol
    u = _as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def is_special_orthogonal(r, tol=None):
    tol = get_tol() if tol is None else tol
    r = _as_matrix(r)
    if r.shape[0] != r.shape[1] or np.iscomplexobj(r) and max_abs(r.imag) > tol:
        return False
    r = np.real(r)
    if max_abs(r @ r.T - np.eye(r.shape[0])) > tol:
        return False
    return abs(np.linalg.det(r) - 1.0) <= tol


def eig_sym_real(a, tol=None, method="auto", max_sweeps=60):
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    a : (d, d) array_like
        Real symmetric input; rejected if ``max|a - a.T| > tol``.
    tol : float, optional
        Symmetry tolerance, defaults to the package tolerance.
    method : {"auto", "jacobi", "lapack"}
        ``"jacobi"`` runs cyclic Jacobi rotations; ``"lapack"`` calls
        :func:`numpy.linalg.eigh`; ``"auto"`` picks Jacobi up to
        ``JACOBI_MAX_DIM``.
    max_sweeps : int
        Jacobi iteration cap.

    Returns
    -------
    eigenvalues : ndarray
        Sorted descending.
    u : ndarray
        Orthogonal matrix whose columns are the matching eigenvectors, so
        that ``a = u @ diag(eigenvalues) @ u.T``.
    """
    tol = get_tol() if tol is None else tol
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"eigensolver needs a square matrix, got {a.shape}")
    if np.iscomplexobj(a):
        if max_abs(a.imag) > tol:
            raise LinalgError("eigensolver needs a real matrix")
        a = a.real
    a = np.array(a, dtype=float)
    asym = max_abs(a - a.T)
    if asym > tol:
        raise LinalgError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "lapack":
        w, u = np.linalg.eigh(a)
    elif method == "jacobi":
        work = 0.5 * (a + a.T)
        w, vt, _, off = _kernels.jacobi_eigh(work, 1e-15, max_sweeps)
        scale = max(max_abs(a), 1e-300)
        if off > 1e-12 * scale * a.shape[0]:
            raise NotConvergedError(f"Jacobi did not converge in {max_sweeps} sweeps", off)
        u = vt.T
    else:
        raise LinalgError(f"unknown eigensolver method {method!r}")
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(u[:, order])
