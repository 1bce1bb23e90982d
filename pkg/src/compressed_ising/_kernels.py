"""Hot inner loops.

Every kernel has a pure-numpy implementation (``*_py``) and a numba one
(``*_nb``).  The public name is bound to the numba version unless numba is
missing or ``COMPRESSED_ISING_NUMBA=0`` is set.  Both versions mutate their
array argument in place and return the same auxiliary value.
"""
import numpy as np

from ._config import USE_NUMBA

__all__ = ["givens_rows", "xx_layer", "jacobi_eigh", "BACKEND"]


# --- Givens rotations on aligned row pairs ---------------------------------

def givens_rows_py(w, first, c, s):
    """Rotate rows (a, a+1), a = first, first+2, ...: ra <- c ra - s rb, rb <- s ra + c rb.

    Returns the number of rows touched.
    """
    npairs = (w.shape[0] - first) // 2
    stop = first + 2 * npairs
    ra = w[first:stop:2].copy()
    rb = w[first + 1:stop:2]
    w[first:stop:2] = c * ra - s * rb
    w[first + 1:stop:2] = s * ra + c * rb
    return 2 * npairs


# --- statevector: exp(-i theta X_q X_{q+1}) on every pair q = start, start+2, ...

def xx_layer_py(psi, n, start, c, s):
    """Apply cos(theta) - i sin(theta) X_q X_{q+1} for q = start, start+2, ... (0-based).

    Qubit 0 is the most significant bit.  Returns the number of gates applied.
    """
    gates = 0
    for q in range(start, n - 1, 2):
        view = psi.reshape(1 << q, 2, 2, 1 << (n - q - 2))
        old = view.copy()
        view[...] = c * old - 1j * s * old[:, ::-1, ::-1, :]
        gates += 1
    return gates


# --- cyclic Jacobi eigensolver --------------------------------------------

def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c, t


def jacobi_eigh_py(a, tol, max_sweeps):
    """Diagonalize symmetric ``a`` in place by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, vt, sweeps, off)`` where the rows of ``vt`` are the
    eigenvectors and ``off`` is the final off-diagonal Frobenius norm.
    """
    n = a.shape[0]
    vt = np.eye(n)
    scale = max(np.abs(a).max(), 1e-300)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale or sweep == max_sweeps:
            return np.diag(a).copy(), vt, sweep, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                c, s, t = _rotation(app, aqq, apq)
                rp = a[p].copy()
                rq = a[q].copy()
                a[p] = c * rp - s * rq
                a[q] = s * rp + c * rq
                a[:, p] = a[p]
                a[:, q] = a[q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = vt[p].copy()
                vt[p] = c * vp - s * vt[q]
                vt[q] = s * vp + c * vt[q]
    return np.diag(a).copy(), vt, max_sweeps, off


BACKEND = "numpy"
givens_rows = givens_rows_py
xx_layer = xx_layer_py
jacobi_eigh = jacobi_eigh_py

if USE_NUMBA:
    from numba import njit

    @njit(cache=True, nogil=True)
    def givens_rows_nb(w, first, c, s):
        d, cols = w.shape
        touched = 0
        a = first
        while a + 1 < d:
            b = a + 1
            for j in range(cols):
                x = w[a, j]
                y = w[b, j]
                w[a, j] = c * x - s * y
                w[b, j] = s * x + c * y
            touched += 2
            a += 2
        return touched

    @njit(cache=True, nogil=True)
    def xx_layer_nb(psi, n, start, c, s):
        dim = psi.shape[0]
        ms = -1j * s
        gates = 0
        for q in range(start, n - 1, 2):
            hi = 1 << (n - 1 - q)
            mask = hi | (hi >> 1)
            for idx in range(dim):
                if idx & hi:
                    continue
                jdx = idx ^ mask
                x = psi[idx]
                y = psi[jdx]
                psi[idx] = c * x + ms * y
                psi[jdx] = c * y + ms * x
            gates += 1
        return gates

    @njit(cache=True, nogil=True)
    def jacobi_eigh_nb(a, tol, max_sweeps):
        n = a.shape[0]
        vt = np.eye(n)
        scale = max(np.abs(a).max(), 1e-300)
        off = 0.0
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += a[i, j] * a[i, j]
            off = np.sqrt(off)
            if off <= tol * scale or sweep == max_sweeps:
                return np.diag(a).copy(), vt, sweep, off
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if abs(apq) <= 1e-300:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if abs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    app = a[p, p]
                    aqq = a[q, q]
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = c * x - s * y
                        a[q, k] = s * x + c * y
                    for k in range(n):
                        a[k, p] = a[p, k]
                        a[k, q] = a[q, k]
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        x = vt[p, k]
                        y = vt[q, k]
                        vt[p, k] = c * x - s * y
                        vt[q, k] = s * x + c * y
        return np.diag(a).copy(), vt, max_sweeps, off

    BACKEND = "numba"
    givens_rows = givens_rows_nb
    xx_layer = xx_layer_nb
    jacobi_eigh = jacobi_eigh_nb
