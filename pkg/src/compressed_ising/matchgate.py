"""Jordan-Wigner operators and the classical simulation of matchgate circuits.

A nearest-neighbour matchgate ``U`` on qubits ``(k, k+1)`` acts on the
Majorana operators ``c_1 .. c_2n`` by a rotation,
``U^dag c_j U = sum_l R_jl c_l`` with ``R`` in SO(2n).  For a computational
basis input the single-qubit output is then a single entry of ``R S R^T``.

Indices follow the physics convention (1-based) at the API surface: qubit
``k`` and operator ``c_j`` start at 1.  Arrays are indexed from 0 internally.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import (
    IY,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    LinalgError,
    is_unitary,
    kron,
    max_abs,
)

MAX_DENSE_QUBITS = 12
MATCHGATE_TOL = 1e-10


class NotAMatchgateError(ValueError):
    def __init__(self, residual):
        super().__init__(f"gate is not a matchgate: expansion residual {residual:.3e}")
        self.residual = residual


def basis_index(bits):
    """1-based index of the computational basis ket ``|k_1 ... k_m>``.

    ``k = sum_l 2^(m-l) k_l + 1``; the first bit is the most significant.
    """
    k = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        k = 2 * k + int(b)
    return k + 1


def basis_bits(k, m):
    """Inverse of :func:`basis_index`."""
    if not 1 <= k <= 2 ** m:
        raise ValueError(f"index {k} out of range for {m} qubits")
    k -= 1
    return tuple((k >> (m - 1 - i)) & 1 for i in range(m))


def jordan_wigner(j, n):
    """Dense ``2^n x 2^n`` matrix of the Majorana operator ``c_j`` (1-based ``j``)."""
    if not 1 <= n <= MAX_DENSE_QUBITS:
        raise ValueError(f"dense Jordan-Wigner operators need 1 <= n <= {MAX_DENSE_QUBITS}")
    if not 1 <= j <= 2 * n:
        raise ValueError(f"operator index {j} out of range 1..{2 * n}")
    k = (j + 1) // 2
    local = PAULI_X if j % 2 else PAULI_Y
    return kron([PAULI_Z] * (k - 1) + [local] + [PAULI_I] * (n - k))


@dataclass(frozen=True, eq=False)
class MatchGate:
    """Two-qubit gate ``A (+) B`` on qubits ``(k, k+1)``.

    ``A`` acts on span{|00>, |11>} and ``B`` on span{|01>, |10>}.
    """

    a: np.ndarray
    b: np.ndarray
    k: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.shape != (2, 2) or b.shape != (2, 2):
            raise ValueError("matchgate blocks must be 2x2")
        if not (is_unitary(a, 1e-12) and is_unitary(b, 1e-12)):
            raise ValueError("matchgate blocks must be unitary")
        if abs(np.linalg.det(a) - np.linalg.det(b)) > 1e-12:
            raise ValueError("matchgate blocks must have equal determinants")
        if self.k < 1:
            raise ValueError("matchgate position is 1-based")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def unitary(self):
        """The 4x4 two-qubit unitary in the basis |00>, |01>, |10>, |11>."""
        return _assemble(self.a, self.b)

    @classmethod
    def from_unitary(cls, u, k):
        u = np.asarray(u, dtype=complex)
        if u.shape != (4, 4):
            raise ValueError("expected a 4x4 unitary")
        even, odd = [0, 3], [1, 2]
        leak = max(max_abs(u[np.ix_(even, odd)]), max_abs(u[np.ix_(odd, even)]))
        if leak > 1e-12:
            raise ValueError("unitary does not preserve parity")
        return cls(u[np.ix_(even, even)], u[np.ix_(odd, odd)], k)

    @classmethod
    def xx(cls, theta, k):
        """``exp(-i theta X_k X_{k+1})``."""
        c, s = np.cos(theta), np.sin(theta)
        blk = np.array([[c, -1j * s], [-1j * s, c]])
        return cls(blk, blk.copy(), k)

    @classmethod
    def z(cls, theta, k, which=0):
        """``exp(-i theta Z)`` on qubit ``k`` (``which=0``) or ``k+1`` (``which=1``)."""
        p, q = np.exp(-1j * theta), np.exp(1j * theta)
        if which == 0:
            return cls(np.diag([p, q]), np.diag([p, q]), k)
        return cls(np.diag([p, q]), np.diag([q, p]), k)

    @classmethod
    def random(cls, rng, k):
        a = _haar_u2(rng)
        b = _haar_u2(rng)
        phase = np.sqrt(np.linalg.det(a) / np.linalg.det(b))
        return cls(a, b * phase, k)


def _assemble(a, b):
    u = np.zeros((4, 4), dtype=complex)
    u[np.ix_([0, 3], [0, 3])] = a
    u[np.ix_([1, 2], [1, 2])] = b
    return u


def _haar_u2(rng):
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


_C2 = None


def _two_qubit_majoranas():
    global _C2
    if _C2 is None:
        _C2 = [jordan_wigner(j, 2) for j in range(1, 5)]
    return _C2


def rotation_block(u, tol=MATCHGATE_TOL):
    """4x4 rotation of a two-qubit unitary, by expanding ``u^dag c_j u`` in the c-basis.

    Raises :class:`NotAMatchgateError` if the expansion leaves a residual above ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    cs = _two_qubit_majoranas()
    block = np.empty((4, 4))
    residual = 0.0
    for j, cj in enumerate(cs):
        heis = u.conj().T @ cj @ u
        coeffs = np.array([np.trace(cl @ heis) / 4 for cl in cs])
        residual = max(residual, max_abs(coeffs.imag))
        block[j] = coeffs.real
        residual = max(residual, max_abs(heis - sum(r * cl for r, cl in zip(block[j], cs))))
    if residual > tol:
        raise NotAMatchgateError(residual)
    return block


def embed_block(block, k, n):
    """Place a 4x4 block at rows/columns ``2k-1 .. 2k+2`` of the 2n identity."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"gate position {k} invalid for a chain of {n} qubits")
    r = np.eye(2 * n)
    lo = 2 * (k - 1)
    r[lo:lo + 4, lo:lo + 4] = block
    return r


def matchgate_rotation(gate, n):
    """SO(2n) rotation of a single matchgate on an ``n``-qubit chain."""
    return embed_block(rotation_block(gate.unitary()), gate.k, n)


def circuit_rotation(gates, n):
    """``R_N ... R_1`` for the circuit ``U = U_N ... U_1`` (gates in time order)."""
    r = np.eye(2 * n)
    for gate in gates:
        if not 1 <= gate.k <= n - 1:
            raise ValueError(f"gate position {gate.k} invalid for a chain of {n} qubits")
        lo = 2 * (gate.k - 1)
        r[lo:lo + 4] = rotation_block(gate.unitary()) @ r[lo:lo + 4]
    return r


def correlation_matrix(bits):
    """``S_jl = <x| -i c_j c_l |x>`` for a computational basis state ``x``."""
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("input must be a bit string")
    n = len(bits)
    s = np.zeros((2 * n, 2 * n))
    for k, b in enumerate(bits):
        s[2 * k:2 * k + 2, 2 * k:2 * k + 2] = -IY if b else IY
    return s


def simulate_mgc(circuit, x, k):
    """Expectation ``<Z_k>`` after running ``circuit`` on ``|x>``.

    Uses ``<Z_k> = (R S R^T)_{2k-1, 2k}`` which follows from
    ``Z_k = -i c_{2k-1} c_{2k}``.
    """
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError(f"output qubit {k} out of range 1..{n}")
    r = circuit_rotation(circuit, n)
    s = correlation_matrix(x)
    return float(r[2 * k - 2] @ s @ r[2 * k - 1])


def antisym_trace_average(a, tol=1e-10):
    """``sum_k A_{2k-1, 2k}`` for a real antisymmetric ``A``, via a trace.

    With ``iY = [[0, 1], [-1, 0]]`` the identity reads
    ``sum_k A_{2k-1,2k} = -tr(A (1 (x) iY)) / 2``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise LinalgError("expected an even-dimensional square matrix")
    if max_abs(a + a.T) > tol:
        raise LinalgError("matrix is not antisymmetric")
    s = np.kron(np.eye(a.shape[0] // 2), IY)
    return -0.5 * float(np.sum(a * s.T))
