"""Compressed simulation of the adiabatic Ising ramp.

The n-qubit Trotter circuit is a matchgate circuit, so it is fully described
by a rotation on the 2n Majorana modes.  Those 2n indices are the basis of an
``m = log2(n) + 1`` qubit register and the per-step rotations ``R_0`` and
``R_l`` are cheap structured operators on it.  A further unitary change of
basis ``V`` block-diagonalizes both, which leaves an evolution ``W`` on
``m_hat = log2(n)`` qubits.

Register conventions (see docs/SIGN_CONVENTIONS.md):

* ``R_0 = 1 (x) exp(-2i dt Y)``: 2x2 blocks ``[[cos 2dt, -sin 2dt], [sin 2dt, cos 2dt]]``.
* ``R_l`` mixes the index pairs (2k, 2k+1), k = 1 .. d/2 - 1, by the angle
  ``x = 2 J(l) dt`` and fixes indices 1 and d.
* The magnetization is ``<Y_last>`` in the state ``1 (x) |y+><y+|`` (normalized)
  evolved by the accumulated product, ``|y+>`` the +1 eigenvector of Y.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .curves import COMPRESSED_M, COMPRESSED_MHAT, MagnetizationCurve
from .linalg import PAULI_X, PAULI_Y, LinalgError, is_unitary, kron, max_abs
from .matchgate import basis_index
from .schedule import checkpoint_steps, coupling_at

R0 = "R0"
RL = "Rl"
UD = "Ud"


class BasisChangeError(AssertionError):
    def __init__(self, identity, residual):
        super().__init__(f"identity {identity} failed: max residual {residual:.3e}")
        self.identity = identity
        self.residual = residual


@dataclass
class OpCounter:
    """Tally of structured applies, for cost assertions."""

    applies: int = 0
    row_updates: int = 0

    def record(self, rows):
        self.applies += 1
        self.row_updates += rows


@dataclass(frozen=True)
class StructuredRotation:
    """One of the per-step operators on a ``d = 2^m`` dimensional register."""

    kind: str
    d: int
    x: float

    def dense(self):
        d, x = self.d, self.x
        c, s = np.cos(x), np.sin(x)
        if self.kind == R0:
            return np.kron(np.eye(d // 2), np.array([[c, -s], [s, c]]))
        if self.kind == RL:
            r = c * np.eye(d)
            r[0, 0] = r[d - 1, d - 1] = 1.0
            for a in range(1, d - 2, 2):
                r[a + 1, a] += s
                r[a, a + 1] -= s
            return r
        if self.kind == UD:
            u = np.eye(d, dtype=complex)
            u[d - 1, d - 1] = np.exp(1j * x)
            return u
        raise LinalgError(f"unknown structured operator {self.kind!r}")

    def apply_left(self, w, transpose=False, counter=None):
        """In place ``w <- op @ w`` (or ``op.T @ w``); returns ``w``."""
        if w.shape[0] != self.d:
            raise LinalgError(f"operator of dimension {self.d} cannot act on {w.shape[0]} rows")
        c, s = np.cos(self.x), np.sin(self.x)
        if transpose:
            s = -s
        if self.kind == R0:
            rows = _kernels.givens_rows(w, 0, c, s)
        elif self.kind == RL:
            rows = _kernels.givens_rows(w, 1, c, s)
        elif self.kind == UD:
            w[self.d - 1] *= np.exp(1j * self.x)
            rows = 1
        else:
            raise LinalgError(f"unknown structured operator {self.kind!r}")
        if counter is not None:
            counter.record(rows)
        return w


def build_R0(m, dt):
    if m < 1:
        raise ValueError("register needs at least one qubit")
    return StructuredRotation(R0, 2 ** m, 2.0 * dt)


def build_Rl(m, x):
    if m < 1:
        raise ValueError("register needs at least one qubit")
    return StructuredRotation(RL, 2 ** m, float(x))


def build_Ud(m_hat, x):
    if m_hat < 1:
        raise ValueError("register needs at least one qubit")
    return StructuredRotation(UD, 2 ** m_hat, float(x))


def build_V(m):
    """Basis change that block-diagonalizes the m-qubit evolution.

    ``V = 2^-1/2 sum_k (alpha_k |k><k| + beta_k |d-k+1><k|)`` with
    ``alpha_k = (-1)^(k+1)``, ``beta_k = (-1)^k`` for ``k <= d/2`` and
    ``alpha_k = beta_k = -i`` above.
    """
    if m < 2:
        raise ValueError("V needs m >= 2")
    d = 2 ** m
    v = np.zeros((d, d), dtype=complex)
    for k in range(1, d + 1):
        if k <= d // 2:
            alpha, beta = (-1) ** (k + 1), (-1) ** k
        else:
            alpha = beta = -1j
        v[k - 1, k - 1] += alpha
        v[d - k, k - 1] += beta
    v /= np.sqrt(2)
    if not is_unitary(v, 1e-12):
        raise LinalgError("V failed the unitarity check")
    return v


def y_expectation(w):
    """``tr(W rho W^dag (1 (x) Y))`` for ``rho = 1 (x) |y+><y+|`` normalized to trace one.

    Only the columns ``|k>|y+>`` of ``W`` matter, so this is O(d^2).
    """
    d = w.shape[0]
    cols = (w[:, 0::2] + 1j * w[:, 1::2]) / np.sqrt(2)
    # <v|Y|v> on a pair (a, b) is 2 Im(conj(a) b)
    return float(2.0 * np.sum(np.imag(np.conj(cols[0::2]) * cols[1::2])) / (d // 2))


def input_state(d):
    """Normalized ``1 (x) |y+><y+|`` on a ``d``-dimensional register."""
    y_plus = np.array([1.0, 1.0j]) / np.sqrt(2)
    return np.kron(np.eye(d // 2), np.outer(y_plus, y_plus.conj())) / (d // 2)


def y_expectation_dense(w):
    """Literal trace form of :func:`y_expectation`, for cross-checks."""
    d = w.shape[0]
    y_last = np.kron(np.eye(d // 2), PAULI_Y)
    return float(np.real(np.trace(w @ input_state(d) @ w.conj().T @ y_last)))


@dataclass(frozen=True)
class NoiseSpec:
    """Collective ``exp(i a Z)`` on every register qubit after each step, ``a ~ U[0, x]``."""

    x: float = 0.0
    seed: int = 0
    enabled: bool = True

    def __post_init__(self):
        if not self.x >= 0:
            raise ValueError(f"noise amplitude must be non-negative, got {self.x!r}")

    @property
    def active(self):
        return self.enabled and self.x > 0


@dataclass
class CompressedState:
    """Running product for one incremental sweep.

    ``mode="m"`` accumulates ``prod_l R_l R_0`` on ``log2(n) + 1`` qubits;
    ``mode="mhat"`` accumulates ``prod_l U_d R_l^T R_0^T`` on ``log2(n)``
    qubits.  Later steps multiply on the left.
    """

    n: int
    schedule: object
    mode: str = "mhat"
    noise: NoiseSpec = None
    counter: OpCounter = None
    l: int = 0
    W: np.ndarray = None
    noise_angles: list = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in ("m", "mhat"):
            raise ValueError(f"unknown register mode {self.mode!r}")
        m_hat = int(self.n).bit_length() - 1
        self.width = m_hat + 1 if self.mode == "m" else m_hat
        self.d = 2 ** self.width
        dtype = float if self.mode == "m" else complex
        self.W = np.eye(self.d, dtype=dtype)
        self._r0 = build_R0(self.width, self.schedule.dt)
        if self.noise is not None and self.noise.active:
            if self.mode != "mhat":
                raise ValueError("noise injection is defined for the log2(n)-qubit register")
            self._rng = np.random.default_rng(self.noise.seed)
            ones = np.array([bin(k).count("1") for k in range(self.d)])
            self._z_weights = self.width - 2 * ones
        else:
            self._rng = None

    def advance(self):
        if self.l >= self.schedule.L:
            raise ValueError("schedule exhausted")
        self.l += 1
        x = 2.0 * coupling_at(self.schedule, self.l) * self.schedule.dt
        rl = build_Rl(self.width, x)
        if self.mode == "m":
            self._r0.apply_left(self.W, counter=self.counter)
            rl.apply_left(self.W, counter=self.counter)
            return
        self._r0.apply_left(self.W, transpose=True, counter=self.counter)
        # T_l = U_d R_l^T, counted as one structured apply
        rl.apply_left(self.W, transpose=True)
        self.W[self.d - 1] *= np.exp(1j * x)
        if self.counter is not None:
            # R_l^T touches rows 2..d-1, U_d touches row d
            self.counter.record(self.d - 1)
        if self._rng is not None:
            alpha = self._rng.uniform(0.0, self.noise.x)
            self.noise_angles.append(alpha)
            self.W *= np.exp(1j * alpha * self._z_weights)[:, None]

    def magnetization(self):
        return y_expectation(self.W)

    def unitarity_residual(self):
        if self.mode == "m":
            return max_abs(self.W @ self.W.T - np.eye(self.d))
        return max_abs(self.W.conj().T @ self.W - np.eye(self.d))


def _sweep(state, schedule, checkpoints):
    targets = checkpoint_steps(schedule, checkpoints)
    values = []
    for steps in targets:
        while state.l < steps:
            state.advance()
        values.append(state.magnetization())
    return np.array(values)


def _meta(spec, schedule, noise=None):
    meta = {"n": spec.n, "T": schedule.T, "L": schedule.L, "dt": schedule.dt,
            "J_max": schedule.j_max, "seed": 0, "noise_x": 0.0}
    if noise is not None:
        meta["seed"] = noise.seed
        meta["noise_x"] = noise.x if noise.enabled else 0.0
    return meta


def _check_spec(spec, schedule):
    if abs(spec.j_max - schedule.j_max) > 1e-12 * spec.j_max:
        raise ValueError("IsingSpec and TrotterSchedule disagree on J_max")


def compressed_evolution_m(spec, schedule, checkpoints, counter=None):
    """Magnetization curve from the ``log2(n) + 1`` qubit register, one incremental pass."""
    _check_spec(spec, schedule)
    state = CompressedState(spec.n, schedule, mode="m", counter=counter)
    m_values = _sweep(state, schedule, checkpoints)
    return MagnetizationCurve(checkpoints, m_values, COMPRESSED_M, _meta(spec, schedule))


def compressed_evolution_mhat(spec, schedule, checkpoints, noise=None, counter=None):
    """Magnetization curve from the ``log2(n)`` qubit register, optionally noisy."""
    _check_spec(spec, schedule)
    state = CompressedState(spec.n, schedule, mode="mhat", noise=noise, counter=counter)
    m_values = _sweep(state, schedule, checkpoints)
    return MagnetizationCurve(checkpoints, m_values, COMPRESSED_MHAT, _meta(spec, schedule, noise))


# --- basis-change identities ----------------------------------------------

@dataclass
class BasisChangeReport:
    m: int
    tol: float
    residuals: dict

    @property
    def passed(self):
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failures(self):
        return {k: r for k, r in self.residuals.items() if r > self.tol}

    def check(self):
        for identity, residual in self.residuals.items():
            if residual > self.tol:
                raise BasisChangeError(identity, residual)
        return self


def verify_basis_change(m, couplings, dt, tol=1e-10, v=None):
    """Check the block-diagonalization identities on an ``m``-qubit register.

    Residuals (entrywise max) are reported for:

    a. ``V`` unitary;
    b. ``V R_0 V^dag = |0><0| (x) R0^T + |1><1| (x) R0`` (R0 on ``m - 1`` qubits);
    c. ``V R_l V^dag = |0><0| (x) T_l + |1><1| (x) X T_l^* X``, ``T_l = U_d R_l^T``;
    d. ``V S V^dag = -Z_1 (x) S`` with ``S = 1 (x) iY``;
    e. the lower block of the accumulated product is ``X W_0^* X``, the
       off-diagonal blocks vanish, and ``W_0`` equals the directly built product;
    f. both registers give the same magnetization.
    """
    if not 2 <= m <= 7:
        raise ValueError("identity suite supports 2 <= m <= 7")
    d, dh = 2 ** m, 2 ** (m - 1)
    if v is None:
        v = build_V(m)
    vd = v.conj().T
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    x_all = kron([PAULI_X] * (m - 1)).real
    res = {}
    res["a"] = max_abs(vd @ v - np.eye(d))

    r0 = build_R0(m, dt).dense()
    r0h = build_R0(m - 1, dt).dense()
    res["b"] = max_abs(v @ r0 @ vd - (np.kron(p0, r0h.T) + np.kron(p1, r0h)))

    res["c"] = 0.0
    acc = np.eye(d)
    w_direct = np.eye(dh, dtype=complex)
    for J in couplings:
        x = 2.0 * J * dt
        rl = build_Rl(m, x).dense()
        t_l = build_Ud(m - 1, x).dense() @ build_Rl(m - 1, x).dense().T
        s_l = x_all @ t_l.conj() @ x_all
        res["c"] = max(res["c"], max_abs(v @ rl @ vd - (np.kron(p0, t_l) + np.kron(p1, s_l))))
        acc = rl @ r0 @ acc
        w_direct = t_l @ r0h.T @ w_direct

    s_m = np.kron(np.eye(d // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    s_h = np.kron(np.eye(dh // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    res["d"] = max_abs(v @ s_m @ vd + np.kron(np.diag([1.0, -1.0]), s_h))

    blocked = v @ acc @ vd
    w0, w1 = blocked[:dh, :dh], blocked[dh:, dh:]
    res["e"] = max(
        max_abs(w1 - x_all @ w0.conj() @ x_all),
        max_abs(blocked[:dh, dh:]),
        max_abs(blocked[dh:, :dh]),
        max_abs(w0 - w_direct),
    )
    res["f"] = abs(y_expectation(acc) - y_expectation(w_direct))
    return BasisChangeReport(m, tol, res)


def ud_index(m_hat):
    """0-based position of ``|1...1>``, the only basis state ``U_d`` rephases."""
    return basis_index([1] * m_hat) - 1
