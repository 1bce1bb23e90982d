"""Ising chain parameters, the linear coupling ramp and its Trotter step plan.

The chain Hamiltonian is ``H(J) = sum_i Z_i + J sum_i X_i X_{i+1}`` with open
boundaries.  The ramp is discretized into ``L`` steps of length ``dt``;
step ``l`` uses ``J(l) = J_max * l / L``.
"""
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_J_MAX = 2.0
DEFAULT_POINTS = 41

HALF_Z = "half_z"
FULL_Z = "full_z"
XX = "xx"


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class IsingSpec:
    n: int
    j_max: float = DEFAULT_J_MAX

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2 and _is_power_of_two(self.n)):
            raise ValueError(f"chain length must be a power of two >= 2, got {self.n!r}")
        if not self.j_max > 0:
            raise ValueError(f"J_max must be positive, got {self.j_max!r}")

    @property
    def m_hat(self):
        """Width of the smallest compressed register, log2(n)."""
        return int(self.n).bit_length() - 1

    @property
    def m(self):
        return self.m_hat + 1


@dataclass(frozen=True)
class TrotterSchedule:
    """Linear ramp over ``L`` steps of length ``dt``; ``T = L * dt``."""

    T: float
    L: int
    dt: float
    j_max: float = DEFAULT_J_MAX

    def __post_init__(self):
        if not (isinstance(self.L, (int, np.integer)) and self.L >= 1):
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        if not (self.dt > 0 and self.T > 0):
            raise ValueError("T and dt must be positive")
        if not math.isclose(self.T, self.L * self.dt, rel_tol=1e-9):
            raise ValueError(f"inconsistent schedule: T={self.T} but L*dt={self.L * self.dt}")
        if not self.j_max > 0:
            raise ValueError(f"J_max must be positive, got {self.j_max!r}")

    @classmethod
    def from_params(cls, T=None, L=None, dt=None, j_max=DEFAULT_J_MAX):
        """Build a schedule from exactly two of ``T``, ``L``, ``dt``."""
        given = sum(v is not None for v in (T, L, dt))
        if given != 2:
            raise ValueError("exactly two of T, L, dt must be given")
        if L is None:
            steps = T / dt
            L = int(round(steps))
            if L < 1 or not math.isclose(steps, L, rel_tol=1e-9):
                raise ValueError(f"T/dt = {steps} is not a positive integer step count")
        elif dt is None:
            dt = T / L
        else:
            T = L * dt
        return cls(T=float(T), L=int(L), dt=float(dt), j_max=float(j_max))


@dataclass(frozen=True)
class GateStep:
    tag: str
    angle: float
    l: int = 0


def coupling_at(schedule, l):
    if not 0 <= l <= schedule.L:
        raise ValueError(f"step {l} outside 0..{schedule.L}")
    return schedule.j_max * l / schedule.L


def steps_for(schedule, J):
    """Number of ramp steps needed to reach coupling ``J`` (rounded half-to-even)."""
    if J < 0 or J > schedule.j_max * (1 + 1e-12):
        raise ValueError(f"coupling {J} outside [0, {schedule.j_max}]")
    return min(int(round(J * schedule.L / schedule.j_max)), schedule.L)


def trotter_plan(schedule, J):
    """Gate steps, in application order, for the evolution up to coupling ``J``.

    This is ``sqrt(V0) prod_l (V_l V0) sqrt(V0)^dag`` with neighbouring
    Z-evolutions merged, i.e. ``[half_z, xx(1), full_z, xx(2), ..., xx(L(J)), half_z]``.
    """
    steps = steps_for(schedule, J)
    if steps == 0:
        return []
    dt = schedule.dt
    plan = [GateStep(HALF_Z, dt / 2)]
    for l in range(1, steps + 1):
        if l > 1:
            plan.append(GateStep(FULL_Z, dt))
        plan.append(GateStep(XX, coupling_at(schedule, l) * dt, l))
    plan.append(GateStep(HALF_Z, dt / 2))
    return plan


def j_grid(j_max=DEFAULT_J_MAX, points=DEFAULT_POINTS):
    if points < 2:
        raise ValueError("a J grid needs at least two points")
    return np.linspace(0.0, j_max, points)


def checkpoint_steps(schedule, checkpoints):
    """Validate ascending checkpoints and map each to its step count."""
    checkpoints = np.asarray(checkpoints, dtype=float)
    if checkpoints.ndim != 1:
        raise ValueError("checkpoints must be a 1-D sequence")
    if np.any(np.diff(checkpoints) < 0):
        raise ValueError("checkpoints must be sorted ascending")
    return [steps_for(schedule, J) for J in checkpoints]
