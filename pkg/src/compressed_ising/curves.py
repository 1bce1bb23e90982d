"""Magnetization-versus-coupling curves produced by every simulation mode."""
from dataclasses import dataclass, field

import numpy as np

EXACT = "exact"
COMPRESSED_M = "compressed-m"
COMPRESSED_MHAT = "compressed-mhat"
STATEVECTOR = "statevector"
MODES = (EXACT, COMPRESSED_M, COMPRESSED_MHAT, STATEVECTOR)


@dataclass
class MagnetizationCurve:
    J: np.ndarray
    M: np.ndarray
    provenance: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.J = np.asarray(self.J, dtype=float)
        self.M = np.asarray(self.M, dtype=float)
        if self.J.shape != self.M.shape or self.J.ndim != 1:
            raise ValueError("J and M must be 1-D arrays of equal length")
        if np.any(np.diff(self.J) < 0):
            raise ValueError("J values must be ascending")
        if self.provenance not in MODES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.M.size and np.abs(self.M).max() > 1 + 1e-6:
            raise ValueError("magnetization outside [-1, 1]")

    def max_deviation(self, other):
        if not np.array_equal(self.J, other.J):
            raise ValueError("curves are sampled on different J grids")
        return float(np.abs(self.M - other.M).max())
