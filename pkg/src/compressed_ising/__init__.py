"""Compressed log(n)-qubit simulation of the adiabatic transverse-field Ising chain."""
from ._kernels import BACKEND
from .compressed import (
    NoiseSpec,
    compressed_evolution_m,
    compressed_evolution_mhat,
    verify_basis_change,
)
from .curves import MagnetizationCurve
from .exact import exact_curve, magnetization_exact
from .schedule import IsingSpec, TrotterSchedule, j_grid
from .statevector import trotter_curve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "IsingSpec",
    "MagnetizationCurve",
    "NoiseSpec",
    "TrotterSchedule",
    "compressed_evolution_m",
    "compressed_evolution_mhat",
    "exact_curve",
    "j_grid",
    "magnetization_exact",
    "trotter_curve",
    "verify_basis_change",
]
