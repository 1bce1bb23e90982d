"""Runtime switches: numerical tolerance, kernel backend, worker count."""
import os

DEFAULT_TOL = 1e-10

_tol = DEFAULT_TOL


def get_tol():
    return _tol


def set_tol(value):
    """Set the package-wide default absolute tolerance."""
    global _tol
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {value!r}")
    _tol = float(value)


def _numba_requested():
    flag = os.environ.get("COMPRESSED_ISING_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


def worker_count():
    """Worker fan-out cap; ``COMPRESSED_ISING_THREADS`` overrides the core count."""
    raw = os.environ.get("COMPRESSED_ISING_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"COMPRESSED_ISING_THREADS must be an integer, got {raw!r}")
        return max(1, value)
    return os.cpu_count() or 1


USE_NUMBA = _numba_requested()
if USE_NUMBA:
    try:
        import numba  # noqa: F401
    except ImportError:  # pragma: no cover
        USE_NUMBA = False
