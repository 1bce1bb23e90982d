#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernels, plus an end-to-end n=256 sweep per backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Compilation is excluded: every numba kernel runs once before timing.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from compressed_ising import _kernels

SWEEP = (
    "import time;"
    "from compressed_ising.compressed import compressed_evolution_mhat;"
    "from compressed_ising.schedule import IsingSpec, TrotterSchedule, j_grid;"
    "from compressed_ising import _kernels;"
    "s = TrotterSchedule.from_params(T=100.0, L=2000);"
    "compressed_evolution_mhat(IsingSpec(4), s, j_grid());"
    "t = time.perf_counter();"
    "compressed_evolution_mhat(IsingSpec(256), s, j_grid());"
    "print(_kernels.BACKEND, time.perf_counter() - t)"
)


def cases(rng):
    w = rng.normal(size=(256, 256)) + 1j * rng.normal(size=(256, 256))
    psi = rng.normal(size=2 ** 12) + 1j * rng.normal(size=2 ** 12)
    a = rng.normal(size=(64, 64))
    a = a + a.T
    c, s = np.cos(0.1), np.sin(0.1)
    return {
        "givens_rows d=256": lambda k: k(w, 1, c, s),
        "xx_layer n=12": lambda k: k(psi, 12, 0, c, s),
        "jacobi_eigh d=64": lambda k: k(a.copy(), 1e-15, 60),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not hasattr(_kernels, "givens_rows_nb"):
        sys.exit("numba is not importable; nothing to compare")
    kernels = {
        "givens_rows d=256": (_kernels.givens_rows_py, _kernels.givens_rows_nb),
        "xx_layer n=12": (_kernels.xx_layer_py, _kernels.xx_layer_nb),
        "jacobi_eigh d=64": (_kernels.jacobi_eigh_py, _kernels.jacobi_eigh_nb),
    }
    print(f"{'kernel':<20} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for name, call in cases(np.random.default_rng(0)).items():
        py, nb = kernels[name]
        call(nb)
        t_py = min(timeit.repeat(lambda: call(py), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: call(nb), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20} {t_py:12.3f} {t_nb:12.3f} {t_py / t_nb:8.1f}")

    print("\nend-to-end n=256, T=100, L=2000, 41 checkpoints:")
    for flag in ("1", "0"):
        env = dict(os.environ, COMPRESSED_ISING_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"  {backend:<6} {float(seconds):.2f} s")


if __name__ == "__main__":
    main()
