"""``compressed-ising`` command line: ``sweep``, ``noise`` and ``verify``.

Options may also come from a flat ``key=value`` file passed with
``--config``; command-line flags win over the file.
"""
import argparse
import csv
import io
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._config import worker_count
from .compressed import NoiseSpec, compressed_evolution_m, compressed_evolution_mhat
from .curves import COMPRESSED_M, COMPRESSED_MHAT, EXACT, MODES, STATEVECTOR
from .exact import BRANCHES, CONNECTED, exact_curve
from .schedule import DEFAULT_J_MAX, DEFAULT_POINTS, IsingSpec, TrotterSchedule, j_grid
from .statevector import MAX_QUBITS, trotter_curve
from .verify import run_verify

log = logging.getLogger("compressed_ising")

SWEEP_COLUMNS = ("mode", "n", "J_max", "T", "L", "dt", "seed", "noise_x", "J", "M")
NOISE_COLUMNS = ("row", "n", "J_max", "T", "L", "dt", "noise_x", "seed", "J", "M", "abs_dM")


class ConfigError(ValueError):
    pass


def fmt(value):
    """Shortest round-trip text for a CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_list(raw, cast):
    if isinstance(raw, (list, tuple)):
        return tuple(cast(v) for v in raw)
    return tuple(cast(v) for v in str(raw).split(",") if v.strip())


@dataclass(frozen=True)
class RunConfig:
    mode: str = COMPRESSED_MHAT
    n: tuple = (8,)
    j_max: float = DEFAULT_J_MAX
    T: float = None
    L: int = None
    dt: float = None
    points: int = DEFAULT_POINTS
    j_values: tuple = None
    x: tuple = (0.0,)
    seed: int = 0
    seeds: int = 20
    branch: str = CONNECTED
    ref: str = None
    out: str = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.ref is not None and self.ref not in MODES:
            raise ConfigError(f"reference mode must be one of {MODES}, got {self.ref!r}")
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be one of {BRANCHES}")
        for n in self.n:
            try:
                IsingSpec(n, self.j_max)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        for mode in (self.mode, self.ref):
            if mode == STATEVECTOR and max(self.n) > MAX_QUBITS:
                raise ConfigError(f"statevector mode is capped at n <= {MAX_QUBITS}")
        if any(x < 0 for x in self.x):
            raise ConfigError("noise amplitudes must be non-negative")
        if any(x > 0 for x in self.x) and self.mode != COMPRESSED_MHAT:
            raise ConfigError("noise injection is only defined for mode compressed-mhat")
        if self.points < 2:
            raise ConfigError("need at least two J points")
        if self.seeds < 1:
            raise ConfigError("need at least one seed")
        if self.needs_schedule:
            self.schedule()

    @property
    def needs_schedule(self):
        return self.mode != EXACT or self.ref not in (None, EXACT)

    def schedule(self):
        try:
            return TrotterSchedule.from_params(T=self.T, L=self.L, dt=self.dt, j_max=self.j_max)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def grid(self):
        if self.j_values is not None:
            grid = np.asarray(self.j_values, dtype=float)
            if np.any(np.diff(grid) < 0) or grid.min() < 0 or grid.max() > self.j_max:
                raise ConfigError("explicit J values must be ascending within [0, J_max]")
            return grid
        return j_grid(self.j_max, self.points)

    def echo(self):
        keys = ("mode", "n", "j_max", "T", "L", "dt", "points", "j_values", "x", "seed",
                "seeds", "branch", "ref")
        resolved = {}
        if self.needs_schedule:
            s = self.schedule()
            resolved = {"T": s.T, "L": s.L, "dt": s.dt}
        out = []
        for key in keys:
            value = resolved.get(key, getattr(self, key))
            if isinstance(value, tuple):
                value = ",".join(fmt(v) for v in value)
            out.append(f"{key}={fmt(value)}")
        return out

    @classmethod
    def from_mapping(cls, mapping):
        kwargs = {}
        casts = {
            "mode": str, "jmax": float, "j_max": float, "T": float, "L": int, "dt": float,
            "points": int, "seed": int, "seeds": int, "branch": str, "ref": str, "out": str,
        }
        for key, raw in mapping.items():
            if raw is None:
                continue
            try:
                if key == "n":
                    kwargs["n"] = _parse_list(raw, int)
                elif key == "x":
                    kwargs["x"] = _parse_list(raw, float)
                elif key in ("j", "j_values"):
                    kwargs["j_values"] = _parse_list(raw, float)
                elif key in casts:
                    name = "j_max" if key == "jmax" else key
                    kwargs[name] = casts[key](raw)
                else:
                    raise ConfigError(f"unknown configuration key {key!r}")
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        return cls(**kwargs)


def read_config_file(path):
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def compute_curve(mode, n, config, noise=None):
    grid = config.grid()
    if mode == EXACT:
        return exact_curve(n, grid, config.branch)
    spec = IsingSpec(n, config.j_max)
    schedule = config.schedule()
    if mode == COMPRESSED_MHAT:
        return compressed_evolution_mhat(spec, schedule, grid, noise=noise)
    if mode == COMPRESSED_M:
        return compressed_evolution_m(spec, schedule, grid)
    return trotter_curve(spec, schedule, grid)


def _map(fn, items):
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _schedule_cells(config, mode):
    if mode == EXACT:
        return None, None, None
    s = config.schedule()
    return s.T, s.L, s.dt


def write_csv_atomic(path, header_lines, columns, rows):
    """Write comment header, column header and rows; the file appears only when complete."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_sweep(config):
    """Compute one curve per chain length and write the CSV; returns a summary dict."""
    start = time.perf_counter()
    noise = None
    if config.mode == COMPRESSED_MHAT and config.x[0] > 0:
        noise = NoiseSpec(config.x[0], config.seed)
    curves = _map(lambda n: compute_curve(config.mode, n, config, noise), config.n)
    T, L, dt = _schedule_cells(config, config.mode)
    noise_x = noise.x if noise is not None else 0.0
    rows = []
    for n, curve in zip(config.n, curves):
        for J, M in zip(curve.J, curve.M):
            rows.append((config.mode, n, config.j_max, T, L, dt, config.seed, noise_x, J, M))
    write_csv_atomic(config.out, ["compressed-ising sweep"] + config.echo(), SWEEP_COLUMNS, rows)
    summary = {
        "max_abs_M": max(float(np.abs(c.M).max()) for c in curves),
        "seconds": time.perf_counter() - start,
        "rows": len(rows),
    }
    if config.ref is not None:
        refs = _map(lambda n: compute_curve(config.ref, n, config), config.n)
        summary["max_deviation"] = max(c.max_deviation(r) for c, r in zip(curves, refs))
        summary["seconds"] = time.perf_counter() - start
    return summary


def run_noise_study(config):
    """Noisy compressed sweeps for every (x, seed) plus per-J aggregates against x = 0."""
    if config.mode != COMPRESSED_MHAT:
        raise ConfigError("noise studies run on the compressed-mhat register")
    start = time.perf_counter()
    grid = config.grid()
    schedule = config.schedule()
    seeds = [config.seed + i for i in range(config.seeds)]
    rows = []
    per_x = {}
    for n in config.n:
        spec = IsingSpec(n, config.j_max)
        clean = compressed_evolution_mhat(spec, schedule, grid)
        for x in config.x:
            jobs = [NoiseSpec(x, s) for s in seeds]
            curves = _map(lambda nz: compressed_evolution_mhat(spec, schedule, grid, noise=nz), jobs)
            dev = np.array([np.abs(c.M - clean.M) for c in curves])
            for s, c, d in zip(seeds, curves, dev):
                for J, M, dm in zip(grid, c.M, d):
                    rows.append(("curve", n, config.j_max, schedule.T, schedule.L, schedule.dt,
                                 x, s, J, M, dm))
            mean_m = np.mean([c.M for c in curves], axis=0)
            for J, M, dm in zip(grid, mean_m, dev.mean(axis=0)):
                rows.append(("mean", n, config.j_max, schedule.T, schedule.L, schedule.dt,
                             x, None, J, M, dm))
            for J, dm in zip(grid, dev.max(axis=0)):
                rows.append(("max", n, config.j_max, schedule.T, schedule.L, schedule.dt,
                             x, None, J, None, dm))
            per_x[(n, x)] = float(dev.max(axis=1).mean())
    write_csv_atomic(config.out, ["compressed-ising noise"] + config.echo(), NOISE_COLUMNS, rows)
    return {"mean_max_deviation": per_x, "seconds": time.perf_counter() - start, "rows": len(rows)}


def _add_run_flags(p):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n", help="chain length(s), comma separated powers of two")
    p.add_argument("--jmax", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--points", type=int, help="uniform J points on [0, J_max]")
    p.add_argument("--j", help="explicit comma separated J checkpoints")
    p.add_argument("--x", help="noise amplitude(s), comma separated")
    p.add_argument("--seed", type=int)
    p.add_argument("--branch", choices=BRANCHES, help="eigenstate branch for exact mode")
    p.add_argument("--out", help="output CSV path ('-' for stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="compressed-ising", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="magnetization curve(s) for one mode")
    _add_run_flags(sweep)
    sweep.add_argument("--ref", choices=MODES, help="also compute this mode and report max deviation")

    noise = sub.add_parser("noise", help="noise study on the compressed register")
    _add_run_flags(noise)
    noise.add_argument("--seeds", type=int, help="number of seeds per noise amplitude")

    verify = sub.add_parser("verify", help="run the built-in identity and oracle checks")
    verify.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def config_from_args(args, defaults=None):
    values = dict(defaults or {})
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in ("mode", "n", "jmax", "T", "L", "dt", "points", "j", "x", "seed", "seeds",
                "branch", "ref", "out"):
        value = getattr(args, key, None)
        if value is not None:
            values.pop("j_max" if key == "jmax" else key, None)
            values[key] = value
    return RunConfig.from_mapping(values)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            report = run_verify(args.level)
            for line in report.lines():
                print(line)
            print(f"{'PASS' if report.passed else 'FAIL'} ({report.level}, {report.seconds:.1f}s)")
            return 0 if report.passed else 1
        defaults = {"x": "0.001,0.01"} if args.command == "noise" else None
        config = config_from_args(args, defaults)
        log.info("resolved configuration: %s", " ".join(config.echo()))
        if args.command == "sweep":
            summary = run_sweep(config)
            print(f"max|M|={summary['max_abs_M']:.6f} rows={summary['rows']} "
                  f"runtime={summary['seconds']:.2f}s", file=sys.stderr)
            if "max_deviation" in summary:
                print(f"max deviation vs {config.ref}: {summary['max_deviation']:.3e}", file=sys.stderr)
        else:
            summary = run_noise_study(config)
            for (n, x), value in sorted(summary["mean_max_deviation"].items()):
                print(f"n={n} x={x:g}: mean max|dM|={value:.3e}", file=sys.stderr)
            print(f"rows={summary['rows']} runtime={summary['seconds']:.2f}s", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
