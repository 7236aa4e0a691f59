"""Seeded sweep runner reproducing the standard robustness experiments as CSV tables.

Each experiment maps a grid of noise/time parameters to average gate
fidelities (or solid-angle statistics) and writes one diff-able CSV with
a ``#``-prefixed metadata preamble.  Runs are bit-reproducible: every
grid point derives its randomness from (seed, point_index << 32), so the
data rows are identical for any worker count.

Experiments
-----------
fid_vs_time        fidelity vs operational time, noiseless + monochromatic probes
mono_surface       fidelity at the first optimal time vs probe frequency and amplitude
sphere_surface     fidelity at the k-th optimal time vs angular-step noise amplitude and rate
cartesian_sweep    fidelity vs noise switching rate for the first four optimal times,
                   keyed both by rate and by fluctuation count
solid_angle_vs_n   solid-angle spread of noisy loops vs fluctuation count
"""

from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .fidelity import average_gate_fidelity, estimate_channel
from .geometry import solid_angle_fluctuations
from .model import holonomy_target
from .noise import CartesianRandom, Monochromatic, NoiseModel, SphereAngular, variant_name
from .path import PathSpec, optimal_time
from .propagator import EvolutionConfig

EXPERIMENT_IDS = (
    "fid_vs_time",
    "mono_surface",
    "sphere_surface",
    "cartesian_vs_freq",
    "cartesian_vs_count",
    "solid_angle_vs_N",
)


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, value, or grid)."""


@dataclass(frozen=True)
class SweepConfig:
    """Resolved settings for one experiment run.

    Grid fields left as None fall back to the experiment's desk-scale
    defaults (or the denser ``fine`` presets).
    """

    experiment: str = ""
    seed: int = 12345
    n_realizations: int = 50
    workers: int = 1
    fine: bool = False
    phi_max: float = math.pi / 2
    out: Optional[str] = None
    k: int = 1
    k_list: tuple[int, ...] = (1, 2, 3, 4)
    amplitude: float = 0.1  # monochromatic probe strength
    epsilon: float = 0.1  # cartesian noise strength
    eta_list: tuple[float, ...] = (0.1, 0.2, 0.3)
    time_grid: Optional[tuple[float, ...]] = None
    eta_grid: Optional[tuple[float, ...]] = None
    amplitude_grid: Optional[tuple[float, ...]] = None
    gamma_s_grid: Optional[tuple[float, ...]] = None
    rate_grid: Optional[tuple[float, ...]] = None
    n_grid: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.n_realizations < 1:
            raise ConfigError(f"realizations must be >= 1, got {self.n_realizations}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 0 < self.phi_max <= math.pi:
            raise ConfigError(f"phi_max must lie in (0, pi], got {self.phi_max}")
        for grid_name in ("time_grid", "eta_grid", "amplitude_grid", "gamma_s_grid",
                          "rate_grid", "n_grid"):
            _check_grid(getattr(self, grid_name), grid_name)


def _check_grid(grid, name: str) -> None:
    if grid is None:
        return
    if len(grid) == 0:
        raise ConfigError(f"{name} must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"{name} must be strictly increasing")


@dataclass
class SweepTable:
    """One CSV-bound result table with its metadata preamble."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict


# ---------------------------------------------------------------------------
# fidelity point tasks (top-level and picklable for the worker pool)


@dataclass(frozen=True)
class _FidelityTask:
    spec: PathSpec
    model: Optional[NoiseModel]
    tau: float
    n_realizations: int
    seed: int
    stream_offset: int


def _zero_amplitude(model: NoiseModel) -> bool:
    for attr in ("amplitude", "gamma", "epsilon"):
        if hasattr(model, attr):
            return getattr(model, attr) == 0.0
    return False


def _run_fidelity_task(task: _FidelityTask) -> tuple[float, float, int, int, float]:
    """Returns (fidelity, std_error, n_realizations_used, n_steps, wall_time)."""
    t0 = time.perf_counter()
    model = task.model
    if model is not None and _zero_amplitude(model):
        model = None  # noiseless evolution is deterministic; skip redundant realizations
    cfg = EvolutionConfig(tau=task.tau)
    ch = estimate_channel(
        task.spec,
        model,
        task.tau,
        cfg,
        n_realizations=task.n_realizations,
        seed=task.seed,
        stream_offset=task.stream_offset,
    )
    res = average_gate_fidelity(ch, holonomy_target(task.spec.phi_max))
    return res.f, res.std_error, res.n_realizations, cfg.lattice_size(), time.perf_counter() - t0


def _map_tasks(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in tasks]
    out = [None] * len(tasks)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for i, result in zip(range(len(tasks)), pool.map(fn, tasks)):
            out[i] = result
    return out


def _fidelity_rows(
    cfg: SweepConfig,
    points: list[tuple],
    models: list[Optional[NoiseModel]],
    taus: list[float],
) -> list[tuple]:
    """Run one fidelity estimate per grid point; rows = point + result fields."""
    spec = PathSpec(phi_max=cfg.phi_max)
    tasks = [
        _FidelityTask(
            spec=spec,
            model=models[i],
            tau=taus[i],
            n_realizations=cfg.n_realizations,
            seed=cfg.seed,
            stream_offset=i << 32,
        )
        for i in range(len(points))
    ]
    results = _map_tasks(_run_fidelity_task, tasks, cfg.workers)
    return [
        points[i] + (f, se, n_used, n_steps, cfg.seed, round(wall, 6))
        for i, (f, se, n_used, n_steps, wall) in enumerate(results)
    ]


_RESULT_COLUMNS = ("fidelity", "std_error", "n_realizations", "n_steps", "seed", "wall_time_s")


# ---------------------------------------------------------------------------
# experiments


def _default(grid, coarse, fine_grid, fine: bool):
    if grid is not None:
        return tuple(grid)
    return tuple(fine_grid if fine else coarse)


def run_fid_vs_time(cfg: SweepConfig) -> SweepTable:
    """Fidelity vs operational time: noiseless plus monochromatic probes."""
    coarse = np.arange(5.0, 40.01, 1.0)
    fine_grid = np.arange(5.0, 40.01, 0.25)
    base = _default(cfg.time_grid, coarse, fine_grid, cfg.fine)
    times = sorted(set(base) | {optimal_time(1), optimal_time(2)})
    if times[0] > 5.0 or times[-1] < 40.0:
        raise ConfigError("time grid must cover [5, 40]")
    curves: list[tuple[float, float]] = [(0.0, 0.0)]  # (eta, amplitude)
    curves += [(eta, cfg.amplitude) for eta in cfg.eta_list]
    points, models, taus = [], [], []
    for eta, amp in curves:
        for t in times:
            points.append((t, eta, amp))
            models.append(Monochromatic(eta=eta, amplitude=amp))
            taus.append(t)
    rows = _fidelity_rows(cfg, points, models, taus)
    meta = _meta(cfg, "fid_vs_time", grids={"time": times, "eta_list": [c[0] for c in curves[1:]]},
                 amplitude=cfg.amplitude)
    return SweepTable("fid_vs_time", ("omega_tau", "eta", "amplitude") + _RESULT_COLUMNS, rows, meta)


def run_mono_surface(cfg: SweepConfig) -> SweepTable:
    """Fidelity at the first optimal time vs probe frequency and amplitude."""
    etas = _default(cfg.eta_grid, np.round(np.arange(0.05, 1.0001, 0.05), 10),
                    np.round(np.arange(0.025, 1.0001, 0.025), 10), cfg.fine)
    amps = _default(cfg.amplitude_grid, (0.0, 0.05, 0.1, 0.2, 0.3, 0.4),
                    np.round(np.arange(0.0, 0.4001, 0.025), 10), cfg.fine)
    if etas[0] <= 0 or etas[-1] > 1.0:
        raise ConfigError("eta grid must lie in (0, 1]")
    if amps[0] < 0 or amps[-1] > 0.4:
        raise ConfigError("amplitude grid must lie in [0, 0.4]")
    tau = optimal_time(1)
    points, models, taus = [], [], []
    for eta in etas:
        for amp in amps:
            points.append((eta, amp))
            models.append(Monochromatic(eta=eta, amplitude=amp))
            taus.append(tau)
    rows = _fidelity_rows(cfg, points, models, taus)
    meta = _meta(cfg, "mono_surface", grids={"eta": etas, "amplitude": amps}, tau=tau)
    return SweepTable("mono_surface", ("eta", "amplitude") + _RESULT_COLUMNS, rows, meta)


def run_sphere_surface(cfg: SweepConfig, k: Optional[int] = None) -> SweepTable:
    """Fidelity at the k-th optimal time vs sphere-noise amplitude and switching rate."""
    k = cfg.k if k is None else k
    gammas = _default(cfg.gamma_s_grid, np.round(np.arange(0.0, 1.0001, 0.1), 10),
                      np.round(np.arange(0.0, 1.0001, 0.05), 10), cfg.fine)
    rates = _default(cfg.rate_grid, (0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0),
                     (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 1.0,
                      1.25, 1.5, 2.0, 3.0, 4.0, 5.0), cfg.fine)
    if gammas[0] < 0 or gammas[-1] > 1.0:
        raise ConfigError("gamma_s grid must lie in [0, 1]")
    if rates[0] < 0.05 - 1e-12 or rates[-1] > 5.0 + 1e-12:
        raise ConfigError("rate grid must lie in [0.05, 5]")
    tau = optimal_time(k)
    gamma_max = cfg.phi_max  # re-scaling anchor: the largest constant-angle value on the loop
    points, models, taus = [], [], []
    for gs in gammas:
        for rate in rates:
            points.append((gs, rate))
            models.append(SphereAngular(gamma=gs * gamma_max, tau_step=1.0 / rate))
            taus.append(tau)
    rows = _fidelity_rows(cfg, points, models, taus)
    meta = _meta(cfg, "sphere_surface", grids={"gamma_s": gammas, "rate": rates}, tau=tau, k=k)
    return SweepTable(f"sphere_surface_k{k}", ("gamma_s", "rate") + _RESULT_COLUMNS, rows, meta)


def run_cartesian_sweeps(cfg: SweepConfig) -> tuple[SweepTable, SweepTable]:
    """Fidelity vs switching rate for each optimal time; re-keyed by fluctuation count.

    Returns two tables over the same data: (k, rate, ...) and
    (k, n_fluctuations, ...) with n = omega_tau * rate.
    """
    rates = _default(cfg.rate_grid,
                     (0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0),
                     (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6,
                      0.7, 0.8, 0.9, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 5.0), cfg.fine)
    if rates[0] < 0.05 - 1e-12 or rates[-1] > 5.0 + 1e-12:
        raise ConfigError("rate grid must lie in [0.05, 5]")
    if not set(cfg.k_list) <= {1, 2, 3, 4}:
        raise ConfigError(f"k_list must be a subset of {{1,2,3,4}}, got {cfg.k_list}")
    points, models, taus = [], [], []
    for k in cfg.k_list:
        tau = optimal_time(k)
        for rate in rates:
            points.append((k, rate))
            models.append(CartesianRandom(epsilon=cfg.epsilon, tau_step=1.0 / rate))
            taus.append(tau)
    rows = _fidelity_rows(cfg, points, models, taus)
    meta = _meta(cfg, "cartesian_vs_freq", grids={"rate": rates}, epsilon=cfg.epsilon,
                 k_list=",".join(str(k) for k in cfg.k_list))
    by_rate = SweepTable("cartesian_vs_freq", ("k", "rate") + _RESULT_COLUMNS, rows, meta)
    count_rows = [
        (row[0], optimal_time(row[0]) * row[1]) + row[2:] for row in rows
    ]
    count_meta = dict(meta)
    count_meta["experiment"] = "cartesian_vs_count"
    by_count = SweepTable(
        "cartesian_vs_count", ("k", "n_fluctuations") + _RESULT_COLUMNS, count_rows, count_meta
    )
    return by_rate, by_count


def run_solid_angle(cfg: SweepConfig) -> SweepTable:
    """Solid-angle spread of noisy loops vs fluctuation count."""
    n_grid = _default(cfg.n_grid, (2, 3, 5, 8, 12, 16, 20, 30, 50, 75, 100, 150),
                      (2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 30, 40, 50, 60, 75,
                       100, 125, 150, 200), cfg.fine)
    n_grid = tuple(int(n) for n in n_grid)
    if n_grid[-1] < 100:
        raise ConfigError("fluctuation-count grid must reach at least 100")
    tau = optimal_time(1)
    t0 = time.perf_counter()
    model = CartesianRandom(epsilon=cfg.epsilon, tau_step=1.0)  # tau_step replaced per N
    stats = solid_angle_fluctuations(
        PathSpec(phi_max=cfg.phi_max), model, tau, n_grid, cfg.n_realizations, cfg.seed
    )
    wall = round((time.perf_counter() - t0) / max(1, len(stats)), 6)
    rows = [
        (
            st.n_fluctuations,
            st.mean_square_deviation,
            st.mean_square_about_mean,
            st.mean_omega,
            st.n_realizations,
            cfg.seed,
            wall,
        )
        for st in stats
    ]
    meta = _meta(cfg, "solid_angle_vs_N", grids={"n": list(n_grid)}, epsilon=cfg.epsilon, tau=tau)
    columns = (
        "n_fluctuations",
        "mean_square_deviation",
        "mean_square_about_mean",
        "mean_omega",
        "n_realizations",
        "seed",
        "wall_time_s",
    )
    return SweepTable("solid_angle_vs_N", columns, rows, meta)


# ---------------------------------------------------------------------------
# CSV output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _meta(cfg: SweepConfig, experiment: str, grids: Optional[dict] = None, **extra) -> dict:
    meta = {
        "tool": f"tripodsim {__version__}",
        "experiment": experiment,
        "seed": cfg.seed,
        "n_realizations": cfg.n_realizations,
        "phi_max": cfg.phi_max,
        "fine": cfg.fine,
    }
    for key, value in extra.items():
        meta[key] = value
    for name, grid in (grids or {}).items():
        meta[f"grid.{name}"] = ",".join(_fmt(v) for v in grid)
    digest_src = "\n".join(f"{k} = {_fmt(v)}" for k, v in sorted(meta.items()))
    meta["config_sha256"] = hashlib.sha256(digest_src.encode()).hexdigest()
    return meta


def write_table(table: SweepTable, path) -> Path:
    """Write one experiment table as CSV with a '#'-prefixed metadata preamble."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {key} = {_fmt(value)}" for key, value in table.meta.items()]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def data_lines(path) -> list[str]:
    """The reproducible content of a CSV: all lines minus the wall-time column.

    Used by the determinism checks: the metadata preamble and every value
    except wall_time_s must be byte-identical across re-runs with the
    same config and seed, for any worker count.
    """
    out = []
    drop: Optional[int] = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            out.append(line)
            continue
        cells = line.split(",")
        if drop is None:  # first non-comment line is the header
            drop = cells.index("wall_time_s") if "wall_time_s" in cells else -1
        if drop >= 0:
            cells = cells[:drop] + cells[drop + 1 :]
        out.append(",".join(cells))
    return out
