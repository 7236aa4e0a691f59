"""Solid angles of control loops and their fluctuation statistics.

The signed solid angle of a discretized loop is the area of the
spherical polygon through the normalized points, accumulated as the sum
of signed excesses of the triangles anchored at the north pole:

    excess(O, A, B) = 2 atan2(O . (A x B), 1 + O.A + A.B + B.O)

This is orientation-aware, exact for geodesic-edge polygons, and reduces
to the line integral of (1 - cos theta) dphi in the dense limit.  The
ideal loop comes out at +phi_max.

The fluctuation diagnostic samples noisy loops, measures the spread of
the swept solid angle around the ideal value, and reports it as a
function of the number of noise fluctuations per run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .noise import CartesianRandom, CartesianRandomComplex, sample_realization, noisy_points
from .path import PathSpec, ideal_solid_angle

_NORTH = np.array([0.0, 0.0, 1.0])

MIN_LOOP_POINTS = 2000
POINTS_PER_PIECE = 20


@dataclass(frozen=True)
class SolidAngleStats:
    """Spread of the swept solid angle over noise realizations at one fluctuation count."""

    n_fluctuations: int
    mean_omega: float
    mean_square_deviation: float  # about the ideal solid angle
    mean_square_about_mean: float  # about the sample mean (excludes the bias term)
    n_realizations: int
    seed: int


def solid_angle(points) -> float:
    """Signed solid angle enclosed by an ordered loop of control points.

    Points are projected onto the unit sphere first (only their real
    parts matter); the loop is closed between the last and first point.
    Raises if any point sits at the origin.
    """
    pts = np.asarray(points)
    if np.iscomplexobj(pts):
        pts = pts.real
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
        raise ValueError(f"need an (n >= 3, 3) array of points, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms < 1e-12):
        raise ValueError("loop passes through origin")
    pts = pts / norms[:, None]

    a = pts
    b = np.roll(pts, -1, axis=0)
    cross_z = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]  # north . (a x b)
    denom = 1.0 + a[:, 2] + b[:, 2] + np.sum(a * b, axis=1)
    return float(np.sum(2.0 * np.arctan2(cross_z, denom)))


def _loop_points(realization, spec: PathSpec, n_pieces: int) -> np.ndarray:
    n_pts = max(MIN_LOOP_POINTS, POINTS_PER_PIECE * n_pieces)
    s = np.arange(n_pts) / n_pts
    return noisy_points(realization, spec, s)


def solid_angle_fluctuations(
    spec: PathSpec,
    model: CartesianRandom | CartesianRandomComplex,
    tau: float,
    n_values: Sequence[int],
    n_realizations: int,
    seed: int,
) -> list[SolidAngleStats]:
    """Solid-angle spread vs number of noise fluctuations N.

    For each N the model's tau_step is replaced by tau/N, so one run
    sees exactly N constant noise pieces.  Deviations are measured
    against the ideal loop's solid angle; the spread about the sample
    mean is reported alongside.
    """
    if not isinstance(model, (CartesianRandom, CartesianRandomComplex)):
        raise TypeError("solid_angle_fluctuations expects a Cartesian random model")
    omega_ideal = ideal_solid_angle(spec)
    results = []
    for i_n, n_fluct in enumerate(n_values):
        if n_fluct < 1:
            raise ValueError(f"fluctuation counts must be >= 1, got {n_fluct}")
        model_n = dataclasses.replace(model, tau_step=tau / n_fluct)
        omegas = np.empty(n_realizations)
        for r in range(n_realizations):
            realization = sample_realization(
                model_n, tau, spec, seed, stream=(i_n << 32) + r
            )
            omegas[r] = solid_angle(_loop_points(realization, spec, n_fluct))
        dev = omegas - omega_ideal
        results.append(
            SolidAngleStats(
                n_fluctuations=int(n_fluct),
                mean_omega=float(omegas.mean()),
                mean_square_deviation=float(np.mean(dev**2)),
                mean_square_about_mean=float(np.mean((omegas - omegas.mean()) ** 2)),
                n_realizations=n_realizations,
                seed=seed,
            )
        )
    return results
