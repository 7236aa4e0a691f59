"""Ideal control loops on the parameter sphere and the optimal operational times.

The loop runs from the north pole down the phi = 0 meridian to the
equator, along the equator to phi = phi_max, and back up that meridian,
in three equal-duration segments with piecewise-constant angular speed.
Scaled time s in [0, 1] parameterizes the whole loop; segment boundaries
sit at s = 1/3 and 2/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ParamPoint

SEGMENT_BOUNDS = (1.0 / 3.0, 2.0 / 3.0)


@dataclass(frozen=True)
class PathSpec:
    """Meridian-equator-meridian loop of equatorial arc phi_max on a sphere of radius omega_amp."""

    phi_max: float = math.pi / 2
    omega_amp: float = 1.0

    def __post_init__(self):
        if self.omega_amp <= 0:
            raise ValueError(f"omega_amp must be positive, got {self.omega_amp}")


def ideal_angles(spec: PathSpec, s) -> tuple[np.ndarray, np.ndarray]:
    """Polar angles (theta, phi) of the ideal loop at scaled time(s) s.

    theta ramps 0 -> pi/2 on the first third, holds on the second, ramps
    back on the last; phi holds at 0, ramps 0 -> phi_max, then holds.
    Branchless closed form, continuous in s.
    """
    s = np.asarray(s, dtype=float)
    theta = 1.5 * np.pi * (np.minimum(s, 1.0 / 3.0) - np.maximum(s - 2.0 / 3.0, 0.0))
    phi = 3.0 * spec.phi_max * (np.clip(s, 1.0 / 3.0, 2.0 / 3.0) - 1.0 / 3.0)
    return theta, phi


def ideal_points(spec: PathSpec, s: np.ndarray) -> np.ndarray:
    """Cartesian control points of the ideal loop, shape (..., 3), real-valued."""
    theta, phi = ideal_angles(spec, s)
    sin_t = np.sin(theta)
    return spec.omega_amp * np.stack(
        [sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta)], axis=-1
    )


def ideal_point(spec: PathSpec, s: float) -> ParamPoint:
    """Ideal loop point at scaled time s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    x, y, z = ideal_points(spec, np.asarray(float(s)))
    return ParamPoint(complex(x), complex(y), complex(z))


def optimal_time(k: int) -> float:
    """k-th optimal operational time (dimensionless, in units of 1/Omega).

    At these times the noiseless finite-time gate on the phi_max = pi/2
    loop reproduces the ideal holonomy exactly: the generalized Rabi
    angle accumulated on each segment closes a full cycle.

        Omega tau_k = (3 pi / 2) sqrt(16 k^2 - 1)
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return 1.5 * math.pi * math.sqrt(16.0 * k * k - 1.0)


def ideal_solid_angle(spec: PathSpec) -> float:
    """Solid angle enclosed by the ideal loop.

    The pole-equator-pole wedge between meridians phi = 0 and
    phi = phi_max encloses exactly its equatorial arc.
    """
    return spec.phi_max
