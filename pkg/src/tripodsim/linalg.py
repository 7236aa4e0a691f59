"""Dense complex linear algebra for the 2x2 and 4x4 matrices of the tripod system.

The workhorse is the closed-form step exponential exp(-i H dt).  The
tripod Hamiltonian satisfies H^3 = |r|^2 H with |r|^2 = |x|^2+|y|^2+|z|^2
(it has rank 2 with eigenvalues 0, 0, +|r|, -|r|), so the exponential
truncates exactly:

    exp(-i H dt) = I - i (sin(|r| dt)/|r|) H + ((cos(|r| dt) - 1)/|r|^2) H^2

This is O(1) per step and unitary up to rounding.  A scaling-and-squaring
series exponential is kept alongside as an independent reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ParamPoint, hamiltonians


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used across the package."""

    unitarity: float = 1e-10  # ||U+ U - I||_max for exact-arithmetic unitaries
    hermiticity: float = 1e-10  # ||H - H+||_max for Hamiltonian inputs
    arithmetic: float = 1e-12  # elementwise round-off budget
    propagator_unitarity: float = 1e-8  # accumulated defect over a full evolution


TOL = Tolerances()

VALID_DIMS = (2, 4)


def _as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] not in VALID_DIMS:
        raise ValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit dimension check."""
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm of U+ U - I."""
    u = np.asarray(u, dtype=complex)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(u.conj().swapaxes(-1, -2) @ u - eye)))


def is_unitary(u: np.ndarray, tol: float = TOL.unitarity) -> bool:
    return unitarity_defect(u) <= tol


def step_exp(p: ParamPoint, dt: float) -> np.ndarray:
    """Closed-form exp(-i H(p) dt) for the tripod Hamiltonian.

    Valid for any complex (x, y, z), on or off the control sphere; the
    |r| -> 0 limit is the identity and is handled analytically.
    """
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    v = np.asarray([p], dtype=complex).reshape(1, 3)
    return step_exps(v, np.array([float(dt)]))[0]


def step_exps(points: np.ndarray, dts: np.ndarray) -> np.ndarray:
    """Batched closed-form step exponentials.

    points: (n, 3) complex control amplitudes; dts: (n,) durations.
    Returns (n, 4, 4) unitaries exp(-i H(points[k]) dts[k]).
    """
    points = np.asarray(points, dtype=complex)
    dts = np.asarray(dts, dtype=float)
    rho = np.sqrt(np.sum(np.abs(points) ** 2, axis=-1))
    phase = rho * dts
    # sin(x)/x and (cos x - 1)/x^2 written via sinc for a stable x -> 0 limit
    a = -1j * dts * np.sinc(phase / np.pi)
    b = -0.5 * dts**2 * np.sinc(phase / (2.0 * np.pi)) ** 2
    h = hamiltonians(points)
    out = h * a[..., None, None] + (h @ h) * b[..., None, None]
    out[..., 0, 0] += 1.0
    out[..., 1, 1] += 1.0
    out[..., 2, 2] += 1.0
    out[..., 3, 3] += 1.0
    return out


def expm_reference(h: np.ndarray, dt: float) -> np.ndarray:
    """Reference exp(-i h dt) via scaling-and-squaring of the power series.

    Independent of the closed-form route; accurate to ~1e-12 for
    ||h dt|| <= 100.  Rejects non-Hermitian input.
    """
    h = _as_square(h, "h")
    if np.max(np.abs(h - h.conj().T)) > TOL.hermiticity:
        raise ValueError("expm_reference requires a Hermitian matrix")
    a = -1j * float(dt) * h
    norm = np.linalg.norm(a, np.inf)
    n_squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    a = a / (2**n_squarings)
    eye = np.eye(a.shape[0], dtype=complex)
    term = eye.copy()
    out = eye.copy()
    for k in range(1, 40):
        term = term @ a / k
        out = out + term
        if np.max(np.abs(term)) < 1e-20:
            break
    for _ in range(n_squarings):
        out = out @ out
    return out
