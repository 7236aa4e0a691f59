"""Four-level tripod system: Hamiltonian, dark states, computational operators.

The system consists of two degenerate ground states |0>, |1> (the
computational basis), an ancillary low-lying state |a>, and an excited
state |e>.  Three complex control amplitudes (x, y, z), measured in units
of the reference Rabi frequency, couple |0>, |1>, |a> to |e>.

The basis ordering is fixed globally as (|0>, |1>, |a>, |e>) -> indices
0..3, so the computational block is the top-left 2x2 of every 4x4
operator in this package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

N_LEVELS = 4


class Level(enum.IntEnum):
    """Global index assignment for the four atomic levels."""

    ZERO = 0
    ONE = 1
    ANCILLA = 2
    EXCITED = 3


class ParamPoint(NamedTuple):
    """A point (x, y, z) in the complex control-amplitude space.

    On the ideal control loop the amplitudes satisfy
    |x|^2 + |y|^2 + |z|^2 = omega_amp^2 (the point lies on a sphere);
    noisy points may leave the sphere and may be complex.
    """

    x: complex
    y: complex
    z: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return float(np.sqrt(abs(self.x) ** 2 + abs(self.y) ** 2 + abs(self.z) ** 2))


def hamiltonian(p: ParamPoint) -> np.ndarray:
    """Tripod Hamiltonian |e>(x<0| + y<1| + z<a|) + h.c. as a 4x4 array.

    Hermitian by construction; the diagonal is zero and only the row and
    column of the excited level are populated.
    """
    return hamiltonians(np.asarray([p], dtype=complex).reshape(1, 3))[0]


def hamiltonians(points: np.ndarray) -> np.ndarray:
    """Batched tripod Hamiltonians for an (n, 3) array of control points."""
    points = np.asarray(points)
    h = np.zeros(points.shape[:-1] + (N_LEVELS, N_LEVELS), dtype=complex)
    h[..., Level.EXCITED, :3] = points
    h[..., :3, Level.EXCITED] = points.conj()
    return h


def polar_to_cartesian(omega_amp: float, theta: float, phi: float) -> ParamPoint:
    """Control point on the sphere of radius omega_amp at polar angles (theta, phi)."""
    if omega_amp <= 0:
        raise ValueError(f"omega_amp must be positive, got {omega_amp}")
    return ParamPoint(
        omega_amp * np.sin(theta) * np.cos(phi),
        omega_amp * np.sin(theta) * np.sin(phi),
        omega_amp * np.cos(theta),
    )


def dark_states(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """The two zero-energy eigenstates of the on-sphere Hamiltonian.

    psi0 = cos(theta) (cos(phi)|0> + sin(phi)|1>) - sin(theta)|a>
    psi1 = -sin(phi)|0> + cos(phi)|1>

    Both are annihilated by hamiltonian(polar_to_cartesian(_, theta, phi))
    and are orthonormal.  The phase convention is fixed: fidelity against
    the target holonomy is only meaningful in this gauge.
    """
    psi0 = np.array(
        [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta), 0.0],
        dtype=complex,
    )
    psi1 = np.array([-np.sin(phi), np.cos(phi), 0.0, 0.0], dtype=complex)
    return psi0, psi1


def computational_ops() -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Projector onto span{|0>,|1>} and the embedded Pauli matrices.

    Returns (P0, (sx, sy, sz)) as 4x4 arrays.  P0 projects onto the
    computational subspace at the loop start (theta = phi = 0, where the
    dark states coincide with |0>, |1>); the Pauli operators act on that
    subspace and vanish elsewhere.
    """
    p0 = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    p0[Level.ZERO, Level.ZERO] = 1.0
    p0[Level.ONE, Level.ONE] = 1.0
    sx = np.zeros_like(p0)
    sx[0, 1] = sx[1, 0] = 1.0
    sy = np.zeros_like(p0)
    sy[0, 1] = -1j
    sy[1, 0] = 1j
    sz = np.zeros_like(p0)
    sz[0, 0] = 1.0
    sz[1, 1] = -1.0
    return p0, (sx, sy, sz)


@dataclass(frozen=True)
class HolonomyTarget:
    """Ideal gate exp(-i sigma_y omega) produced by a loop of solid angle omega."""

    omega: float
    w: np.ndarray  # 2x2 unitary on the computational basis

    def embedded(self) -> np.ndarray:
        """The target as a 4x4 operator, zero outside the computational block."""
        return embed_in_computational(self.w)


def holonomy_target(omega: float) -> HolonomyTarget:
    """Target holonomy for a loop enclosing solid angle omega.

    exp(-i sigma_y omega) = cos(omega) I - i sin(omega) sigma_y, a real
    rotation of the computational basis.  omega = pi/2 gives -i sigma_y
    (a NOT-like gate); omega = pi/4 gives the Hadamard-related gate.
    """
    c, s = np.cos(omega), np.sin(omega)
    w = np.array([[c, -s], [s, c]], dtype=complex)
    return HolonomyTarget(omega=float(omega), w=w)


def embed_in_computational(w2: np.ndarray) -> np.ndarray:
    """Embed a 2x2 operator into the 4-level space, zero on |a>, |e>."""
    w2 = np.asarray(w2, dtype=complex)
    if w2.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {w2.shape}")
    out = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    out[:2, :2] = w2
    return out
