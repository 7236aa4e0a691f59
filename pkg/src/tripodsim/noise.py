"""Parametric noise models perturbing the ideal control loop.

Three families, plus variants:

* ``Monochromatic`` / ``MonochromaticRealPart``: a single-frequency probe
  added to each Cartesian control amplitude, with per-component random
  phases.  The complex form perturbs amplitude and detuning; the
  real-part form perturbs amplitude only.
* ``SquareWaveProbe``: same structure with the oscillation replaced by a
  +/-amplitude square wave of given half-period.
* ``SphereAngular``: within each loop segment, the nominally constant
  polar angle receives a piecewise-constant uniform offset on
  sub-segments of duration tau_step; points stay on the control sphere.
* ``CartesianRandom`` / ``CartesianRandomComplex``: piecewise-constant
  uniform offsets applied directly to the Cartesian amplitudes on global
  intervals of duration tau_step.

Randomness contract: every realization is drawn from a counter-based
Philox generator keyed by (seed, stream), with a fixed component-major
draw order.  Identical (model, tau, spec, seed, stream) always yields
identical offsets, independent of evaluation order or thread.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .model import ParamPoint
from .path import PathSpec, SEGMENT_BOUNDS, ideal_angles, ideal_points

_MASK64 = (1 << 64) - 1

# Relative nudge keeping piece lookup right-continuous at breakpoints.
_EDGE_NUDGE = 1e-9


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for one logical (seed, stream) pair.

    Philox keyed on the two 64-bit words; streams are independent for
    distinct keys, so realizations can be sampled in any order or in
    parallel without coordination.
    """
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Monochromatic:
    """Complex single-frequency probe added to each control amplitude.

    offset_c(s) = amplitude * exp(i (2 pi eta tau s + phase_c))

    ``eta`` is the probe frequency in cycles per unit time (units of the
    reference Rabi frequency).  The fidelity breakdown band sits at the
    Bohr resonance, eta ~ 1/(2 pi) ~ 0.16, on this axis.
    """

    eta: float
    amplitude: float
    phases: Optional[tuple[float, float, float]] = None  # None -> drawn U[0, 2pi)

    def __post_init__(self):
        _check_amplitude(self.amplitude)
        _check_phases(self.phases)


@dataclass(frozen=True)
class MonochromaticRealPart:
    """Real part of the monochromatic probe (amplitude noise only, no detuning)."""

    eta: float
    amplitude: float
    phases: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        _check_amplitude(self.amplitude)
        _check_phases(self.phases)


@dataclass(frozen=True)
class SquareWaveProbe:
    """+/-amplitude square wave per component, sign flipping every half_period."""

    half_period: float
    amplitude: float
    phases: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        if self.half_period <= 0:
            raise ValueError(f"half_period must be positive, got {self.half_period}")
        _check_amplitude(self.amplitude)
        _check_phases(self.phases)


@dataclass(frozen=True)
class SphereAngular:
    """Uniform[-gamma, gamma] offsets of the constant angle on sub-segments of tau_step."""

    gamma: float
    tau_step: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        _check_tau_step(self.tau_step)


@dataclass(frozen=True)
class CartesianRandom:
    """Real uniform[-epsilon, epsilon] offsets, piecewise constant on global tau_step intervals."""

    epsilon: float
    tau_step: float

    def __post_init__(self):
        _check_amplitude(self.epsilon, "epsilon")
        _check_tau_step(self.tau_step)


@dataclass(frozen=True)
class CartesianRandomComplex:
    """Cartesian random noise with independent uniform real and imaginary parts."""

    epsilon: float
    tau_step: float

    def __post_init__(self):
        _check_amplitude(self.epsilon, "epsilon")
        _check_tau_step(self.tau_step)


NoiseModel = Union[
    Monochromatic,
    MonochromaticRealPart,
    SquareWaveProbe,
    SphereAngular,
    CartesianRandom,
    CartesianRandomComplex,
]

_VARIANT_NAMES = {
    Monochromatic: "monochromatic",
    MonochromaticRealPart: "monochromatic-real",
    SquareWaveProbe: "square-wave",
    SphereAngular: "sphere-angular",
    CartesianRandom: "cartesian",
    CartesianRandomComplex: "cartesian-complex",
}


def variant_name(model: NoiseModel) -> str:
    return _VARIANT_NAMES[type(model)]


def _check_amplitude(value: float, name: str = "amplitude") -> None:
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")


def _check_tau_step(value: float) -> None:
    if value <= 0:
        raise ValueError(f"tau_step must be positive, got {value}")


def _check_phases(phases) -> None:
    if phases is not None and len(phases) != 3:
        raise ValueError("phases must be a tuple of three floats")


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    """One sampled noisy trajectory around the ideal loop.

    ``offset(s, tau)`` evaluates the control-amplitude deviation from the
    ideal point; ``breakpoints`` lists the s-values where the deviation is
    discontinuous (empty for smooth models).  The (seed, stream) record
    makes the realization reproducible.
    """

    model: NoiseModel
    tau: float
    breakpoints: np.ndarray
    seed: int
    stream: int
    _offset_fn: Callable[[np.ndarray, float], np.ndarray] = field(repr=False)

    def offset(self, s, tau: Optional[float] = None) -> np.ndarray:
        """Offset vector(s) at scaled time(s) s; shape (..., 3), complex."""
        use_tau = self.tau if tau is None else float(tau)
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = self._offset_fn(s_arr, use_tau)
        if np.ndim(s) == 0:
            return out[0]
        return out


def sample_realization(
    model: NoiseModel, tau: float, spec: PathSpec, seed: int, stream: int = 0
) -> NoiseRealization:
    """Draw one noise realization for a gate of operational time tau.

    All random values are drawn eagerly, in a fixed component-major
    order, from ``rng_stream(seed, stream)``.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    rng = rng_stream(seed, stream)

    if isinstance(model, (Monochromatic, MonochromaticRealPart)):
        fn = _monochromatic_offsets(model, rng)
        breakpoints = np.empty(0)
    elif isinstance(model, SquareWaveProbe):
        fn, breakpoints = _square_wave_offsets(model, tau, rng)
    elif isinstance(model, SphereAngular):
        fn, breakpoints = _sphere_angular_offsets(model, tau, spec, rng)
    elif isinstance(model, (CartesianRandom, CartesianRandomComplex)):
        fn, breakpoints = _cartesian_offsets(model, tau, rng)
    else:
        raise TypeError(f"unknown noise model {model!r}")

    return NoiseRealization(
        model=model,
        tau=float(tau),
        breakpoints=breakpoints,
        seed=seed,
        stream=stream,
        _offset_fn=fn,
    )


def _draw_phases(model, rng: np.random.Generator) -> np.ndarray:
    if model.phases is not None:
        return np.asarray(model.phases, dtype=float)
    return rng.uniform(0.0, 2.0 * np.pi, size=3)


def _monochromatic_offsets(model, rng) -> Callable:
    phases = _draw_phases(model, rng)
    amp = model.amplitude
    omega_noise = 2.0 * np.pi * model.eta  # eta is in cycles per unit time
    real_only = isinstance(model, MonochromaticRealPart)

    def fn(s: np.ndarray, tau: float) -> np.ndarray:
        wave = np.exp(1j * (omega_noise * tau * s[:, None] + phases[None, :]))
        if real_only:
            wave = wave.real.astype(complex)
        return amp * wave

    return fn


def _square_wave_offsets(model: SquareWaveProbe, tau: float, rng) -> tuple[Callable, np.ndarray]:
    phases = _draw_phases(model, rng)
    amp = model.amplitude
    omega = np.pi / model.half_period  # sign of sin(omega*t + phase) flips every half_period

    def fn(s: np.ndarray, tau_eval: float) -> np.ndarray:
        arg = omega * tau_eval * s[:, None] + phases[None, :]
        return np.where(np.sin(arg) >= 0.0, amp, -amp).astype(complex)

    # Per-component sign flips at s = (m - phase/pi) * half_period / tau
    bps = []
    for phase in phases:
        m_lo = int(np.ceil(phase / np.pi))
        m_hi = int(np.floor(phase / np.pi + tau / model.half_period))
        for m in range(m_lo, m_hi + 1):
            s_flip = (m - phase / np.pi) * model.half_period / tau
            if 0.0 < s_flip < 1.0:
                bps.append(s_flip)
    return fn, _dedup_sorted(np.asarray(bps))


def _sphere_angular_offsets(
    model: SphereAngular, tau: float, spec: PathSpec, rng
) -> tuple[Callable, np.ndarray]:
    tau_segment = tau / 3.0
    n_sub = int(tau_segment / model.tau_step + _EDGE_NUDGE)
    if n_sub < 1:
        raise ValueError(
            f"noise step exceeds segment duration: tau_step={model.tau_step}, "
            f"segment={tau_segment}"
        )
    # xi[i, j]: offset of the constant angle in sub-segment j of segment i.
    xi = rng.uniform(-model.gamma, model.gamma, size=(3, n_sub))
    step_s = model.tau_step / tau  # the final sub-segment stretches to the segment end

    def fn(s: np.ndarray, tau_eval: float) -> np.ndarray:
        seg = np.clip((3.0 * s + _EDGE_NUDGE).astype(int), 0, 2)
        local = s - seg / 3.0
        sub = np.clip((local / step_s + _EDGE_NUDGE).astype(int), 0, n_sub - 1)
        offs = xi[seg, sub]
        theta, phi = ideal_angles(spec, s)
        # segments 0 and 2 hold phi constant; segment 1 holds theta constant
        theta_n = np.where(seg == 1, theta + offs, theta)
        phi_n = np.where(seg == 1, phi, phi + offs)
        sin_t = np.sin(theta_n)
        noisy = spec.omega_amp * np.stack(
            [sin_t * np.cos(phi_n), sin_t * np.sin(phi_n), np.cos(theta_n)], axis=-1
        )
        return (noisy - ideal_points(spec, s)).astype(complex)

    bps = [np.asarray(SEGMENT_BOUNDS)]
    for i in range(3):
        j = np.arange(1, n_sub)
        bps.append(i / 3.0 + j * step_s)
    return fn, _dedup_sorted(np.concatenate(bps))


def _cartesian_offsets(model, tau: float, rng) -> tuple[Callable, np.ndarray]:
    n_pieces = int(np.ceil(tau / model.tau_step - _EDGE_NUDGE))
    eps = model.epsilon
    if isinstance(model, CartesianRandomComplex):
        xi = rng.uniform(-eps, eps, size=(3, n_pieces)) + 1j * rng.uniform(
            -eps, eps, size=(3, n_pieces)
        )
    else:
        xi = rng.uniform(-eps, eps, size=(3, n_pieces)).astype(complex)
    inv_step = 1.0 / model.tau_step

    def fn(s: np.ndarray, tau_eval: float) -> np.ndarray:
        j = np.clip((s * tau_eval * inv_step + _EDGE_NUDGE).astype(int), 0, n_pieces - 1)
        return xi[:, j].T

    j = np.arange(1, n_pieces)
    bps = j * model.tau_step / tau
    return fn, _dedup_sorted(bps[bps < 1.0 - 1e-12])


def _dedup_sorted(values: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if values.size == 0:
        return values
    values = np.sort(values)
    keep = np.concatenate([[True], np.diff(values) > tol])
    return values[keep]


def noisy_points(
    realization: Optional[NoiseRealization],
    spec: PathSpec,
    s: np.ndarray,
    tau: Optional[float] = None,
) -> np.ndarray:
    """Noisy control points ideal(s) + offset(s); (n, 3), complex when noisy."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    base = ideal_points(spec, s)
    if realization is None:
        return base
    return base + realization.offset(s, tau)


def noisy_point(
    realization: NoiseRealization, spec: PathSpec, s: float, tau: Optional[float] = None
) -> ParamPoint:
    """Single noisy control point at scaled time s."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    x, y, z = noisy_points(realization, spec, np.asarray([float(s)]), tau)[0]
    return ParamPoint(complex(x), complex(y), complex(z))
