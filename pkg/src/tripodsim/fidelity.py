"""Noise-averaged channel estimation and average gate fidelity.

Averaging the realized evolution operators V_r over noise realizations
defines a completely positive map E(rho) = mean_r V_r rho V_r+.  The
average gate fidelity against the target holonomy W is evaluated with
the operator-basis formula

    F = 1/3 + (1/12) tr[W W+ E(P0)] + (1/12) sum_j tr[W sigma_j W+ E(sigma_j)]

with W embedded in the computational block (so W W+ = P0 and the first
trace is the population retained in the computational subspace).  An
independent Monte Carlo average over Bloch-uniform pure states provides
the oracle the formula is validated against; for channels that leak
heavily out of the computational subspace the state average is the
authoritative quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import HolonomyTarget, computational_ops, holonomy_target
from .noise import NoiseModel, rng_stream, sample_realization
from .path import PathSpec
from .propagator import EvolutionConfig, evolve

DEFAULT_REALIZATIONS = 50

# Stream id for state sampling, clear of the per-realization streams.
_STATE_STREAM = 1 << 31


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """Monte Carlo estimate of the noise-averaged channel on the operator basis."""

    p0_image: np.ndarray  # E(P0)
    sigma_images: tuple[np.ndarray, np.ndarray, np.ndarray]  # E(sigma_x,y,z)
    n_realizations: int
    tau: float
    model_descriptor: str
    seed: int
    stream_offset: int
    unitaries: np.ndarray = field(repr=False)  # (n, 4, 4) realized propagators


@dataclass(frozen=True)
class FidelityResult:
    """Average gate fidelity with a jackknife standard error."""

    f: float
    std_error: float
    n_realizations: int
    tau: float
    model_descriptor: str


def _resolve_config(tau: float, cfg: Optional[EvolutionConfig]) -> EvolutionConfig:
    if cfg is None:
        return EvolutionConfig(tau=tau)
    if abs(cfg.tau - tau) > 1e-12 * max(1.0, abs(tau)):
        raise ValueError(f"cfg.tau={cfg.tau} does not match tau={tau}")
    return cfg


def realized_unitaries(
    spec: PathSpec,
    model: Optional[NoiseModel],
    tau: float,
    cfg: Optional[EvolutionConfig] = None,
    n_realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    stream_offset: int = 0,
) -> np.ndarray:
    """Stack of evolution operators, one per noise realization.

    model=None runs the single noiseless evolution (shape (1, 4, 4)).
    Realization r uses the counter-based stream stream_offset + r, so the
    set is reproducible and independent of evaluation order.
    """
    cfg = _resolve_config(tau, cfg)
    if model is None:
        return evolve(spec, None, cfg).v[None, :, :]
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    vs = np.empty((n_realizations, 4, 4), dtype=complex)
    for r in range(n_realizations):
        realization = sample_realization(model, tau, spec, seed, stream=stream_offset + r)
        vs[r] = evolve(spec, realization, cfg).v
    return vs


def _conjugate_images(vs: np.ndarray, op: np.ndarray) -> np.ndarray:
    """Per-realization images V_r op V_r+, shape (n, 4, 4)."""
    return (vs @ op) @ vs.conj().transpose(0, 2, 1)


def estimate_channel(
    spec: PathSpec,
    model: Optional[NoiseModel],
    tau: float,
    cfg: Optional[EvolutionConfig] = None,
    n_realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    stream_offset: int = 0,
) -> ChannelEstimate:
    """Estimate the noise-averaged channel on {P0, sigma_x, sigma_y, sigma_z}.

    Images are means over realizations (numpy pairwise summation, so the
    result does not depend on scheduling).  Each image stays Hermitian
    and E(P0) keeps trace 2 up to rounding.
    """
    vs = realized_unitaries(spec, model, tau, cfg, n_realizations, seed, stream_offset)
    p0, sigmas = computational_ops()
    p0_image = _conjugate_images(vs, p0).mean(axis=0)
    sigma_images = tuple(_conjugate_images(vs, s).mean(axis=0) for s in sigmas)
    return ChannelEstimate(
        p0_image=p0_image,
        sigma_images=sigma_images,
        n_realizations=vs.shape[0],
        tau=float(tau),
        model_descriptor="noiseless" if model is None else repr(model),
        seed=seed,
        stream_offset=stream_offset,
        unitaries=vs,
    )


def _per_realization_fidelities(vs: np.ndarray, target: HolonomyTarget) -> np.ndarray:
    """Operator-basis fidelity of each single-realization channel."""
    w = target.embedded()
    p0, sigmas = computational_ops()
    ww = w @ w.conj().T  # equals P0 for a target supported on the computational block
    terms = np.einsum("ij,rji->r", ww, _conjugate_images(vs, p0))
    for s in sigmas:
        rotated = w @ s @ w.conj().T
        terms = terms + np.einsum("ij,rji->r", rotated, _conjugate_images(vs, s))
    return (1.0 / 3.0 + terms.real / 12.0).astype(float)


def _jackknife_error(values: np.ndarray) -> float:
    n = values.size
    if n < 2:
        return 0.0
    loo = (values.sum() - values) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def average_gate_fidelity(ch: ChannelEstimate, target: HolonomyTarget) -> FidelityResult:
    """Average gate fidelity of the estimated channel against the target holonomy.

    The formula is linear in the channel, so the mean over realizations
    equals the formula applied to the mean images; the standard error is
    the jackknife over realizations.
    """
    f_r = _per_realization_fidelities(ch.unitaries, target)
    return FidelityResult(
        f=float(f_r.mean()),
        std_error=_jackknife_error(f_r),
        n_realizations=ch.n_realizations,
        tau=ch.tau,
        model_descriptor=ch.model_descriptor,
    )


def _bloch_uniform_states(n_states: int, rng: np.random.Generator) -> np.ndarray:
    """Pure states uniform on the computational Bloch sphere, shape (n, 4)."""
    cos_theta = rng.uniform(-1.0, 1.0, size=n_states)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n_states)
    half = 0.5 * np.arccos(cos_theta)
    states = np.zeros((n_states, 4), dtype=complex)
    states[:, 0] = np.cos(half)
    states[:, 1] = np.exp(1j * phi) * np.sin(half)
    return states


def _state_average(
    vs: np.ndarray, target: HolonomyTarget, n_states: int, rng: np.random.Generator
) -> tuple[float, float]:
    """State-averaged fidelity of the realized ensemble, with combined MC error."""
    states = _bloch_uniform_states(n_states, rng)
    m = target.embedded().conj().T @ vs  # (n_real, 4, 4)
    amps = np.einsum("id,rde,ie->ri", states.conj(), m, states)
    f_ri = np.abs(amps) ** 2
    per_real = f_ri.mean(axis=1)
    per_state = f_ri.mean(axis=0)
    se_real = per_real.std(ddof=1) / np.sqrt(len(per_real)) if len(per_real) > 1 else 0.0
    se_state = per_state.std(ddof=1) / np.sqrt(len(per_state))
    return float(f_ri.mean()), float(np.hypot(se_real, se_state))


def fidelity_state_average_oracle(
    spec: PathSpec,
    model: Optional[NoiseModel],
    tau: float,
    cfg: Optional[EvolutionConfig] = None,
    n_realizations: int = DEFAULT_REALIZATIONS,
    n_states: int = 10_000,
    seed: int = 0,
    stream_offset: int = 0,
    target: Optional[HolonomyTarget] = None,
) -> float:
    """Average gate fidelity via direct Monte Carlo over pure input states.

    Independent of the operator-basis formula: averages
    |<psi| W+ V_r |psi>|^2 over Bloch-uniform states psi and realizations
    r.  With the same seed it reuses exactly the realizations of
    estimate_channel.  The default target is the holonomy of the ideal
    loop with solid angle spec.phi_max.
    """
    if n_states < 1000:
        raise ValueError(f"n_states must be >= 1000, got {n_states}")
    target = target if target is not None else holonomy_target(spec.phi_max)
    vs = realized_unitaries(spec, model, tau, cfg, n_realizations, seed, stream_offset)
    state_rng = rng_stream(seed, stream_offset + _STATE_STREAM)
    f, _ = _state_average(vs, target, n_states, state_rng)
    return f
