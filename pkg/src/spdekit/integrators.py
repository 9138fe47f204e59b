"""Time-stepping schemes for the Galerkin SDE systems.

Four schemes are provided:

* ``em_step`` -- explicit Euler-Maruyama on the Ito form.
* ``heun_strat_step`` -- predictor-corrector (midpoint on the noise) for the
  Stratonovich form of the transport equation, whose deterministic drift is
  (1 - sigma/2) Lap.
* ``exp_euler_step`` -- one-step Duhamel: the Laplacian is integrated exactly
  by the heat semigroup, nonlinear drift is frozen at the left endpoint, and
  additive noise enters as an exact stochastic-convolution increment
  (AdditiveHeat) or as the semigroup image of the plain increment otherwise.
* ``exact_ou_step`` -- the distributionally exact transition of the diagonal
  Ornstein-Uhlenbeck system dv = Lap v dt + Q^(1/2) dW.

``simulate`` drives whole paths and records every state together with the
consumed channel increments, so pathwise identities can be replayed.  Hot
diagonal loops dispatch to the numba kernels in :mod:`spdekit._kernels`;
``SPDEKIT_DISABLE_NUMBA=1`` selects the pure numpy lane instead.

Explicit schemes are stable only for dt < 2 / (2 pi K)^2; exponential Euler
removes the constraint for the diagonal linear part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .models import (
    AdditiveHeat,
    Burgers,
    ModelSpec,
    PorousMedium,
    ReactionDiffusion,
    TransportHeat,
    diffusion_apply,
    drift,
    transport_noise_amplitude,
)
from .noise import (
    CovarianceSpec,
    NoiseIncrement,
    NoiseSampler,
    increment_from_scaled,
    pack_draws,
)
from .spectral import SpectralField, TorusGrid, heat_semigroup, laplacian

__all__ = [
    "SamplePath",
    "SchemeSpec",
    "BlowUpError",
    "SCHEME_KINDS",
    "BLOW_UP_NORM",
    "em_step",
    "heun_strat_step",
    "exp_euler_step",
    "exact_ou_step",
    "simulate",
    "ou_channel_variances",
]

SCHEME_KINDS = ("euler_maruyama", "heun_stratonovich", "exponential_euler", "exact_ou")

BLOW_UP_NORM = 1e12  # L2 norm beyond which a path is declared blown up


class BlowUpError(RuntimeError):
    """State left the finite range; carries the offending time."""

    def __init__(self, time: float, message: str | None = None):
        self.time = time
        super().__init__(message or f"solution blew up at t = {time:.6g}")


@dataclass(frozen=True)
class SchemeSpec:
    kind: str
    dt: float

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme {self.kind!r}; expected one of {SCHEME_KINDS}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")


@dataclass(frozen=True)
class SamplePath:
    """A realized trajectory: time grid, spectra per time, consumed noise.

    ``states[i]`` is the half spectrum at ``times[i]``; ``draws[i]`` are the
    channel increments (N(0, dt) reals) consumed by step i.
    """

    grid: TorusGrid
    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    draws: np.ndarray = field(repr=False)
    spec: CovarianceSpec | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=np.complex128)
        draws = np.asarray(self.draws, dtype=float)
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if states.shape != (times.size, self.grid.n_modes + 1):
            raise ValueError("need one state per time on this grid")
        if draws.shape[0] != times.size - 1:
            raise ValueError("need one increment per step")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "draws", draws)

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    def state(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.states[i])

    @property
    def final(self) -> SpectralField:
        return self.state(self.n_steps)

    def increment(self, i: int) -> NoiseIncrement:
        if self.spec is None:
            raise ValueError("path carries no covariance; increments unavailable")
        dt = float(self.times[i + 1] - self.times[i])
        return increment_from_scaled(self.spec, self.draws[i], dt)

    def l2_sq_series(self) -> np.ndarray:
        c = self.states
        return c[:, 0].real ** 2 + 2.0 * np.sum(np.abs(c[:, 1:]) ** 2, axis=1)

    def h1_sq_series(self) -> np.ndarray:
        w = self.grid.sobolev_weights
        c = self.states
        return w[0] * c[:, 0].real ** 2 + 2.0 * np.sum(w[1:] * np.abs(c[:, 1:]) ** 2, axis=1)

    def mode0_series(self) -> np.ndarray:
        return self.states[:, 0].real.copy()


def _check_inc(u: SpectralField, inc: NoiseIncrement) -> None:
    if inc.dt <= 0:
        raise ValueError(f"increment dt must be positive, got {inc.dt}")
    if inc.field.grid != u.grid:
        raise ValueError("increment grid does not match state grid")


def em_step(model: ModelSpec, u: SpectralField, inc: NoiseIncrement) -> SpectralField:
    """u + A(u) dt + B(u) dW, the Ito-form Euler step of the Galerkin system."""
    _check_inc(u, inc)
    return u + drift(model, u) * inc.dt + diffusion_apply(model, u, inc)


def heun_strat_step(model: ModelSpec, u: SpectralField, inc: NoiseIncrement) -> SpectralField:
    """Midpoint predictor-corrector for the Stratonovich transport form.

    Integrates du = (1 - sigma/2) Lap u dt + sqrt(sigma) u_x o dW: the
    deterministic drift is explicit, the noise slope is averaged between the
    base point and the Euler predictor.
    """
    if not isinstance(model, TransportHeat):
        raise ValueError("heun_strat_step applies to the TransportHeat model only")
    _check_inc(u, inc)
    s = transport_noise_amplitude(model, inc)
    a = u.grid.angular
    mu = u.grid.laplacian_eigs
    c = u.coef
    slope = c * (1j * a)
    pred = c + slope * s
    pred_slope = pred * (1j * a)
    drift_fac = 1.0 - 0.5 * model.sigma_total
    new = c + (c * (-mu) * drift_fac) * inc.dt + (0.5 * (slope + pred_slope)) * s
    return SpectralField(u.grid, new)


def ou_channel_variances(spec: CovarianceSpec, dt: float) -> np.ndarray:
    """Per-channel variance of the exact OU transition noise over one step.

    For mode k the stochastic-convolution increment has total variance
    lambda_k (1 - exp(-2 mu_k dt)) / (2 mu_k) (pure Brownian lambda_0 dt at
    k = 0), split evenly between the cosine and sine channels.
    """
    mu = spec.grid.laplacian_eigs
    tau = np.empty_like(mu)
    tau[0] = dt
    tau[1:] = (1.0 - np.exp(-2.0 * mu[1:] * dt)) / (2.0 * mu[1:])
    lam = spec.channel_variances()
    tau_ch = np.empty(spec.n_channels)
    tau_ch[0] = tau[0]
    tau_ch[1::2] = tau[1:]
    tau_ch[2::2] = tau[1:]
    return lam * tau_ch


def _ou_rescale(spec: CovarianceSpec, dt: float) -> np.ndarray:
    """Factor turning N(0, dt) channel draws into exact-convolution draws."""
    mu = spec.grid.laplacian_eigs
    g = np.empty(spec.n_channels)
    g[0] = 1.0
    with np.errstate(invalid="ignore"):
        gm = np.sqrt((1.0 - np.exp(-2.0 * mu[1:] * dt)) / (2.0 * mu[1:] * dt))
    g[1::2] = gm
    g[2::2] = gm
    return g


def exact_ou_step(
    q: CovarianceSpec, v: SpectralField, dt: float, sampler: NoiseSampler
) -> SpectralField:
    """Distributionally exact transition of dv = Lap v dt + Q^(1/2) dW."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if v.grid != q.grid:
        raise ValueError("state grid does not match covariance grid")
    z = sampler.next_standard_draws()
    eta = pack_draws(q, z * np.sqrt(dt) * _ou_rescale(q, dt))
    decay = np.exp(-q.grid.laplacian_eigs * dt)
    return SpectralField(v.grid, decay * v.coef + eta)


def _nonlinear_drift(model: ModelSpec, u: SpectralField) -> SpectralField:
    """A(u) minus the Laplacian, for models with a Laplacian linear part."""
    if isinstance(model, (TransportHeat, AdditiveHeat)):
        return SpectralField(u.grid, np.zeros_like(u.coef))
    if isinstance(model, PorousMedium) and model.m == 2:
        return SpectralField(u.grid, np.zeros_like(u.coef))
    if isinstance(model, (ReactionDiffusion, Burgers)):
        return drift(model, u) - laplacian(u)
    raise ValueError(
        f"{type(model).__name__} has no Laplacian linear part; exponential Euler undefined"
    )


def exp_euler_step(model: ModelSpec, u: SpectralField, inc: NoiseIncrement) -> SpectralField:
    """One-step Duhamel update with exact integration of the linear part."""
    _check_inc(u, inc)
    if isinstance(model, TransportHeat):
        forced = u + diffusion_apply(model, u, inc)
        return heat_semigroup(forced, inc.dt)
    nl = _nonlinear_drift(model, u)
    if isinstance(model, AdditiveHeat):
        eta = pack_draws(model.q, inc.per_mode * _ou_rescale(model.q, inc.dt))
        propagated = heat_semigroup(u + nl * inc.dt, inc.dt)
        return SpectralField(u.grid, propagated.coef + eta)
    # remaining additive-noise models: semigroup image of the plain increment
    return heat_semigroup(u + nl * inc.dt + inc.field, inc.dt)


_STEP_FUNCS = {
    "euler_maruyama": em_step,
    "heun_stratonovich": heun_strat_step,
    "exponential_euler": exp_euler_step,
}


def _resolve_steps(T: float, dt: float) -> int:
    if T < 0:
        raise ValueError(f"horizon must be nonnegative, got {T}")
    n = int(round(T / dt)) if T > 0 else 0
    if abs(n * dt - T) > 1e-9 * max(T, dt):
        raise ValueError(f"dt={dt} does not divide T={T} within rounding")
    return n


def _packing_spec(model: ModelSpec, sampler: NoiseSampler | None) -> CovarianceSpec:
    if sampler is not None:
        if sampler.spec.grid != model.grid:
            raise ValueError("sampler grid does not match model grid")
        return sampler.spec
    if isinstance(model, TransportHeat):
        return CovarianceSpec.white(model.grid)
    return model.q


def simulate(
    model: ModelSpec,
    scheme: SchemeSpec,
    u0: SpectralField,
    T: float,
    sampler: NoiseSampler | None = None,
    scaled_draws: np.ndarray | None = None,
) -> SamplePath:
    """Run the scheme from u0 to time T, recording states and increments.

    Noise comes from ``sampler`` (reproducible per (seed, stream_id); steps
    0..n_steps-1 of its stream are consumed by counter, regardless of the
    sampler's current position) or from a pre-scaled draw matrix of shape
    (n_steps, 2K+1) -- the latter lets refinement studies drive several dt
    levels with one Brownian path.  With neither, the increments are zero
    (deterministic run).  Raises :class:`BlowUpError` when a state leaves
    the finite range.
    """
    grid = model.grid
    if u0.grid != grid:
        raise ValueError("initial state grid does not match model grid")
    dt = scheme.dt
    n_steps = _resolve_steps(T, dt)
    spec = _packing_spec(model, sampler)

    if scaled_draws is not None:
        scaled = np.asarray(scaled_draws, dtype=float)
        if scaled.shape != (n_steps, spec.n_channels):
            raise ValueError(
                f"scaled_draws must have shape {(n_steps, spec.n_channels)}, got {scaled.shape}"
            )
    elif sampler is not None and n_steps > 0:
        scaled = sampler.scaled_block(0, n_steps, dt)
    else:
        scaled = np.zeros((n_steps, spec.n_channels))

    times = np.arange(n_steps + 1) * dt
    states = np.empty((n_steps + 1, grid.n_modes + 1), dtype=np.complex128)
    states[0] = u0.coef
    if n_steps == 0:
        return SamplePath(grid, times, states, scaled, spec)

    if scheme.kind == "exact_ou" and not isinstance(model, AdditiveHeat):
        raise ValueError("exact_ou scheme applies to the AdditiveHeat model only")
    if scheme.kind == "heun_stratonovich" and not isinstance(model, TransportHeat):
        raise ValueError("heun_stratonovich applies to the TransportHeat model only")

    blown = _run_fast(model, scheme, states, scaled, dt)
    if blown is None:
        _run_generic(model, scheme, states, scaled, dt, spec)
    elif blown >= 0:
        raise BlowUpError(times[blown])
    _check_finite_tail(states, times)
    return SamplePath(grid, times, states, scaled, spec)


def _transport_noise_series(model: TransportHeat, scaled: np.ndarray) -> np.ndarray:
    j = len(model.sigma_seq)
    if j > scaled.shape[1]:
        raise ValueError(f"{j} noise channels needed, {scaled.shape[1]} drawn")
    return scaled[:, :j] @ np.sqrt(np.asarray(model.sigma_seq))


def _additive_eta(model: ModelSpec, scheme: SchemeSpec, scaled: np.ndarray, dt: float):
    """(decay, eta) of the diagonal linear recursion, or None if nonlinear."""
    grid = model.grid
    mu = grid.laplacian_eigs
    if scheme.kind == "euler_maruyama":
        return 1.0 - mu * dt, pack_draws(model.q, scaled)
    # exponential Euler and exact OU share the exact-convolution increment
    return np.exp(-mu * dt), pack_draws(model.q, scaled * _ou_rescale(model.q, dt))


def _run_fast(model, scheme, states, scaled, dt):
    """Kernel dispatch; returns blow-up step, -1 for clean, None if unhandled."""
    grid = model.grid
    blow_sq = BLOW_UP_NORM**2
    if isinstance(model, TransportHeat) and scheme.kind in (
        "euler_maruyama",
        "heun_stratonovich",
        "exponential_euler",
    ):
        amp = _transport_noise_series(model, scaled)
        if not _kernels.NUMBA_ENABLED:
            return None
        if scheme.kind == "euler_maruyama":
            return _kernels.transport_em_path(states, grid.laplacian_eigs, grid.angular, dt, amp, blow_sq)
        if scheme.kind == "heun_stratonovich":
            return _kernels.transport_heun_path(
                states, grid.laplacian_eigs, grid.angular, dt, amp, model.sigma_total, blow_sq
            )
        decay = np.exp(-grid.laplacian_eigs * dt)
        return _kernels.transport_exp_path(states, decay, grid.angular, amp, blow_sq)
    if isinstance(model, AdditiveHeat) and scheme.kind in (
        "euler_maruyama",
        "exponential_euler",
        "exact_ou",
    ):
        decay, eta = _additive_eta(model, scheme, scaled, dt)
        if not _kernels.NUMBA_ENABLED:
            return None
        return _kernels.linear_additive_path(states, decay.astype(np.complex128), eta, blow_sq)
    return None


def _run_generic(model, scheme, states, scaled, dt, spec):
    """Pure numpy lane: per-step field arithmetic (also the nonlinear path)."""
    grid = model.grid
    if isinstance(model, AdditiveHeat) and scheme.kind in (
        "euler_maruyama",
        "exponential_euler",
        "exact_ou",
    ):
        decay, eta = _additive_eta(model, scheme, scaled, dt)
        c = states[0].copy()
        for n in range(scaled.shape[0]):
            c = decay * c + eta[n]
            states[n + 1] = c
            _step_guard(states, n + 1, dt)
        return
    step = _STEP_FUNCS[scheme.kind]
    u = SpectralField(grid, states[0])
    for n in range(scaled.shape[0]):
        inc = increment_from_scaled(spec, scaled[n], dt)
        u = step(model, u, inc)
        states[n + 1] = u.coef
        _step_guard(states, n + 1, dt)


def _step_guard(states, i, dt):
    row = states[i]
    if not np.all(np.isfinite(row.view(float))):
        raise BlowUpError(i * dt)
    norm_sq = row[0].real ** 2 + 2.0 * np.sum(np.abs(row[1:]) ** 2)
    if norm_sq > BLOW_UP_NORM**2:
        raise BlowUpError(i * dt)


def _check_finite_tail(states, times):
    if not np.all(np.isfinite(states.view(float))):
        bad = np.where(~np.all(np.isfinite(states.view(float)).reshape(states.shape[0], -1), axis=1))[0]
        raise BlowUpError(times[bad[0]])
