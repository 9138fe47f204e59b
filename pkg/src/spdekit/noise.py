"""Truncated Q-Wiener increments and diagonal covariance arithmetic.

A covariance is diagonal in the Fourier basis: one eigenvalue per mode
k in {-K..K} with the real-field symmetry lambda(-k) = lambda(k).  White
noise is the lambda = 1 case, which only exists as an operator after
truncation to the 2K+1 retained modes; every quantity derived from it is
reported as truncated.

Sampling packs 2K+1 independent real Gaussian channels (one per mode: the
constant, and a cosine/sine pair for each k >= 1) into a Hermitian half
spectrum so that the increment field is real and

    Var <dW, e_k> = lambda_k * dt        for every mode k.

Draws are derived counter-style from a Philox generator keyed by
(seed, stream_id) with the block counter advancing along the path, so
distinct streams can be generated in any order and still reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import SpectralField, TorusGrid

__all__ = [
    "CovarianceSpec",
    "NoiseSampler",
    "NoiseIncrement",
    "trace",
    "hs_norm_sq",
    "sample_increment",
    "covariance_pairing",
    "pack_draws",
    "coarsen_increments",
]

_CHUNK = 256  # draw rows generated per Philox counter block


@dataclass(frozen=True)
class CovarianceSpec:
    """Diagonal covariance operator on the truncated Fourier basis.

    ``lam[k]`` is the eigenvalue of modes +-k for k = 0..K.  ``kind`` is
    "trace_class" for genuinely summable spectra and "white" for the
    truncated identity.
    """

    grid: TorusGrid
    kind: str
    lam: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in ("trace_class", "white"):
            raise ValueError(f"kind must be 'trace_class' or 'white', got {self.kind!r}")
        lam = np.asarray(self.lam, dtype=float)
        if lam.shape != (self.grid.n_modes + 1,):
            raise ValueError(
                f"need one eigenvalue per mode 0..K, got shape {lam.shape} for K={self.grid.n_modes}"
            )
        if np.any(lam < 0):
            raise ValueError("covariance eigenvalues must be nonnegative")
        lam = lam.copy()
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def white(cls, grid: TorusGrid) -> "CovarianceSpec":
        return cls(grid, "white", np.ones(grid.n_modes + 1))

    @classmethod
    def power(cls, grid: TorusGrid, gamma: float) -> "CovarianceSpec":
        """lambda_k = (1 + k^2)^(-gamma)."""
        k = np.arange(grid.n_modes + 1, dtype=float)
        return cls(grid, "trace_class", (1.0 + k**2) ** (-gamma))

    @classmethod
    def from_eigenvalues(cls, grid: TorusGrid, values) -> "CovarianceSpec":
        return cls(grid, "trace_class", np.asarray(values, dtype=float))

    @classmethod
    def mean_free_white(cls, grid: TorusGrid) -> "CovarianceSpec":
        """Truncated identity with the constant mode removed.

        The natural driver for mean-conserving equations (Burgers): the k=0
        momentum stays a pathwise invariant.  Trace class after truncation.
        """
        lam = np.ones(grid.n_modes + 1)
        lam[0] = 0.0
        return cls(grid, "trace_class", lam)

    @property
    def n_channels(self) -> int:
        return 2 * self.grid.n_modes + 1

    def channel_variances(self) -> np.ndarray:
        """Eigenvalue per real channel in draw order.

        Channel 0 is the constant mode; channels 2k-1 and 2k are the cosine
        and sine channels of mode k, both carrying lambda_k.
        """
        var = np.empty(self.n_channels)
        var[0] = self.lam[0]
        var[1::2] = self.lam[1:]
        var[2::2] = self.lam[1:]
        return var


def trace(spec: CovarianceSpec, truncated_ok: bool = False) -> float:
    """Tr Q = sum of eigenvalues over all 2K+1 modes.

    For white noise the untruncated trace diverges; pass ``truncated_ok``
    to receive the trace of the truncation instead of an error.
    """
    if spec.kind == "white" and not truncated_ok:
        raise ValueError(
            "white noise is not trace class; pass truncated_ok=True for the "
            "trace of the 2K+1-mode truncation"
        )
    return float(spec.lam[0] + 2.0 * np.sum(spec.lam[1:]))


def hs_norm_sq(spec: CovarianceSpec, truncated_ok: bool = False) -> float:
    """Squared Hilbert-Schmidt norm, sum of squared eigenvalues."""
    if spec.kind == "white" and not truncated_ok:
        raise ValueError(
            "white noise is not Hilbert-Schmidt; pass truncated_ok=True for "
            "the truncated value"
        )
    return float(spec.lam[0] ** 2 + 2.0 * np.sum(spec.lam[1:] ** 2))


def covariance_pairing(spec: CovarianceSpec, h: SpectralField, g: SpectralField) -> float:
    """<Qh, g> = sum_k lambda_k amp_h(k) conj(amp_g(k)), a real number."""
    if h.grid != spec.grid or g.grid != spec.grid:
        raise ValueError("fields and covariance must share one grid")
    ch, cg = h.coef, g.coef
    total = spec.lam[0] * ch[0].real * cg[0].real
    total += 2.0 * np.sum(spec.lam[1:] * (ch[1:] * np.conj(cg[1:])).real)
    return float(total)


def pack_draws(spec: CovarianceSpec, scaled: np.ndarray) -> np.ndarray:
    """Hermitian half spectrum from per-channel draws (already scaled).

    ``scaled[..., ch]`` are the real channel increments; the cosine/sine
    pair of mode k >= 1 lands in amp(k) = sqrt(lam_k/2) * (cos - i sin)
    relative to unit-variance channels, i.e. each channel contributes
    variance lam_k*dt/2 to the complex amplitude.
    """
    root = np.sqrt(spec.lam)
    coef = np.empty(scaled.shape[:-1] + (spec.grid.n_modes + 1,), dtype=np.complex128)
    coef[..., 0] = root[0] * scaled[..., 0]
    half = root[1:] / np.sqrt(2.0)
    coef[..., 1:] = half * (scaled[..., 1::2] - 1j * scaled[..., 2::2])
    return coef


@dataclass(frozen=True)
class NoiseIncrement:
    """One realized increment dW over a step of length dt.

    ``per_mode`` keeps the underlying real Gaussian draws (N(0, dt) per
    channel) so scheme-level identities can reuse the exact randomness;
    ``field`` is the packed real field they generate under the covariance.
    """

    dt: float
    field: SpectralField
    per_mode: np.ndarray

    def scalar_increments(self, count: int) -> np.ndarray:
        """First ``count`` channels as independent scalar Brownian increments."""
        if count > self.per_mode.shape[-1]:
            raise ValueError(
                f"{count} scalar channels requested, only {self.per_mode.shape[-1]} drawn"
            )
        return self.per_mode[:count]


class NoiseSampler:
    """Reproducible increment stream for one (seed, stream_id) pair.

    Single-owner and stateful: ``sample_increment`` walks forward through
    the stream.  The draw for (stream, step, channel) is a pure function of
    (seed, stream_id, step, channel), so paths can be generated per stream
    in any order.
    """

    def __init__(self, spec: CovarianceSpec, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative integers")
        self.spec = spec
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._step = 0
        self._chunk = -1
        self._block: np.ndarray | None = None

    def _load_chunk(self, chunk: int) -> np.ndarray:
        if chunk != self._chunk:
            bitgen = np.random.Philox(
                key=np.array([self.seed, self.stream_id], dtype=np.uint64),
                counter=np.array([0, 0, 0, chunk], dtype=np.uint64),
            )
            gen = np.random.Generator(bitgen)
            self._block = gen.standard_normal((_CHUNK, self.spec.n_channels))
            self._chunk = chunk
        return self._block

    def standard_draws(self, step: int) -> np.ndarray:
        """Unit-variance draws for one step, shape (2K+1,)."""
        block = self._load_chunk(step // _CHUNK)
        return block[step % _CHUNK].copy()

    def next_standard_draws(self) -> np.ndarray:
        """Unit-variance draws at the current position, advancing the stream."""
        z = self.standard_draws(self._step)
        self._step += 1
        return z

    def draws_block(self, step0: int, n_steps: int) -> np.ndarray:
        """Unit-variance draws for steps step0..step0+n_steps-1."""
        out = np.empty((n_steps, self.spec.n_channels))
        i = 0
        while i < n_steps:
            step = step0 + i
            block = self._load_chunk(step // _CHUNK)
            lo = step % _CHUNK
            take = min(_CHUNK - lo, n_steps - i)
            out[i : i + take] = block[lo : lo + take]
            i += take
        return out

    def scaled_block(self, step0: int, n_steps: int, dt: float) -> np.ndarray:
        """Brownian channel increments N(0, dt), shape (n_steps, 2K+1)."""
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        return self.draws_block(step0, n_steps) * np.sqrt(dt)

    def sample_increment(self, dt: float) -> NoiseIncrement:
        """Next increment in the stream (advances the sampler)."""
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        scaled = self.next_standard_draws() * np.sqrt(dt)
        return increment_from_scaled(self.spec, scaled, dt)

    def reset(self) -> None:
        self._step = 0


def increment_from_scaled(
    spec: CovarianceSpec, scaled: np.ndarray, dt: float
) -> NoiseIncrement:
    """Wrap pre-scaled channel draws (N(0, dt)) as a NoiseIncrement."""
    fld = SpectralField(spec.grid, pack_draws(spec, scaled))
    return NoiseIncrement(dt=dt, field=fld, per_mode=scaled)


def sample_increment(sampler: NoiseSampler, dt: float) -> NoiseIncrement:
    return sampler.sample_increment(dt)


def coarsen_increments(scaled: np.ndarray, factor: int) -> np.ndarray:
    """Sum consecutive fine increments into coarse ones (Brownian-consistent)."""
    n = scaled.shape[0]
    if n % factor != 0:
        raise ValueError(f"{n} fine steps do not group into blocks of {factor}")
    return scaled.reshape(n // factor, factor, *scaled.shape[1:]).sum(axis=1)
