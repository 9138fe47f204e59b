"""Fourier representation of real fields on the unit torus [0, 1).

A field is stored as the half spectrum of its Fourier amplitudes: for a grid
with ``n_modes = K`` the array ``coef`` holds the complex amplitude of mode
``k`` for ``k = 0..K`` in the convention

    u(x) = sum_{|k| <= K} amp(k) * exp(2*pi*i*k*x),    amp(-k) = conj(amp(k)).

Reality of the field is therefore structural: the negative half is never
stored.  Differential operators act as mode-wise multipliers,

    d/dx      -> 2*pi*i*k
    Laplacian -> -(2*pi*k)**2
    exp(t*Laplacian) -> exp(-(2*pi*k)**2 * t)

and the Sobolev weight of mode k is ``1 + (2*pi*k)**2``, which makes
``|f|_{H^1}^2 = |f|_{L^2}^2 + |f'|_{L^2}^2`` an exact identity.

All operations are pure: fields are immutable values, safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "TorusGrid",
    "SpectralField",
    "SobolevIndex",
    "field_from_modes",
    "zero_field",
    "to_physical",
    "from_physical",
    "physical_samples",
    "field_from_samples",
    "laplacian",
    "derivative",
    "heat_semigroup",
    "sobolev_norm",
    "lp_norm",
    "h_inner",
    "dealias",
]


@dataclass(frozen=True)
class TorusGrid:
    """Mode truncation and quadrature size for fields on the torus.

    ``n_modes`` is the truncation K (modes k in {-K..K});  ``n_points`` is
    the number of equispaced quadrature points x_j = j/M and must satisfy
    M >= 2K+1 so band-limited fields are represented without aliasing.
    """

    n_modes: int
    n_points: int = 0  # 0 means "use the default 4K (>= 2K+1)"

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 0:
            raise ValueError(f"n_modes must be a nonnegative integer, got {self.n_modes}")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        if self.n_points == 0:
            object.__setattr__(self, "n_points", max(2 * self.n_modes + 1, 4 * self.n_modes))
        if int(self.n_points) != self.n_points:
            raise ValueError(f"n_points must be an integer, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))
        if self.n_points < 2 * self.n_modes + 1:
            raise ValueError(
                f"n_points={self.n_points} < 2*n_modes+1={2 * self.n_modes + 1}: "
                "band-limited fields would alias"
            )

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer mode numbers of the stored half spectrum, 0..K."""
        return np.arange(self.n_modes + 1)

    @cached_property
    def angular(self) -> np.ndarray:
        """2*pi*k for k = 0..K."""
        return TWO_PI * self.wavenumbers.astype(float)

    @cached_property
    def laplacian_eigs(self) -> np.ndarray:
        """mu_k = (2*pi*k)**2, the (negated) Laplacian eigenvalues."""
        return self.angular**2

    @cached_property
    def sobolev_weights(self) -> np.ndarray:
        """w_k = 1 + (2*pi*k)**2."""
        return 1.0 + self.laplacian_eigs

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n_points) / self.n_points


@dataclass(frozen=True)
class SpectralField:
    """A real-valued field on the torus as Hermitian-packed amplitudes.

    ``coef[k]`` is amp(k) for k = 0..grid.n_modes; the mirror amplitude is
    the conjugate, so the represented field is real by construction.  The
    k = 0 amplitude is kept exactly real.
    """

    grid: TorusGrid
    coef: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coef, dtype=np.complex128)
        if c.shape != (self.grid.n_modes + 1,):
            raise ValueError(
                f"coefficient array has shape {c.shape}, expected {(self.grid.n_modes + 1,)}"
            )
        c = c.copy()
        c[0] = c[0].real  # mode 0 of a real field carries no phase
        c.setflags(write=False)
        object.__setattr__(self, "coef", c)

    def amp(self, k: int) -> complex:
        """Amplitude of mode k for any k in {-K..K}."""
        if abs(k) > self.grid.n_modes:
            raise ValueError(f"mode {k} outside truncation |k| <= {self.grid.n_modes}")
        return complex(self.coef[k]) if k >= 0 else complex(np.conj(self.coef[-k]))

    def with_coef(self, coef: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coef)

    # Fields form a vector space; the dunders keep model code readable.
    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coef + other.coef)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coef - other.coef)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coef * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coef)

    @property
    def mean(self) -> float:
        """Spatial mean, i.e. the k = 0 amplitude."""
        return float(self.coef[0].real)

    def l2_norm_sq(self) -> float:
        c = self.coef
        return float(c[0].real ** 2 + 2.0 * np.sum(np.abs(c[1:]) ** 2))


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity/integrability index (alpha, p) of a Bessel-potential norm."""

    alpha: float
    p: float = 2.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"integrability exponent must satisfy p > 1, got {self.p}")


def _check_same_grid(f: SpectralField, g: SpectralField) -> None:
    if f.grid != g.grid:
        raise ValueError(f"grid mismatch: {f.grid} vs {g.grid}")


def zero_field(grid: TorusGrid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_modes + 1, dtype=np.complex128))


def field_from_modes(grid: TorusGrid, entries) -> SpectralField:
    """Build a field from (mode, amplitude) pairs.

    Modes may be given for either or both signs; a one-sided entry fills its
    mirror by conjugation, a two-sided pair must already be conjugate.
    Unspecified modes are zero.
    """
    if isinstance(entries, dict):
        entries = entries.items()
    coef = np.zeros(grid.n_modes + 1, dtype=np.complex128)
    seen: dict[int, complex] = {}
    for k, a in entries:
        k = int(k)
        a = complex(a)
        if abs(k) > grid.n_modes:
            raise ValueError(f"mode {k} outside truncation |k| <= {grid.n_modes}")
        if k in seen:
            raise ValueError(f"mode {k} specified twice")
        seen[k] = a
    for k, a in seen.items():
        if k == 0:
            if a.imag != 0.0:
                raise ValueError("mode 0 of a real field must have zero imaginary part")
            coef[0] = a
        elif k > 0:
            coef[k] = a
        else:
            if -k in seen:
                if not np.isclose(seen[-k], np.conj(a), rtol=0.0, atol=1e-14):
                    raise ValueError(
                        f"modes {k} and {-k} are not a conjugate pair: {a} vs {seen[-k]}"
                    )
            else:
                coef[-k] = np.conj(a)
    return SpectralField(grid, coef)


def _samples_to_coef(samples: np.ndarray, n_modes: int) -> np.ndarray:
    """DFT the real samples and keep modes 0..n_modes (spectral projection)."""
    m = samples.shape[-1]
    spec = np.fft.rfft(samples) / m
    return np.asarray(spec[..., : n_modes + 1], dtype=np.complex128)


def _coef_to_samples(coef: np.ndarray, n_points: int) -> np.ndarray:
    half = np.zeros(coef.shape[:-1] + (n_points // 2 + 1,), dtype=np.complex128)
    half[..., : coef.shape[-1]] = coef
    return np.fft.irfft(half * n_points, n=n_points)


def physical_samples(f: SpectralField, n_points: int | None = None) -> np.ndarray:
    """Evaluate the field at j/n (n >= 2K+1), default the grid's quadrature."""
    n = f.grid.n_points if n_points is None else int(n_points)
    if n < 2 * f.grid.n_modes + 1:
        raise ValueError(f"{n} sample points alias a K={f.grid.n_modes} field")
    return _coef_to_samples(f.coef, n)


def to_physical(f: SpectralField) -> np.ndarray:
    """Real samples at the grid's M quadrature points."""
    return physical_samples(f, f.grid.n_points)


def from_physical(grid: TorusGrid, samples) -> SpectralField:
    """Inverse of :func:`to_physical`; requires exactly M real samples."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n_points,):
        raise ValueError(
            f"expected {grid.n_points} samples for this grid, got {samples.shape}"
        )
    return SpectralField(grid, _samples_to_coef(samples, grid.n_modes))


def field_from_samples(grid: TorusGrid, samples) -> SpectralField:
    """Project samples on any equispaced grid (>= 2K+1 points) onto the band."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2 * grid.n_modes + 1:
        raise ValueError("need a 1-d sample array with at least 2K+1 points")
    return SpectralField(grid, _samples_to_coef(samples, grid.n_modes))


def laplacian(f: SpectralField) -> SpectralField:
    return f.with_coef(f.coef * (-f.grid.laplacian_eigs))


def derivative(f: SpectralField) -> SpectralField:
    return f.with_coef(f.coef * (1j * f.grid.angular))


def heat_semigroup(f: SpectralField, t: float) -> SpectralField:
    """exp(t*Laplacian) f, exact mode-wise."""
    if t < 0:
        raise ValueError(f"heat semigroup needs t >= 0, got {t}")
    return f.with_coef(f.coef * np.exp(-f.grid.laplacian_eigs * t))


def sobolev_norm(f: SpectralField, idx: SobolevIndex | float) -> float:
    """H^alpha norm (sum_k w_k^alpha |amp(k)|^2)^(1/2), w_k = 1 + (2 pi k)^2."""
    if not isinstance(idx, SobolevIndex):
        idx = SobolevIndex(float(idx))
    if idx.p != 2.0:
        raise ValueError("sobolev_norm covers the Hilbert case p = 2 only; use lp_norm")
    w = f.grid.sobolev_weights**idx.alpha
    c = f.coef
    total = w[0] * c[0].real ** 2 + 2.0 * np.sum(w[1:] * np.abs(c[1:]) ** 2)
    return float(np.sqrt(total))


def lp_norm(f: SpectralField, p: float, quad_points: int | None = None) -> float:
    """L^p norm by rectangle-rule quadrature on ``quad_points`` samples.

    The rectangle rule is spectrally accurate for smooth periodic integrands;
    for p > 2 pass enough points to resolve |u|^p (p*K/2 rule of thumb).
    """
    if p < 1:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    u = physical_samples(f, quad_points)
    return float(np.mean(np.abs(u) ** p) ** (1.0 / p))


def h_inner(f: SpectralField, g: SpectralField, space: str = "l2") -> float:
    """Inner product in L^2, homogeneous H^1_0, or H^-1.

    The H^1_0 and H^-1 pairings require mean-zero fields; H^-1 carries the
    inverse-Laplacian weight 1/(2 pi k)^2 per mode.
    """
    _check_same_grid(f, g)
    cf, cg = f.coef, g.coef
    key = space.lower().replace("^", "").replace("_", "")
    if key == "l2":
        total = cf[0].real * cg[0].real + 2.0 * np.sum((cf[1:] * np.conj(cg[1:])).real)
        return float(total)
    if key == "h10":
        _require_mean_zero(f, g, space)
        mu = f.grid.laplacian_eigs[1:]
        return float(2.0 * np.sum(mu * (cf[1:] * np.conj(cg[1:])).real))
    if key in ("h-1", "hminus1"):
        _require_mean_zero(f, g, space)
        mu = f.grid.laplacian_eigs[1:]
        return float(2.0 * np.sum((cf[1:] * np.conj(cg[1:])).real / mu))
    raise ValueError(f"unknown space {space!r}; expected 'l2', 'h10' or 'h-1'")


def _require_mean_zero(f: SpectralField, g: SpectralField, space: str) -> None:
    if f.coef[0].real != 0.0 or g.coef[0].real != 0.0:
        raise ValueError(f"{space} pairing requires mean-zero fields")


def dealias(f: SpectralField, fraction: float) -> SpectralField:
    """Zero all modes with |k| > fraction * K (the 2/3 rule at fraction=2/3)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
    cutoff = fraction * f.grid.n_modes
    coef = f.coef.copy()
    coef[f.grid.wavenumbers > cutoff] = 0.0
    return f.with_coef(coef)
