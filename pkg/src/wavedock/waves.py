"""JONSWAP sea-surface model and random-phase wave synthesis.

The docking platform heaves with the sea surface. Each training episode
draws a fresh surface elevation record: the spectral energy density is
sampled on a frequency grid, converted to component amplitudes, and summed
as cosines with uniformly random phases. Velocity comes from the analytic
time derivative of the same sum, so displacement and velocity are always
mutually consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class JonswapParams:
    """Parameters of the spectral energy density.

    alpha_w    Phillips constant, 0.0081 for deep water.
    k_w        dimensionless scale constant in the density denominator
               (fourth power); larger values mean a calmer sea.
    f_p        peak frequency [Hz].
    gamma_w    peak-enhancement shape parameter, >= 1.
    sigma_low  spectral width below the peak.
    sigma_high spectral width above the peak.
    g          gravitational acceleration [m/s^2].
    """

    alpha_w: float = 0.0081
    k_w: float = 0.016
    f_p: float = 0.1
    gamma_w: float = 3.3
    sigma_low: float = 0.07
    sigma_high: float = 0.09
    g: float = 9.81

    def __post_init__(self):
        for name in ("alpha_w", "k_w", "f_p", "sigma_low", "sigma_high", "g"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"JonswapParams.{name} must be strictly positive")
        if self.gamma_w < 1.0:
            raise ValueError("JonswapParams.gamma_w must be >= 1")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency sampling [f_min, f_max] with n_bins points."""

    f_min: float = 0.02
    f_max: float = 1.0
    n_bins: int = 256

    def __post_init__(self):
        if not 0.0 < self.f_min < self.f_max:
            raise ValueError("FrequencyGrid requires 0 < f_min < f_max")
        if self.n_bins < 2:
            raise ValueError("FrequencyGrid.n_bins must be >= 2")

    @property
    def df(self) -> float:
        return (self.f_max - self.f_min) / (self.n_bins - 1)

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.n_bins)


@dataclass
class WaveRealization:
    """One episode's platform motion sampled at a fixed time step.

    z_w and zdot_w have equal length; zdot_w is the exact analytic
    derivative of the synthesis sum at the same instants. `phases` keeps
    the random phase vector that produced the record.
    """

    dt: float
    z_w: np.ndarray
    zdot_w: np.ndarray
    phases: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.z_w = np.asarray(self.z_w, dtype=float)
        self.zdot_w = np.asarray(self.zdot_w, dtype=float)
        if self.z_w.shape != self.zdot_w.shape or self.z_w.size < 1:
            raise ValueError("z_w and zdot_w must have equal length >= 1")

    def __len__(self) -> int:
        return self.z_w.size

    @classmethod
    def flat(cls, n_samples: int, dt: float) -> "WaveRealization":
        """Motionless platform; used for calm-sea tests and evaluation."""
        zeros = np.zeros(n_samples)
        return cls(dt=dt, z_w=zeros, zdot_w=zeros.copy())


def spectral_density(params: JonswapParams, f: float) -> float:
    """Spectral energy density S(f) in m^2 s at wave frequency f.

    Positive-frequency model: a Phillips-type f^-5 tail times a peak
    enhancement of gamma_w raised to a Gaussian bump centred at f_p. The
    width parameter switches from sigma_low to sigma_high above the peak.

    Raises ValueError for non-positive f.
    """
    f = float(f)
    if f <= 0.0:
        raise ValueError(f"wave frequency must be positive, got {f}")
    sigma = params.sigma_low if f <= params.f_p else params.sigma_high
    peak_arg = -((f - params.f_p) ** 2) / (2.0 * sigma**2 * params.f_p**2)
    enhancement = params.gamma_w ** np.exp(peak_arg)
    base = (params.alpha_w * params.g**2 / params.k_w**4) * f**-5.0
    return float(base * np.exp(-1.25 * (params.f_p / f) ** 4) * enhancement)


def sample_spectrum(params: JonswapParams, grid: FrequencyGrid) -> np.ndarray:
    """Sample the density on the grid; returns an (n_bins, 2) array of (f, S)."""
    freqs = grid.frequencies
    sigma = np.where(freqs <= params.f_p, params.sigma_low, params.sigma_high)
    peak_arg = -((freqs - params.f_p) ** 2) / (2.0 * sigma**2 * params.f_p**2)
    dens = (
        (params.alpha_w * params.g**2 / params.k_w**4)
        * freqs**-5.0
        * np.exp(-1.25 * (params.f_p / freqs) ** 4)
        * params.gamma_w ** np.exp(peak_arg)
    )
    return np.column_stack([freqs, dens])


def _time_axis(duration: float, dt: float) -> np.ndarray:
    n = int(np.floor(duration / dt + 1e-9)) + 1
    return np.arange(n) * dt


def synthesize_from_spectrum(
    freqs: np.ndarray,
    densities: np.ndarray,
    df: float,
    duration: float,
    dt: float,
    rng_seed,
) -> WaveRealization:
    """Random-phase synthesis from pre-sampled spectral values.

    Component amplitude a_i = sqrt(2 S(f_i) df); phases drawn uniformly
    from [0, 2pi) with the given seed. Exposed separately so tests can
    synthesize from an arbitrary (e.g. identically zero) spectrum.
    """
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    if not 0.0 < dt < duration:
        raise ValueError("dt must satisfy 0 < dt < duration")
    f_max = float(np.max(freqs))
    if f_max >= 0.5 / dt:
        raise ValueError(
            f"Nyquist violated: f_max={f_max} Hz needs dt < {0.5 / f_max:.6g} s, got dt={dt}"
        )
    rng = np.random.default_rng(rng_seed)
    phases = rng.uniform(0.0, TWO_PI, size=len(freqs))

    amps = np.sqrt(2.0 * np.asarray(densities, dtype=float) * df)
    omega = TWO_PI * np.asarray(freqs, dtype=float)
    t = _time_axis(duration, dt)
    arg = np.outer(t, omega) + phases  # (n_t, n_f)
    z = np.cos(arg) @ amps
    zdot = -(np.sin(arg) @ (amps * omega))
    return WaveRealization(dt=dt, z_w=z, zdot_w=zdot, phases=phases)


def synthesize_wave(
    params: JonswapParams,
    grid: FrequencyGrid,
    duration: float,
    dt: float,
    rng_seed,
) -> WaveRealization:
    """Draw one platform-motion realization of the given duration.

    Same seed, same parameters -> bit-identical realization.
    """
    spec = sample_spectrum(params, grid)
    return synthesize_from_spectrum(spec[:, 0], spec[:, 1], grid.df, duration, dt, rng_seed)
