"""
Uniformly sampled periodic functions of one variable.

A PeriodicProfile stores N samples of f on [0, T) together with the period T.
Spinor components of closed trajectories can pick up a constant factor
e^{i theta} over one period; such Bloch-periodic samples are stored with
bloch_phase = theta, and every derivative or resampling honours that factor.
Quadratic spinor densities (r**2, r*s, |r|**2, ...) are always plain periodic.

Derivatives are spectral by default. The second-order central stencil
("central2") exists for convergence-order studies of residual checks.
"""

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DomainError, GridTooSmallError

DerivativeMethod = Literal["spectral", "central2"]

MIN_SAMPLES = 16
TWO_PI = 2.0 * np.pi


def mode_numbers(n: int) -> np.ndarray:
    """Integer Fourier mode numbers in numpy FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n)


def dealias_mask(n: int) -> np.ndarray:
    """Boolean mask keeping the lower two thirds of the resolved modes."""
    return np.abs(mode_numbers(n)) <= n / 3.0


def bloch_factor(phase: float) -> complex | float:
    """e^{i phase}, returned as an exact real number for phase 0 and +-pi."""
    if phase == 0.0:
        return 1.0
    if abs(abs(phase) - np.pi) < 1e-14:
        return -1.0
    return complex(np.exp(1j * phase))


def _keeps_real(samples: np.ndarray, phase: float) -> bool:
    return np.isrealobj(samples) and isinstance(bloch_factor(phase), float)


def spectral_derivative(
    samples: np.ndarray,
    period: float,
    order: int = 1,
    bloch_phase: float = 0.0,
    dealias: bool = False,
) -> np.ndarray:
    """Spectral derivative of uniformly sampled (Bloch-)periodic data."""
    n = samples.size
    modes = mode_numbers(n)
    if bloch_phase == 0.0:
        wavenumbers = TWO_PI / period * modes
        symbol = (1j * wavenumbers) ** order
        if order % 2 == 1:
            symbol[n // 2] = 0.0
        if dealias:
            symbol[~dealias_mask(n)] = 0.0
        result = np.fft.ifft(np.fft.fft(samples) * symbol)
    else:
        x = np.arange(n) * (period / n)
        shift = bloch_phase / period
        carrier = np.exp(1j * shift * x)
        wavenumbers = TWO_PI / period * modes + shift
        symbol = (1j * wavenumbers) ** order
        if dealias:
            symbol[~dealias_mask(n)] = 0.0
        result = np.fft.ifft(np.fft.fft(samples / carrier) * symbol) * carrier
    if _keeps_real(samples, bloch_phase):
        return result.real
    return result


def central_derivative(samples: np.ndarray, dx: float, order: int = 1, bloch_phase: float = 0.0) -> np.ndarray:
    """Second-order periodic central differences; orders above two are composed."""
    factor = bloch_factor(bloch_phase)

    def neighbours(f):
        dtype = np.result_type(f, factor)
        forward = np.roll(f, -1).astype(dtype)
        backward = np.roll(f, 1).astype(dtype)
        forward[-1] *= factor
        backward[0] /= factor
        return forward, backward

    result = samples
    remaining = order
    while remaining > 0:
        forward, backward = neighbours(result)
        if remaining >= 2:
            result = (forward - 2.0 * result + backward) / dx**2
            remaining -= 2
        else:
            result = (forward - backward) / (2.0 * dx)
            remaining -= 1
    return result


def _fourier_resize(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Zero-pad or truncate normalised Fourier coefficients to m modes."""
    n = coeffs.size
    out = np.zeros(m, dtype=complex)
    if m == n:
        out[:] = coeffs
    elif m > n:
        h = n // 2
        out[:h] = coeffs[:h]
        out[m - h + 1:] = coeffs[h + 1:]
        out[h] = 0.5 * coeffs[h]
        out[m - h] = 0.5 * coeffs[h]
    else:
        h = m // 2
        out[:h] = coeffs[:h]
        out[h + 1:] = coeffs[n - h + 1:]
        out[h] = coeffs[h] + coeffs[n - h]
    return out


@dataclass(frozen=True, eq=False)
class PeriodicProfile:
    """N uniform samples over [0, period) of a (Bloch-)periodic function."""

    samples: np.ndarray
    period: float = TWO_PI
    bloch_phase: float = 0.0

    def __post_init__(self):
        samples = np.array(self.samples, copy=True)
        if samples.ndim != 1:
            raise GridTooSmallError("profile samples must be one-dimensional")
        if samples.size < MIN_SAMPLES or samples.size % 2:
            raise GridTooSmallError(f"profile needs an even sample count >= {MIN_SAMPLES}, got {samples.size}")
        if not np.all(np.isfinite(samples)):
            raise DomainError("profile samples must be finite")
        if not self.period > 0.0:
            raise DomainError(f"period must be positive, got {self.period}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "bloch_phase", float(self.bloch_phase))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], n: int, period: float = TWO_PI) -> "PeriodicProfile":
        x = np.arange(n) * (period / n)
        return cls(func(x), period)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def dx(self) -> float:
        return self.period / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def is_real(self) -> bool:
        return np.isrealobj(self.samples)

    def with_samples(self, samples: np.ndarray, bloch_phase: float | None = None) -> "PeriodicProfile":
        """A profile on the same grid with new samples."""
        phase = self.bloch_phase if bloch_phase is None else bloch_phase
        return PeriodicProfile(samples, self.period, phase)

    def derivative(self, order: int = 1, method: DerivativeMethod = "spectral", dealias: bool = False) -> "PeriodicProfile":
        if order < 0:
            raise DomainError("derivative order must be non-negative")
        if order == 0:
            return self
        if method == "spectral":
            values = spectral_derivative(self.samples, self.period, order, self.bloch_phase, dealias)
        elif method == "central2":
            values = central_derivative(self.samples, self.dx, order, self.bloch_phase)
        else:
            raise DomainError(f"unknown derivative method {method!r}")
        return self.with_samples(values)

    def integral(self) -> float | complex:
        """Composite trapezoid rule over one period (pairwise summation)."""
        return np.sum(self.samples) * self.dx

    def mean(self) -> float | complex:
        return np.sum(self.samples) / self.n

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def resample(self, m: int) -> "PeriodicProfile":
        """Fourier interpolation onto m uniform points."""
        if m < MIN_SAMPLES or m % 2:
            raise GridTooSmallError(f"resample target must be even and >= {MIN_SAMPLES}, got {m}")
        shift = self.bloch_phase / self.period
        carrier = np.exp(1j * shift * self.x) if shift else 1.0
        coeffs = np.fft.fft(self.samples / carrier) / self.n
        values = np.fft.ifft(_fourier_resize(coeffs, m)) * m
        if shift:
            values = values * np.exp(1j * shift * np.arange(m) * (self.period / m))
        if _keeps_real(self.samples, self.bloch_phase):
            values = values.real
        return PeriodicProfile(values, self.period, self.bloch_phase)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Trigonometric interpolant evaluated at arbitrary points."""
        points = np.asarray(points, dtype=float)
        shift = self.bloch_phase / self.period
        carrier = np.exp(1j * shift * self.x) if shift else 1.0
        coeffs = np.fft.fft(self.samples / carrier) / self.n
        modes = mode_numbers(self.n)
        weights = np.ones(self.n)
        weights[self.n // 2] = 0.5
        nyquist = coeffs[self.n // 2]
        phases = np.exp(1j * TWO_PI / self.period * np.outer(points, modes))
        values = phases @ (coeffs * weights)
        values = values + 0.5 * nyquist * np.exp(1j * np.pi * self.n / self.period * points)
        if shift:
            values = values * np.exp(1j * shift * points)
        if _keeps_real(self.samples, self.bloch_phase):
            return values.real
        return values

    def shifted(self, offset: float) -> "PeriodicProfile":
        """Samples of x -> f(x + offset) by spectral translation."""
        n = self.n
        shift = self.bloch_phase / self.period
        carrier = np.exp(1j * shift * self.x) if shift else 1.0
        modes = mode_numbers(n)
        wavenumbers = TWO_PI / self.period * modes
        coeffs = np.fft.fft(self.samples / carrier)
        phase = np.exp(1j * wavenumbers * offset)
        phase[n // 2] = np.cos(wavenumbers[n // 2] * offset)
        values = np.fft.ifft(coeffs * phase)
        if shift:
            values = values * carrier * np.exp(1j * shift * offset)
        if _keeps_real(self.samples, self.bloch_phase):
            values = values.real
        return self.with_samples(values)

    def cross_correlation_shift(self, reference: "PeriodicProfile") -> float:
        """
        Offset s with self(x) ~ reference(x - s), in (-T/2, T/2].

        Circular cross-correlation peak refined by a three-point parabola.
        """
        if reference.n != self.n:
            raise DomainError("cross-correlation needs profiles on the same grid")
        corr = np.fft.ifft(np.conj(np.fft.fft(reference.samples)) * np.fft.fft(self.samples)).real
        peak = int(np.argmax(corr))
        left, centre, right = corr[peak - 1], corr[peak], corr[(peak + 1) % self.n]
        curvature = left - 2.0 * centre + right
        refinement = 0.5 * (left - right) / curvature if curvature != 0.0 else 0.0
        offset = (peak + refinement) * self.dx
        return float((offset + 0.5 * self.period) % self.period - 0.5 * self.period)

    def resolution_defect(self) -> float:
        """Largest Fourier magnitude in the top eighth of the spectrum, relative to the largest overall."""
        shift = self.bloch_phase / self.period
        carrier = np.exp(1j * shift * self.x) if shift else 1.0
        magnitudes = np.abs(np.fft.fft(self.samples / carrier))
        scale = magnitudes.max()
        if scale == 0.0:
            return 0.0
        tail = np.abs(mode_numbers(self.n)) >= 3 * self.n / 8
        return float(magnitudes[tail].max() / scale)
