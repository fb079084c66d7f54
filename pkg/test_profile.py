"""
Tests for periodic profiles: spectral and central derivatives, Bloch phases, resampling and shifts.
Run with: pytest test_profile.py
"""

import math

import numpy as np
import pytest

from willmore_tori.errors import DomainError, GridTooSmallError
from willmore_tori.profile import PeriodicProfile, dealias_mask, spectral_derivative


def smooth(x):
    return np.exp(np.sin(x))


def smooth_prime(x):
    return np.cos(x) * np.exp(np.sin(x))


# --------------------------------------------------------------
# Construction
# --------------------------------------------------------------


def test_rejects_small_or_odd_grids():
    """Test that profiles need an even sample count of at least 16."""
    with pytest.raises(GridTooSmallError):
        PeriodicProfile(np.zeros(8))
    with pytest.raises(GridTooSmallError):
        PeriodicProfile(np.zeros(33))


def test_rejects_non_finite_samples():
    """Test that NaN samples are refused."""
    samples = np.zeros(32)
    samples[3] = np.nan
    with pytest.raises(DomainError):
        PeriodicProfile(samples)


def test_samples_are_read_only():
    """Test that a profile does not share or expose writable samples."""
    source = np.ones(16)
    profile = PeriodicProfile(source)
    source[0] = 5.0
    assert profile.samples[0] == 1.0
    with pytest.raises(ValueError):
        profile.samples[0] = 2.0


def test_grid_geometry():
    """Test that x, dx and n describe a uniform grid on [0, period)."""
    profile = PeriodicProfile(np.zeros(64), period=3.0)
    assert profile.n == 64
    assert profile.dx == pytest.approx(3.0 / 64)
    assert profile.x[-1] == pytest.approx(3.0 - 3.0 / 64)


# --------------------------------------------------------------
# Derivatives
# --------------------------------------------------------------


def test_spectral_derivative_is_exact_for_smooth_data():
    """Test that the spectral derivative of exp(sin x) is accurate to machine precision."""
    profile = PeriodicProfile.from_function(smooth, 64)
    assert np.max(np.abs(profile.derivative().samples - smooth_prime(profile.x))) < 1e-12


def test_spectral_derivative_on_other_periods():
    """Test that the period enters the wavenumbers."""
    period = 5.0
    profile = PeriodicProfile.from_function(lambda x: np.sin(2.0 * np.pi * x / period), 32, period)
    expected = -((2.0 * np.pi / period) ** 2) * profile.samples
    assert np.max(np.abs(profile.derivative(2).samples - expected)) < 1e-12


def test_central_derivative_is_second_order():
    """Test that halving dx divides the central2 error by about four."""
    errors = []
    for n in (64, 128):
        profile = PeriodicProfile.from_function(smooth, n)
        errors.append(np.max(np.abs(profile.derivative(method="central2").samples - smooth_prime(profile.x))))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)


def test_unknown_derivative_method():
    """Test that an unknown method name is refused."""
    with pytest.raises(DomainError):
        PeriodicProfile(np.zeros(16)).derivative(method="upwind")


def test_dealias_mask_keeps_two_thirds():
    """Test that the dealiasing mask drops the top third of the modes."""
    mask = dealias_mask(96)
    assert mask[0] and mask[32] and not mask[33] and not mask[48]


def test_odd_derivative_drops_nyquist_mode():
    """Test that the first derivative of the Nyquist mode is zero."""
    samples = (-1.0) ** np.arange(16)
    assert np.max(np.abs(spectral_derivative(samples, 2.0 * np.pi))) < 1e-14


# --------------------------------------------------------------
# Bloch-periodic samples
# --------------------------------------------------------------


def test_antiperiodic_derivative():
    """Test that sin(x/2) with Bloch phase pi differentiates to cos(x/2)/2."""
    x = np.arange(64) * (2.0 * np.pi / 64)
    profile = PeriodicProfile(np.sin(0.5 * x), bloch_phase=math.pi)
    derivative = profile.derivative()
    assert np.isrealobj(derivative.samples)
    assert np.max(np.abs(derivative.samples - 0.5 * np.cos(0.5 * x))) < 1e-12


def test_antiperiodic_central_derivative():
    """Test that the central stencil wraps antiperiodic samples with a sign flip."""
    x = np.arange(256) * (2.0 * np.pi / 256)
    profile = PeriodicProfile(np.cos(0.5 * x), bloch_phase=math.pi)
    derivative = profile.derivative(method="central2").samples
    assert np.max(np.abs(derivative + 0.5 * np.sin(0.5 * x))) < 1e-4


def test_general_bloch_phase_derivative():
    """Test that exp(i theta x / T) is an eigenfunction of the Bloch derivative."""
    theta, n = 0.7, 32
    x = np.arange(n) * (2.0 * np.pi / n)
    profile = PeriodicProfile(np.exp(1j * theta * x / (2.0 * np.pi)), bloch_phase=theta)
    expected = 1j * theta / (2.0 * np.pi) * profile.samples
    assert np.max(np.abs(profile.derivative().samples - expected)) < 1e-12


# --------------------------------------------------------------
# Resampling, evaluation and shifts
# --------------------------------------------------------------


def test_resample_preserves_band_limited_data():
    """Test that refining and coarsening a band-limited profile is exact."""
    profile = PeriodicProfile.from_function(lambda x: np.cos(3.0 * x) + 0.5 * np.sin(x), 32)
    fine = profile.resample(128)
    assert np.max(np.abs(fine.samples - (np.cos(3.0 * fine.x) + 0.5 * np.sin(fine.x)))) < 1e-13
    assert np.max(np.abs(fine.resample(32).samples - profile.samples)) < 1e-13


def test_resample_antiperiodic():
    """Test that resampling honours the Bloch phase."""
    x = np.arange(32) * (2.0 * np.pi / 32)
    profile = PeriodicProfile(np.sin(1.5 * x), bloch_phase=math.pi)
    fine = profile.resample(96)
    assert np.max(np.abs(fine.samples - np.sin(1.5 * fine.x))) < 1e-12


def test_evaluate_between_nodes():
    """Test that the trigonometric interpolant reproduces exp(sin x) off the grid."""
    profile = PeriodicProfile.from_function(smooth, 64)
    points = np.array([0.1, 1.234, 4.0, 6.2])
    assert np.max(np.abs(profile.evaluate(points) - smooth(points))) < 1e-12


def test_shift_and_cross_correlation():
    """Test that shifted(-c) is f(x - c) and that cross-correlation recovers c."""
    profile = PeriodicProfile.from_function(smooth, 128)
    moved = profile.shifted(-0.3)
    assert np.max(np.abs(moved.samples - smooth(profile.x - 0.3))) < 1e-12
    assert moved.cross_correlation_shift(profile) == pytest.approx(0.3, abs=2e-3)


def test_integral_and_mean():
    """Test that the trapezoid integral of 1 + cos x over a period is 2 pi."""
    profile = PeriodicProfile.from_function(lambda x: 1.0 + np.cos(x), 32)
    assert profile.integral() == pytest.approx(2.0 * np.pi, rel=1e-14)
    assert profile.mean() == pytest.approx(1.0, rel=1e-14)


def test_resolution_defect():
    """Test that smooth data is resolved and that a kink is flagged."""
    assert PeriodicProfile.from_function(smooth, 64).resolution_defect() < 1e-10
    assert PeriodicProfile.from_function(lambda x: np.abs(np.sin(x)), 64).resolution_defect() > 1e-6
