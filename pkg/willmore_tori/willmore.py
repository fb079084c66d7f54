"""
Willmore-specific computations for tori of revolution.

Clifford torus closed forms, stationary potentials of the quartic first integral

    p_x^2 = Q(p) = -4 p^4 + c2 p^2 + c1 p + c0,

the Euler-Lagrange and Schrodinger residual checks, the delta_0 obstruction for
sign-definite potentials, and the Willmore bound verdict for the alpha-family
(c2, c1, c0) = (1, 0, alpha).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .elliptic import EnergyFamilyParams, energy_integral
from .errors import (
    BranchError,
    DiracResidualError,
    DomainError,
    NoOscillationError,
    TurningPointDegenerateError,
    WillmoreToriError,
)
from .profile import DerivativeMethod, PeriodicProfile, mode_numbers
from .revolution import (
    GEOMETRIC_LAMBDA,
    MonodromyKind,
    SpinorTrajectory,
    build_revolution_mesh,
    integrate_spinor,
    monodromy,
    periodic_trajectory,
    willmore_energy,
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
CLIFFORD_ENERGY = 2.0 * math.pi**2
PROFILE_RTOL = 1e-12
PROFILE_ATOL = 1e-14
FIRST_INTEGRAL_TOL = 1e-10
MAX_HALF_PERIOD = 1e4
NEWTON_STEPS = 6
LSTSQ_RCOND = 1e-10
MAX_EXCLUDED_FRACTION = 0.2

Branch = Literal["upper", "lower"]


# --------------------------------------------------------------
# Clifford torus
# --------------------------------------------------------------


def _clifford_denominator(x):
    return SQRT2 - np.sin(x)


def clifford_potential(x):
    """p(x) = sin x / (2 sqrt2 (sqrt2 - sin x))."""
    return np.sin(x) / (2.0 * SQRT2 * _clifford_denominator(x))


def clifford_potential_derivative(x):
    return np.cos(x) / (2.0 * _clifford_denominator(x) ** 2)


def clifford_conformal_factor(x):
    """u(x) = 1 / (sqrt2 - sin x)."""
    return 1.0 / _clifford_denominator(x)


def clifford_spinor(x):
    """
    (r, s) with r^2 = (u - u_x)/2, s^2 = (u + u_x)/2 and the signs chosen continuous.

    Both components change sign over one period 2 pi.
    """
    scale = 2.0**0.25 / _clifford_denominator(x)
    return scale * np.sin(0.5 * x - math.pi / 8.0), -scale * np.sin(0.5 * x - 3.0 * math.pi / 8.0)


def clifford_fixture(N: int, tol: float = 1e-6) -> tuple[PeriodicProfile, PeriodicProfile, PeriodicProfile, PeriodicProfile]:
    """Closed-form (p, u, r, s) on N points of [0, 2 pi); r and s are antiperiodic."""
    p = PeriodicProfile.from_function(clifford_potential, N)
    u = PeriodicProfile.from_function(clifford_conformal_factor, N)
    r_samples, s_samples = clifford_spinor(p.x)
    r = PeriodicProfile(r_samples, bloch_phase=math.pi)
    s = PeriodicProfile(s_samples, bloch_phase=math.pi)

    v = 4.0 * p.samples
    lam = GEOMETRIC_LAMBDA
    residual = max(
        np.max(np.abs(r.derivative().samples - 0.5 * (lam * r.samples + v * s.samples))),
        np.max(np.abs(s.derivative().samples + 0.5 * (v * r.samples + lam * s.samples))),
    )
    if p.resolution_defect() > 1e-10:
        logger.warning("Clifford fixture with N=%d is under-resolved; spinor ODE residual %.2e", N, residual)
    elif residual > tol:
        raise DiracResidualError(f"Clifford spinor violates the spinor ODE: residual {residual:.2e}")
    return p, u, r, s


def clifford_trajectory(N: int) -> SpinorTrajectory:
    """The Clifford spinor integrated from its closed-form value at x = 0."""
    p, _, r, s = clifford_fixture(N)
    return integrate_spinor(p.with_samples(4.0 * p.samples), GEOMETRIC_LAMBDA, r.samples[0], s.samples[0])


def clifford_immersion(uu, vv) -> np.ndarray:
    """Stereographic Clifford torus (2 cos u, 2 sin u, 2 cos v) / (sqrt2 - sin v); trailing axis holds X1..X3."""
    uu, vv = np.broadcast_arrays(np.asarray(uu, dtype=float), np.asarray(vv, dtype=float))
    D = _clifford_denominator(vv)
    return np.stack([2.0 * np.cos(uu) / D, 2.0 * np.sin(uu) / D, 2.0 * np.cos(vv) / D], axis=-1)


def clifford_curvatures(vv, h: float = 1e-3, uu: float = 0.0) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Fundamental forms of the Clifford immersion by central differences with step h.

    Returns (max deviation of the first form from 4/D^2 (du^2 + dv^2), H, K) at the points (uu, vv).
    """
    vv = np.atleast_1d(np.asarray(vv, dtype=float))
    X = lambda du, dv: clifford_immersion(uu + du, vv + dv)
    Xu = (X(h, 0) - X(-h, 0)) / (2 * h)
    Xv = (X(0, h) - X(0, -h)) / (2 * h)
    Xuu = (X(h, 0) - 2 * X(0, 0) + X(-h, 0)) / h**2
    Xvv = (X(0, h) - 2 * X(0, 0) + X(0, -h)) / h**2
    Xuv = (X(h, h) - X(h, -h) - X(-h, h) + X(-h, -h)) / (4 * h**2)
    E, F, G = (np.sum(a * b, axis=-1) for a, b in ((Xu, Xu), (Xu, Xv), (Xv, Xv)))
    normal = np.cross(Xu, Xv)
    normal /= np.linalg.norm(normal, axis=-1, keepdims=True)
    L, M, N = (np.sum(a * normal, axis=-1) for a in (Xuu, Xuv, Xvv))
    conformal = 4.0 / _clifford_denominator(vv) ** 2
    first_form_defect = float(np.max(np.abs(np.stack([E - conformal, F, G - conformal]))))
    det = E * G - F * F
    H = (E * N - 2.0 * F * M + G * L) / (2.0 * det)
    K = (L * N - M * M) / det
    return first_form_defect, H, K


# --------------------------------------------------------------
# Stationary potentials
# --------------------------------------------------------------


class QuarticCoeffs(BaseModel):
    """Coefficients of Q(p) = -4 p^4 + c2 p^2 + c1 p + c0."""

    model_config = ConfigDict(frozen=True)

    c0: float
    c1: float
    c2: float

    @classmethod
    def alpha_family(cls, alpha: float) -> "QuarticCoeffs":
        return cls(c0=alpha, c1=0.0, c2=1.0)

    @classmethod
    def clifford(cls) -> "QuarticCoeffs":
        return cls(c0=1.0 / 16.0, c1=1.0 / SQRT2, c2=2.0)

    @property
    def is_alpha_family(self) -> bool:
        return self.c2 == 1.0 and self.c1 == 0.0

    def polynomial(self) -> np.ndarray:
        return np.array([-4.0, 0.0, self.c2, self.c1, self.c0])

    def __call__(self, p):
        return -4.0 * p**4 + self.c2 * p**2 + self.c1 * p + self.c0

    def derivative(self, p):
        return -16.0 * p**3 + 2.0 * self.c2 * p + self.c1

    def real_roots(self, tol: float = 1e-7) -> np.ndarray:
        """Sorted real roots with nearly equal ones merged and the rest polished by Newton steps."""
        roots = np.roots(self.polynomial())
        real = np.sort(roots[np.abs(roots.imag) <= tol * np.maximum(1.0, np.abs(roots))].real)
        merged: list[float] = []
        for root in real:
            if merged and abs(root - merged[-1]) <= 10 * tol * max(1.0, abs(root)):
                merged[-1] = 0.5 * (merged[-1] + root)
            else:
                merged.append(float(root))
        return np.array([self._polish(root) for root in merged])

    def _polish(self, root: float, steps: int = 3) -> float:
        for _ in range(steps):
            slope = self.derivative(root)
            if slope == 0.0:
                break
            root -= self(root) / slope
        return root

    def oscillation_intervals(self) -> list[tuple[float, float]]:
        """Bounded intervals between consecutive real roots on which Q > 0."""
        roots = self.real_roots()
        return [(a, b) for a, b in zip(roots[:-1], roots[1:]) if self(0.5 * (a + b)) > 0.0]


class ProfileBranch(str, Enum):
    SIGN_DEFINITE = "SignDefinite"
    SIGN_CHANGING = "SignChanging"


@dataclass(frozen=True, eq=False)
class StationaryProfile:
    """One period of a solution of p_xx = c2 p + c1/2 - 8 p^3, sampled from its maximum."""

    p: PeriodicProfile
    coeffs: QuarticCoeffs
    branch: ProfileBranch
    p_min: float
    p_max: float
    first_integral_drift: float
    a_const: float | None = None

    @property
    def period(self) -> float:
        return self.p.period

    @property
    def v(self) -> PeriodicProfile:
        return self.p.with_samples(4.0 * self.p.samples)


def _collocation_polish(p: PeriodicProfile, coeffs: QuarticCoeffs) -> PeriodicProfile:
    """
    Newton iterations on the collocated p_xx + 8 p^3 - c2 p - c1/2 = 0 at fixed period.

    The Jacobian is singular along the translation mode p_x. Least squares with a
    relative cutoff takes the minimum-norm update, which leaves the phase alone.
    """
    wavenumbers = 2.0 * np.pi / p.period * mode_numbers(p.n)
    second = np.real(np.fft.ifft(-(wavenumbers**2)[:, None] * np.fft.fft(np.eye(p.n), axis=0), axis=0))

    def residual(samples):
        return second @ samples + 8.0 * samples**3 - coeffs.c2 * samples - 0.5 * coeffs.c1

    samples = p.samples
    current = residual(samples)
    start = float(np.max(np.abs(current)))
    for _ in range(NEWTON_STEPS):
        jacobian = second + np.diag(24.0 * samples**2 - coeffs.c2)
        candidate = samples + np.linalg.lstsq(jacobian, -current, rcond=LSTSQ_RCOND)[0]
        updated = residual(candidate)
        if np.max(np.abs(updated)) >= 0.5 * np.max(np.abs(current)):
            break
        samples, current = candidate, updated
    logger.debug("collocation residual %.2e -> %.2e", start, float(np.max(np.abs(current))))
    return p.with_samples(samples)


def stationary_profile(coeffs: QuarticCoeffs, N: int, branch: Branch = "upper") -> StationaryProfile:
    """
    Integrate the second-order stationary equation from the top turning point of a bump of Q.

    The samples over one period are then polished by Newton iterations on the
    spectrally collocated equation. With two bumps (sign-definite alpha < 0 potentials) `branch` picks the upper or the lower one.
    """
    intervals = coeffs.oscillation_intervals()
    if not intervals:
        raise NoOscillationError(f"Q has no positive bump for {coeffs!r}")
    if branch == "upper":
        p_min, p_max = intervals[-1]
    elif branch == "lower":
        p_min, p_max = intervals[0]
    else:
        raise BranchError(f"unknown branch {branch!r}")
    scale = max(1.0, abs(coeffs.c2), abs(coeffs.c1), abs(coeffs.c0))
    for turning_point in (p_min, p_max):
        if abs(coeffs.derivative(turning_point)) < 1e-8 * scale:
            raise TurningPointDegenerateError(f"Q has a double root at p = {turning_point:.12g}")

    def rhs(t, y):
        return [y[1], coeffs.c2 * y[0] + 0.5 * coeffs.c1 - 8.0 * y[0] ** 3]

    def slope(t, y):
        return y[1]

    slope.direction = 1.0
    slope.terminal = True
    first = solve_ivp(rhs, (0.0, MAX_HALF_PERIOD), [p_max, 0.0], method="DOP853", rtol=PROFILE_RTOL, atol=PROFILE_ATOL, events=slope)
    if first.t_events[0].size == 0:
        raise NoOscillationError(f"no return to a turning point within x = {MAX_HALF_PERIOD:g}")
    half = float(first.t_events[0][0])

    full = solve_ivp(rhs, (0.0, 2.5 * half), [p_max, 0.0], method="DOP853", rtol=PROFILE_RTOL, atol=PROFILE_ATOL, dense_output=True)
    period = brentq(lambda t: full.sol(t)[1], 1.5 * half, 2.5 * half, xtol=1e-13)
    return_gap = abs(full.sol(period)[0] - p_max)
    if return_gap > 1e-9:
        logger.warning("stationary profile returns to p = %.12f instead of %.12f", full.sol(period)[0], p_max)

    x = np.arange(N) * (period / N)
    p_samples, px_samples = full.sol(x)
    drift = float(np.max(np.abs(px_samples**2 - coeffs(p_samples))))
    if drift > FIRST_INTEGRAL_TOL:
        logger.warning("first integral drift %.2e exceeds %.0e", drift, FIRST_INTEGRAL_TOL)
    kind = ProfileBranch.SIGN_DEFINITE if p_min * p_max > 0.0 else ProfileBranch.SIGN_CHANGING
    logger.debug("stationary profile %r: [%.9f, %.9f], period %.12f, %s", coeffs, p_min, p_max, period, kind.value)
    return StationaryProfile(
        p=_collocation_polish(PeriodicProfile(p_samples, period), coeffs),
        coeffs=coeffs,
        branch=kind,
        p_min=float(p_min),
        p_max=float(p_max),
        first_integral_drift=drift,
        a_const=0.0 if coeffs.is_alpha_family else None,
    )


def stationary_residual(profile: StationaryProfile) -> tuple[float, float, float]:
    """Residuals of p_xxx + 24 p^2 p_x - c2 p_x, of p_xx + 8p^3 - c2 p - c1/2 and of p_x^2 - Q(p)."""
    c = profile.coeffs
    p = profile.p.samples
    p_x, p_xx, p_xxx = (profile.p.derivative(order).samples for order in (1, 2, 3))
    flow = np.max(np.abs(p_xxx + 24.0 * p**2 * p_x - c.c2 * p_x))
    second_order = np.max(np.abs(p_xx + 8.0 * p**3 - c.c2 * p - 0.5 * c.c1))
    first_integral = np.max(np.abs(p_x**2 - c(p)))
    return float(flow), float(second_order), float(first_integral)


# --------------------------------------------------------------
# Euler-Lagrange and Schrodinger checks
# --------------------------------------------------------------


def _derivatives(profile: PeriodicProfile, method: DerivativeMethod, dealias: bool = False) -> tuple[np.ndarray, ...]:
    return tuple(profile.derivative(order, method, dealias).samples for order in (1, 2, 3))


def euler_lagrange_residual(
    p: PeriodicProfile, u: PeriodicProfile, method: DerivativeMethod = "spectral"
) -> tuple[float, float, float, float]:
    """
    Returns (res_el, a_const, a_var, res_flow) where

        res_el   = max |p_xx u + p u_xx - 2 p_x u_x + 8 u p^3| / max term,
        a(x)     = (8 p^3 + p_xx - p) / u with mean a_const and max deviation a_var,
        res_flow = max |(8p^3 + p_xx - p) u_x + (p_x - 24 p^2 p_x - p_xxx) u| / max term.

    Each residual is divided by the largest absolute value among its terms. Spectral
    derivatives drop the upper third of the modes, which carries only rounding
    noise for a resolved profile.
    """
    if np.min(u.samples) <= 0.0:
        raise DomainError("the conformal factor must be positive")
    dealias = method == "spectral"
    p_x, p_xx, p_xxx = _derivatives(p, method, dealias)
    u_x, u_xx, _ = _derivatives(u, method, dealias)
    pv, uv = p.samples, u.samples
    res_el = _relative_residual(p_xx * uv, pv * u_xx, -2.0 * p_x * u_x, 8.0 * uv * pv**3)
    numerator = 8.0 * pv**3 + p_xx - pv
    a = numerator / uv
    a_const = float(np.mean(a))
    a_var = float(np.max(np.abs(a - a_const)))
    res_flow = _relative_residual(numerator * u_x, p_x * uv, -24.0 * pv**2 * p_x * uv, -p_xxx * uv)
    return res_el, a_const, a_var, res_flow


def _relative_residual(*terms: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(term))) for term in terms)
    return float(np.max(np.abs(sum(terms)))) / (scale if scale > 0.0 else 1.0)


def schrodinger_residual(
    p: PeriodicProfile,
    u: PeriodicProfile,
    p_floor: float = 0.05,
    method: DerivativeMethod = "spectral",
) -> tuple[float, float]:
    """
    max |xi_xx / 4 + V xi| with xi = u/p = 1/H and V = (log p)_xx / 2 + 2 p^2, over nodes with |p| > p_floor.

    xi_xx is assembled from derivatives of u and p so that the zeros of p stay out of the spectral derivatives.
    Returns (residual, excluded fraction).
    """
    pv, uv = p.samples, u.samples
    keep = np.abs(pv) > p_floor
    excluded = 1.0 - np.count_nonzero(keep) / pv.size
    logger.debug("schrodinger residual excludes %.1f%% of nodes (p_floor %g)", 100 * excluded, p_floor)
    if excluded > MAX_EXCLUDED_FRACTION:
        raise DomainError(f"{100 * excluded:.1f}% of nodes have |p| <= {p_floor}; at most {100 * MAX_EXCLUDED_FRACTION:.0f}% allowed")
    p_x, p_xx, _ = (d[keep] for d in _derivatives(p, method))
    u_x, u_xx, _ = (d[keep] for d in _derivatives(u, method))
    pk, uk = pv[keep], uv[keep]
    xi = uk / pk
    xi_xx = u_xx / pk - 2.0 * u_x * p_x / pk**2 - uk * p_xx / pk**2 + 2.0 * uk * p_x**2 / pk**3
    potential = 0.5 * (p_xx / pk - p_x**2 / pk**2) + 2.0 * pk**2
    return float(np.max(np.abs(0.25 * xi_xx + potential * xi))), float(excluded)


def potential_energy_check(p: PeriodicProfile) -> tuple[float, float]:
    """(4 int p^2, 2 int V) for a sign-definite potential."""
    if np.min(p.samples) * np.max(p.samples) <= 0.0:
        raise BranchError("V involves log p and needs a sign-definite potential")
    p_x, p_xx = (p.derivative(order).samples for order in (1, 2))
    pv = p.samples
    potential = 0.5 * (p_xx / pv - p_x**2 / pv**2) + 2.0 * pv**2
    return 4.0 * float(np.sum(pv**2)) * p.dx, 2.0 * float(np.sum(potential)) * p.dx


# --------------------------------------------------------------
# delta_0 obstruction
# --------------------------------------------------------------


class Delta0Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    direct: float
    parts: float
    closed: float
    periods: int

    @property
    def agreement(self) -> float:
        """Largest pairwise relative difference of the three evaluations."""
        values = (self.direct, self.parts, self.closed)
        scale = max(abs(v) for v in values)
        if scale == 0.0:
            return 0.0
        return max(abs(a - b) for a in values for b in values) / scale


def periodic_conformal_factor(profile: StationaryProfile) -> tuple[PeriodicProfile, SpinorTrajectory]:
    """u = |r|^2 + |s|^2 of a periodic spinor trajectory of v = 4p, over its closing length."""
    traj = periodic_trajectory(profile.v)
    return traj.density(traj.u), traj


def delta0(profile: StationaryProfile, u: PeriodicProfile) -> Delta0Report:
    """
    int (u - u_xx)/p dx directly, after integrating by parts, and in the closed form

        int u ((1 - c2) p^2 - 3/2 c1 p - 2 c0) / p^3 dx,

    which is -2 alpha int u/p^3 dx for the alpha-family. u may span q periods of p.
    """
    if profile.branch is not ProfileBranch.SIGN_DEFINITE:
        raise BranchError("delta_0 needs a sign-definite potential; 1/p^3 is not integrable through zeros")
    q = int(round(u.period / profile.period))
    if q < 1 or u.n != q * profile.p.n or abs(u.period - q * profile.period) > 1e-9 * u.period:
        raise DomainError("u must be sampled on the potential grid over a whole number of periods")
    p = PeriodicProfile(np.tile(profile.p.samples, q), u.period)
    pv, uv = p.samples, u.samples
    p_x, p_xx = (p.derivative(order).samples for order in (1, 2))
    u_xx = u.derivative(2).samples
    c = profile.coeffs
    dx = u.dx
    direct = float(np.sum((uv - u_xx) / pv)) * dx
    parts = float(np.sum(uv * (1.0 / pv + p_xx / pv**2 - 2.0 * p_x**2 / pv**3))) * dx
    closed = float(np.sum(uv * ((1.0 - c.c2) * pv**2 - 1.5 * c.c1 * pv - 2.0 * c.c0) / pv**3)) * dx
    if c.is_alpha_family and c.c0 < 0.0 and profile.p_min > 0.0 and closed <= 0.0:
        raise WillmoreToriError(f"delta_0 closed form {closed!r} must be positive for alpha < 0 on the positive branch")
    return Delta0Report(direct=direct, parts=parts, closed=closed, periods=q)


# --------------------------------------------------------------
# Bound verdict and case split
# --------------------------------------------------------------


class BoundVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    ksq: float
    W_elliptic: float
    W_quadrature: float
    exceeds: bool

    @property
    def relative_gap(self) -> float:
        return abs(self.W_elliptic - self.W_quadrature) / self.W_elliptic

    def csv_row(self) -> list:
        return [self.alpha, self.beta, self.ksq, self.W_elliptic, self.W_quadrature, self.exceeds]


BOUND_CSV_HEADER = ["alpha", "beta", "ksq", "W_elliptic", "W_quadrature", "exceeds"]


def bound_verdict(alpha: float, N: int = 512) -> BoundVerdict:
    """W of the alpha-family torus as 16 pi I(beta) and as 8 pi int p^2 over the integrated period."""
    if alpha <= 0.0:
        raise DomainError(f"the bound verdict needs alpha > 0, got {alpha}")
    params = EnergyFamilyParams.from_alpha(alpha)
    w_elliptic = 16.0 * math.pi * energy_integral(params)
    profile = stationary_profile(QuarticCoeffs.alpha_family(alpha), N)
    w_quadrature = willmore_energy(profile.p)
    logger.debug("alpha=%g: W elliptic %.12f, quadrature %.12f", alpha, w_elliptic, w_quadrature)
    return BoundVerdict(
        alpha=alpha,
        beta=params.beta,
        ksq=params.k.ksq,
        W_elliptic=w_elliptic,
        W_quadrature=w_quadrature,
        exceeds=w_elliptic > CLIFFORD_ENERGY and w_quadrature > CLIFFORD_ENERGY,
    )


class CaseSplitReport(BaseModel):
    """Solutions of the a != 0 branch of the stationary Euler-Lagrange analysis."""

    model_config = ConfigDict(frozen=True)

    c2: float
    c1_roots: tuple[float, float]
    c0: float
    relation_residual: float
    clifford_coefficient_gap: float
    alternative_c2_residual: float
    alternative_c2: float = 0.0

    @property
    def matches_clifford(self) -> bool:
        return self.clifford_coefficient_gap <= 1e-12


def case_split_check() -> CaseSplitReport:
    """
    With d = c1 / (2 (c2 - 1)), the relations c1 = c2 d and c0 = c1 d / 4 together with
    c2 = 2, c0 = (4 c1^2 - 1)/16 leave c1^2 / 8 = (4 c1^2 - 1)/16.
    """

    def relations(c1, c2=2.0):
        d = c1 / (2.0 * (c2 - 1.0))
        return np.array([c1 - c2 * d, c1 * d / 4.0 - (4.0 * c1**2 - 1.0) / 16.0])

    c2 = 2.0
    c1_plus = brentq(lambda c1: relations(c1)[1], 0.0, 2.0, xtol=1e-15)
    c1_minus = brentq(lambda c1: relations(c1)[1], -2.0, 0.0, xtol=1e-15)
    c0 = (4.0 * c1_plus**2 - 1.0) / 16.0
    residual = max(np.max(np.abs(relations(c1_plus))), np.max(np.abs(relations(c1_minus))))
    clifford = QuarticCoeffs.clifford()
    gap = max(abs(c2 - clifford.c2), abs(c1_plus - clifford.c1), abs(c0 - clifford.c0))

    # with c2 = 0 the first relation forces c1 = 0
    alternative_residual = float(abs(relations(c1_plus, c2=0.0)[0]))
    logger.info("case split: c2=%g, c1=+-%.15f, c0=%.15f; c2=0 leaves residual %.3e", c2, c1_plus, c0, alternative_residual)
    return CaseSplitReport(
        c2=c2,
        c1_roots=(c1_plus, c1_minus),
        c0=c0,
        relation_residual=float(residual),
        clifford_coefficient_gap=float(gap),
        alternative_c2_residual=alternative_residual,
    )


def sign_flip_congruence(N: int = 512, ny: int = 32) -> float:
    """
    Max vertex distance between the Clifford mesh of p and the X3-mirror of the mesh of -p.

    (r, -s) solves the spinor ODE of -p, which flips the sign of X3 = -4 int r s and nothing else.
    """
    p, _, r, s = clifford_fixture(N)
    r0, s0 = float(r.samples[0]), float(s.samples[0])
    original = build_revolution_mesh(integrate_spinor(p.with_samples(4.0 * p.samples), GEOMETRIC_LAMBDA, r0, s0), ny)
    flipped = build_revolution_mesh(integrate_spinor(p.with_samples(-4.0 * p.samples), GEOMETRIC_LAMBDA, r0, -s0), ny)
    mirrored = flipped.vertices * np.array([1.0, 1.0, -1.0])
    return float(np.max(np.linalg.norm(original.vertices - mirrored, axis=-1)))


# --------------------------------------------------------------
# Stationary Lax invariant
# --------------------------------------------------------------


def lax_invariant(coeffs: QuarticCoeffs, lam: float = GEOMETRIC_LAMBDA) -> float:
    """Gamma(lam) = lam^2 (lam^2 - c2)^2 + 16 c0 lam^2 - 4 c1^2; negative means elliptic monodromy."""
    return lam**2 * (lam**2 - coeffs.c2) ** 2 + 16.0 * coeffs.c0 * lam**2 - 4.0 * coeffs.c1**2


def lax_invariant_profile(profile: StationaryProfile, lam: float = GEOMETRIC_LAMBDA) -> np.ndarray:
    """A^2 + B C of the stationary generator evaluated pointwise along the profile."""
    c = profile.coeffs
    v = profile.v.samples
    v_x = profile.v.derivative().samples
    A = lam * v**2 / 2.0 + lam**3 - c.c2 * lam
    B = lam * v_x + lam**2 * v + 2.0 * c.c1
    C = lam * v_x - lam**2 * v - 2.0 * c.c1
    return A * A + B * C


class SurveyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    branch: ProfileBranch
    lax_invariant: float
    monodromy: MonodromyKind
    trace: float
    W_elliptic: float | None
    W_quadrature: float


def alpha_family_survey(alphas, N: int = 256) -> list[SurveyRow]:
    """Branch, Lax invariant, monodromy class and W for each alpha in (-1/16, 0) or (0, inf)."""
    rows = []
    for alpha in alphas:
        coeffs = QuarticCoeffs.alpha_family(alpha)
        profile = stationary_profile(coeffs, N)
        mono = monodromy(profile.v, GEOMETRIC_LAMBDA)
        w_elliptic = 16.0 * math.pi * energy_integral(EnergyFamilyParams.from_alpha(alpha)) if alpha > 0.0 else None
        rows.append(
            SurveyRow(
                alpha=alpha,
                branch=profile.branch,
                lax_invariant=lax_invariant(coeffs),
                monodromy=mono.kind,
                trace=mono.trace,
                W_elliptic=w_elliptic,
                W_quadrature=willmore_energy(profile.p),
            )
        )
    return rows
