"""
Complete elliptic integrals and the energy of the alpha-family of stationary potentials.

F(k) and E(k) are computed by the arithmetic-geometric mean. The bound function

    f(k) = (E(k) - (1 - k^2) F(k)) / sqrt(2 k^2 - 1),    1/sqrt(2) < k <= 1,

and the energy integral I = int_0^C sqrt(C - v) / sqrt(v (beta - 4 v)) dv of the
alpha-family satisfy I = f(k) / 2, so the Willmore energy of the family is
W = 16 pi I = 8 pi f(k).
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import quad
from scipy.optimize import bisect

from .errors import DivergenceError, DomainError

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
MAX_AGM_STEPS = 64
TWO_E_EQUALS_F_BRACKET = (0.75, 0.95)


class EllipticModulus(BaseModel):
    """Modulus k with k^2 and the complementary 1 - k^2 carried separately."""

    model_config = ConfigDict(frozen=True)

    k: float = Field(ge=0.0, le=1.0)
    ksq: float = Field(ge=0.0, le=1.0)
    kcsq: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_consistency(self):
        if abs(self.k * self.k - self.ksq) > 8 * EPS:
            raise ValueError(f"k^2 = {self.k * self.k!r} does not match ksq = {self.ksq!r}")
        if abs(self.ksq + self.kcsq - 1.0) > 8 * EPS:
            raise ValueError("ksq and kcsq must sum to one")
        return self

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        return cls(k=k, ksq=k * k, kcsq=(1.0 - k) * (1.0 + k))

    @classmethod
    def from_ksq(cls, ksq: float, kcsq: float | None = None) -> "EllipticModulus":
        if ksq < 0.0:
            raise DomainError(f"k^2 must be non-negative, got {ksq}")
        return cls(k=math.sqrt(ksq), ksq=ksq, kcsq=1.0 - ksq if kcsq is None else kcsq)


class EnergyFamilyParams(BaseModel):
    """alpha and the quantities it determines: beta = sqrt(1 + 16 alpha), C = (1 + beta)/8, k^2 = (1 + beta)/(2 beta)."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0.0)
    beta: float = Field(ge=1.0)
    C: float = Field(ge=0.25)
    k: EllipticModulus

    @model_validator(mode="after")
    def _check_relations(self):
        if abs(self.beta**2 - (1.0 + 16.0 * self.alpha)) > 16 * EPS * self.beta**2:
            raise ValueError("beta must equal sqrt(1 + 16 alpha)")
        if abs(self.C - (1.0 + self.beta) / 8.0) > 8 * EPS * self.C:
            raise ValueError("C must equal (1 + beta)/8")
        if abs(self.k.ksq - (1.0 + self.beta) / (2.0 * self.beta)) > 8 * EPS:
            raise ValueError("k^2 must equal (1 + beta)/(2 beta)")
        return self

    @classmethod
    def from_alpha(cls, alpha: float) -> "EnergyFamilyParams":
        if alpha < 0.0:
            raise DomainError(f"the energy family needs alpha >= 0, got {alpha}")
        beta = math.sqrt(1.0 + 16.0 * alpha)
        # beta - 1 without cancellation for small alpha
        beta_minus_one = 16.0 * alpha / (beta + 1.0)
        modulus = EllipticModulus.from_ksq((1.0 + beta) / (2.0 * beta), beta_minus_one / (2.0 * beta))
        return cls(alpha=alpha, beta=beta, C=(1.0 + beta) / 8.0, k=modulus)


def _agm(ksq: float, kcsq: float) -> tuple[float, float]:
    """Returns (F, E) for 0 <= k < 1."""
    a, b = 1.0, math.sqrt(kcsq)
    weight, tail = 0.5, 0.5 * ksq
    for step in range(MAX_AGM_STEPS):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        weight *= 2.0
        tail += weight * c * c
        if abs(c) <= EPS * a:
            break
    else:
        logger.warning("AGM did not converge in %d steps (k^2 = %r)", MAX_AGM_STEPS, ksq)
    F = math.pi / (2.0 * a)
    return F, F * (1.0 - tail)


def complete_elliptic(k: EllipticModulus) -> tuple[float, float]:
    """Complete elliptic integrals of the first and second kind, (F(k), E(k))."""
    if k.kcsq == 0.0:
        raise DivergenceError("F(k) diverges at k = 1")
    return _agm(k.ksq, k.kcsq)


def complete_elliptic_e(k: EllipticModulus) -> float:
    """E(k) alone, defined on the closed interval 0 <= k <= 1."""
    if k.kcsq == 0.0:
        return 1.0
    return _agm(k.ksq, k.kcsq)[1]


def _f_value(ksq: float, kcsq: float) -> float:
    if kcsq == 0.0:
        return 1.0
    F, E = _agm(ksq, kcsq)
    return (E - kcsq * F) / math.sqrt(ksq - kcsq)


def f_of_k(k: EllipticModulus) -> float:
    """f(k) = (E - (1 - k^2) F) / sqrt(2 k^2 - 1) on 1/sqrt(2) < k <= 1, with f(1) = 1."""
    if k.ksq <= 0.5:
        raise DomainError(f"f(k) needs k > 1/sqrt(2), got k^2 = {k.ksq}")
    return _f_value(k.ksq, k.kcsq)


def f_minimum(grid_size: int = 10_000) -> tuple[float, float]:
    """Minimum of f over a uniform k-grid on (1/sqrt(2), 1]; returns (min f, k^2 at the minimum)."""
    k_low = 1.0 / math.sqrt(2.0)
    best_f, best_ksq = math.inf, math.nan
    for j in range(1, grid_size + 1):
        k = k_low + (1.0 - k_low) * j / grid_size
        value = _f_value(k * k, (1.0 - k) * (1.0 + k))
        if value < best_f:
            best_f, best_ksq = value, k * k
    logger.debug("f minimum %.12f at k^2 = %.6f over %d points", best_f, best_ksq, grid_size)
    return best_f, best_ksq


def energy_integral(params: EnergyFamilyParams) -> float:
    """I = (sqrt(beta)/2)(E(k) - (1 - k^2) F(k)); the family's Willmore energy is 16 pi I."""
    if params.alpha <= 0.0:
        raise DomainError(f"energy_integral needs alpha > 0, got {params.alpha}")
    F, E = complete_elliptic(params.k)
    return 0.5 * math.sqrt(params.beta) * (E - params.k.kcsq * F)


def energy_integral_quadrature(params: EnergyFamilyParams) -> float:
    """
    Direct quadrature of int_0^C sqrt(C - v) / sqrt(v (beta - 4 v)) dv.

    With v = C sin^2(theta) both endpoint singularities disappear and the
    integrand becomes 2 C cos^2(theta) / sqrt(beta - 4 C sin^2(theta)).
    """
    if params.alpha <= 0.0:
        raise DomainError(f"energy_integral_quadrature needs alpha > 0, got {params.alpha}")
    C, beta = params.C, params.beta

    def integrand(theta):
        s = math.sin(theta)
        return 2.0 * C * math.cos(theta) ** 2 / math.sqrt(max(beta - 4.0 * C * s * s, 0.0))

    value, error = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    logger.debug("energy quadrature alpha=%g: I=%.15g (error estimate %.2e)", params.alpha, value, error)
    return value


def solve_two_E_equals_F(tol: float = 1e-10) -> EllipticModulus:
    """The unique k in (1/sqrt(2), 1) with 2 E(k) = F(k), bisected in k^2."""

    def gap(ksq):
        F, E = _agm(ksq, 1.0 - ksq)
        return 2.0 * E - F

    ksq = bisect(gap, *TWO_E_EQUALS_F_BRACKET, xtol=tol)
    return EllipticModulus.from_ksq(ksq)


def legendre_derivative_residuals(k: EllipticModulus, h: float) -> tuple[float, float]:
    """
    Central-difference residuals of

        E - (1 - k^2) F = k (1 - k^2) dF/dk,
        d/dk { k (1 - k^2) dF/dk } = k F.

    The outer derivative nests the inner stencil, so F is sampled at k, k +- h, k +- 2h.
    """
    kk = k.k
    if h <= 0.0 or kk - 2.0 * h <= 0.0 or kk + 2.0 * h >= 1.0:
        raise DomainError(f"difference stencil k +- 2h leaves (0, 1): k={kk}, h={h}")

    def F(x):
        return _agm(x * x, (1.0 - x) * (1.0 + x))[0]

    def dF(x):
        return (F(x + h) - F(x - h)) / (2.0 * h)

    def G(x):
        return x * (1.0 - x * x) * dF(x)

    F0, E0 = complete_elliptic(k)
    res1 = abs(E0 - k.kcsq * F0 - kk * k.kcsq * dF(kk))
    res2 = abs((G(kk + h) - G(kk - h)) / (2.0 * h) - kk * F0)
    return res1, res2
