"""
Tests for the Clifford torus fixtures, stationary potentials, Euler-Lagrange and Schrodinger checks,
the delta_0 obstruction, the Willmore bound verdict and the case split.
Run with: pytest test_willmore.py
"""

import math

import numpy as np
import pytest

from willmore_tori.errors import BranchError, DomainError, NoOscillationError, TurningPointDegenerateError
from willmore_tori.profile import PeriodicProfile
from willmore_tori.revolution import ClosureVerdict, MonodromyKind, torus_closure_test, willmore_energy
from willmore_tori.willmore import (
    CLIFFORD_ENERGY,
    ProfileBranch,
    QuarticCoeffs,
    alpha_family_survey,
    bound_verdict,
    case_split_check,
    clifford_curvatures,
    clifford_fixture,
    clifford_potential_derivative,
    delta0,
    euler_lagrange_residual,
    lax_invariant,
    lax_invariant_profile,
    periodic_conformal_factor,
    potential_energy_check,
    schrodinger_residual,
    sign_flip_congruence,
    stationary_profile,
    stationary_residual,
)

SQRT2 = math.sqrt(2.0)
ALPHA_NEGATIVE = -1.0 / 32.0


@pytest.fixture(scope="module")
def clifford():
    return clifford_fixture(256)


@pytest.fixture(scope="module")
def negative_alpha_profile():
    return stationary_profile(QuarticCoeffs.alpha_family(ALPHA_NEGATIVE), 256)


# --------------------------------------------------------------
# Clifford torus
# --------------------------------------------------------------


def test_clifford_energy(clifford):
    """Test that the Clifford potential has W = 2 pi^2."""
    p, _, _, _ = clifford
    assert willmore_energy(p) == pytest.approx(CLIFFORD_ENERGY, rel=1e-12)


def test_clifford_quartic_first_integral(clifford):
    """Test that p_x^2 = Q(p) with (c2, c1, c0) = (2, 1/sqrt2, 1/16)."""
    p, _, _, _ = clifford
    residual = clifford_potential_derivative(p.x) ** 2 - QuarticCoeffs.clifford()(p.samples)
    assert np.max(np.abs(residual)) < 1e-13


def test_clifford_euler_lagrange(clifford):
    """Test the Euler-Lagrange residual and a = 1/2."""
    res_el, a_const, a_var, res_flow = euler_lagrange_residual(*clifford[:2])
    assert res_el < 1e-10
    assert a_const == pytest.approx(0.5, abs=1e-12)
    assert a_var < 1e-10
    assert res_flow < 1e-10


def test_central_differences_converge_at_second_order():
    """Test that the central2 Euler-Lagrange residual drops by four when N doubles."""
    coarse = euler_lagrange_residual(*clifford_fixture(128)[:2], method="central2")[0]
    fine = euler_lagrange_residual(*clifford_fixture(256)[:2], method="central2")[0]
    assert coarse / fine == pytest.approx(4.0, rel=0.1)


def test_schrodinger_and_constant_a_converge_at_second_order():
    """Test that the central2 spread of a drops by four when N doubles and the Schrodinger residual falls too."""
    coarse, fine = clifford_fixture(128)[:2], clifford_fixture(256)[:2]
    schrodinger = [schrodinger_residual(*pair, method="central2")[0] for pair in (coarse, fine)]
    spread = [euler_lagrange_residual(*pair, method="central2")[2] for pair in (coarse, fine)]
    assert schrodinger[0] / schrodinger[1] > 2.0
    assert spread[0] / spread[1] == pytest.approx(4.0, rel=0.1)


def test_clifford_schrodinger(clifford):
    """Test that xi = u/p solves xi_xx / 4 + V xi = 0 away from the zeros of p."""
    residual, excluded = schrodinger_residual(*clifford[:2])
    assert residual < 1e-6
    assert 0.0 < excluded < 0.2


def test_schrodinger_refuses_large_exclusion(clifford):
    """Test that a p_floor excluding most nodes is refused."""
    with pytest.raises(DomainError):
        schrodinger_residual(*clifford[:2], p_floor=0.5)


def test_euler_lagrange_needs_positive_u(clifford):
    """Test that a non-positive conformal factor is refused."""
    p, u, _, _ = clifford
    with pytest.raises(DomainError):
        euler_lagrange_residual(p, u.with_samples(-u.samples))


def test_clifford_spinor_is_antiperiodic(clifford):
    """Test that r and s carry Bloch phase pi and that r^2 + s^2 = u."""
    _, u, r, s = clifford
    assert r.bloch_phase == s.bloch_phase == math.pi
    assert np.max(np.abs(r.samples**2 + s.samples**2 - u.samples)) < 1e-13


def test_clifford_immersion_curvatures():
    """Test the first form 4/D^2 and the curvatures H = sin v / (2 sqrt2), K = (sqrt2 sin v - 1)/4."""
    vv = np.linspace(0.0, 2.0 * np.pi, 25)
    defect, H, K = clifford_curvatures(vv)
    assert defect < 1e-4
    assert np.max(np.abs(np.abs(H) - np.abs(np.sin(vv)) / (2.0 * SQRT2))) < 1e-4
    assert np.max(np.abs(K - (SQRT2 * np.sin(vv) - 1.0) / 4.0)) < 1e-4


def test_sign_flip_congruence():
    """Test that the surface of -p is the X3-mirror image of the surface of p."""
    assert sign_flip_congruence(ny=16) < 1e-10


def test_potential_energy_needs_sign_definite_p(clifford):
    """Test that V = (log p)_xx / 2 + 2 p^2 is refused when p changes sign."""
    with pytest.raises(BranchError):
        potential_energy_check(clifford[0])


# --------------------------------------------------------------
# Quartic and stationary profiles
# --------------------------------------------------------------


def test_alpha_family_roots():
    """Test that the positive alpha family has roots +-sqrt((1 + beta)/8) only."""
    coeffs = QuarticCoeffs.alpha_family(1.0)
    beta = math.sqrt(17.0)
    roots = coeffs.real_roots()
    assert roots == pytest.approx([-math.sqrt((1 + beta) / 8), math.sqrt((1 + beta) / 8)], rel=1e-12)
    assert coeffs.oscillation_intervals() == [(roots[0], roots[1])]


def test_negative_alpha_has_two_bumps():
    """Test that -1/16 < alpha < 0 gives two sign-definite oscillation intervals."""
    intervals = QuarticCoeffs.alpha_family(ALPHA_NEGATIVE).oscillation_intervals()
    assert len(intervals) == 2
    assert intervals[0][1] < 0.0 < intervals[1][0]


def test_no_oscillation_below_minus_one_sixteenth():
    """Test that alpha < -1/16 leaves Q negative everywhere."""
    with pytest.raises(NoOscillationError):
        stationary_profile(QuarticCoeffs.alpha_family(-0.1), 64)


def test_degenerate_turning_point():
    """Test that alpha = 0 puts a double root at a turning point."""
    with pytest.raises(TurningPointDegenerateError):
        stationary_profile(QuarticCoeffs.alpha_family(0.0), 64)


def test_unknown_branch():
    """Test that only the upper and lower bumps can be selected."""
    with pytest.raises(BranchError):
        stationary_profile(QuarticCoeffs.alpha_family(ALPHA_NEGATIVE), 64, branch="middle")


def test_clifford_quartic_reproduces_the_clifford_potential():
    """Test that integrating the Clifford quartic gives period 2 pi and W = 2 pi^2."""
    profile = stationary_profile(QuarticCoeffs.clifford(), 256)
    assert profile.branch is ProfileBranch.SIGN_CHANGING
    assert profile.period == pytest.approx(2.0 * math.pi, rel=1e-9)
    assert profile.p_max == pytest.approx(1.0 / (2.0 * SQRT2 * (SQRT2 - 1.0)), rel=1e-10)
    assert willmore_energy(profile.p) == pytest.approx(CLIFFORD_ENERGY, rel=1e-9)


@pytest.mark.parametrize("alpha", [ALPHA_NEGATIVE, 0.5])
def test_stationary_residuals(alpha):
    """Test that the sampled profile solves the stationary flow, the second-order equation and the first integral."""
    profile = stationary_profile(QuarticCoeffs.alpha_family(alpha), 256)
    assert profile.first_integral_drift < 1e-10
    flow, second_order, first_integral = stationary_residual(profile)
    assert flow < 1e-6
    assert second_order < 1e-10
    assert first_integral < 1e-10
    assert profile.a_const == 0.0


def test_clifford_quartic_profile_is_the_shifted_fixture(clifford):
    """Test that the integrated Clifford profile is the closed form started at its maximum."""
    profile = stationary_profile(QuarticCoeffs.clifford(), 256)
    p = clifford[0]
    assert profile.p.cross_correlation_shift(p) == pytest.approx(-0.5 * math.pi, abs=1e-6)
    assert np.max(np.abs(profile.p.samples - p.shifted(0.5 * math.pi).samples)) < 1e-7


@pytest.mark.parametrize("alpha", [-0.01, 0.01, 0.1, 1.0])
def test_alpha_sweep_profiles_are_accurate(alpha):
    """Test the second-order residual and the first integral across the alpha family."""
    profile = stationary_profile(QuarticCoeffs.alpha_family(alpha), 256)
    _, second_order, first_integral = stationary_residual(profile)
    assert second_order < 1e-10
    assert first_integral < 1e-10


def test_lower_branch_is_negative():
    """Test that the lower bump of a negative alpha is a negative sign-definite potential."""
    profile = stationary_profile(QuarticCoeffs.alpha_family(ALPHA_NEGATIVE), 128, branch="lower")
    assert profile.branch is ProfileBranch.SIGN_DEFINITE
    assert profile.p_max < 0.0


def test_potential_energy_identity(negative_alpha_profile):
    """Test that 4 int p^2 = 2 int V for a sign-definite potential."""
    flat, potential = potential_energy_check(negative_alpha_profile.p)
    assert flat == pytest.approx(potential, rel=1e-9)


# --------------------------------------------------------------
# Lax invariant
# --------------------------------------------------------------


def test_lax_invariant_values():
    """Test that Gamma(-1) is 16 alpha for the alpha family and 0 for the Clifford quartic."""
    assert lax_invariant(QuarticCoeffs.alpha_family(0.25)) == pytest.approx(4.0)
    assert lax_invariant(QuarticCoeffs.clifford()) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("lam", [-1.0, 0.7])
def test_lax_invariant_is_constant_along_the_profile(negative_alpha_profile, lam):
    """Test that A^2 + BC evaluated pointwise is constant and equals Gamma(lam)."""
    values = lax_invariant_profile(negative_alpha_profile, lam)
    assert np.ptp(values) < 1e-7
    assert np.mean(values) == pytest.approx(lax_invariant(negative_alpha_profile.coeffs, lam), abs=1e-7)


def test_alpha_family_survey():
    """Test that negative alpha gives elliptic monodromy and positive alpha does not."""
    negative, positive = alpha_family_survey([ALPHA_NEGATIVE, 0.5], N=128)
    assert negative.branch is ProfileBranch.SIGN_DEFINITE
    assert negative.monodromy is MonodromyKind.ELLIPTIC
    assert negative.W_elliptic is None
    assert positive.branch is ProfileBranch.SIGN_CHANGING
    assert positive.monodromy not in (MonodromyKind.ELLIPTIC, MonodromyKind.PARABOLIC)
    assert positive.W_elliptic == pytest.approx(positive.W_quadrature, rel=1e-6)


# --------------------------------------------------------------
# delta_0 obstruction
# --------------------------------------------------------------


def test_delta0_routes_agree(negative_alpha_profile):
    """Test that the direct, integrated-by-parts and closed forms of delta_0 agree and are positive."""
    u, _ = periodic_conformal_factor(negative_alpha_profile)
    report = delta0(negative_alpha_profile, u)
    assert report.closed > 0.0
    assert report.agreement < 1e-7


def test_delta0_is_eight_times_the_closure_integral(negative_alpha_profile):
    """Test that u - u_xx = 8 p rs turns delta_0 into 8 int rs, so the surface is a cylinder."""
    u, traj = periodic_conformal_factor(negative_alpha_profile)
    report = delta0(negative_alpha_profile, u)
    closure = torus_closure_test(traj)
    assert report.direct == pytest.approx(8.0 * closure.closure_integral, rel=1e-6)
    assert closure.verdict is ClosureVerdict.CYLINDER


def test_delta0_needs_sign_definite_potential():
    """Test that delta_0 is refused for a potential with zeros."""
    profile = stationary_profile(QuarticCoeffs.alpha_family(0.5), 64)
    with pytest.raises(BranchError):
        delta0(profile, PeriodicProfile(np.ones(64), profile.period))


def test_delta0_needs_matching_grid(negative_alpha_profile):
    """Test that u must be sampled on the potential grid."""
    with pytest.raises(DomainError):
        delta0(negative_alpha_profile, PeriodicProfile(np.ones(64), negative_alpha_profile.period))


# --------------------------------------------------------------
# Bound verdict and case split
# --------------------------------------------------------------


@pytest.mark.parametrize("alpha", [1e-3, 0.1, 1.0, 50.0])
def test_bound_verdict(alpha):
    """Test that W exceeds 2 pi^2 and that the elliptic and quadrature routes agree."""
    verdict = bound_verdict(alpha, N=256)
    assert verdict.exceeds
    assert verdict.relative_gap < 1e-6
    assert verdict.csv_row()[0] == alpha


def test_bound_verdict_domain():
    """Test that the verdict is only defined for alpha > 0."""
    with pytest.raises(DomainError):
        bound_verdict(-0.01)


def test_case_split():
    """Test that the a != 0 branch forces the Clifford coefficients and that c2 = 0 is inconsistent."""
    report = case_split_check()
    assert report.c2 == 2.0
    assert report.c1_roots[0] == pytest.approx(1.0 / SQRT2, rel=1e-14)
    assert report.c1_roots[1] == pytest.approx(-1.0 / SQRT2, rel=1e-14)
    assert report.c0 == pytest.approx(1.0 / 16.0, rel=1e-14)
    assert report.relation_residual < 1e-14
    assert report.matches_clifford
    assert report.alternative_c2_residual == pytest.approx(1.0 / SQRT2, rel=1e-12)
