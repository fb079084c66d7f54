"""
Tests for the mKdV recursion operators, hierarchy coefficients and the co-evolved flow.
Run with: pytest test_mkdv.py
"""

import math

import numpy as np
import pytest

from willmore_tori.errors import DomainError, InstabilityError, NonExactDerivativeError
from willmore_tori.mkdv import (
    FlowState,
    antiderivative_periodic,
    apply_D,
    apply_D_adjoint,
    default_time_step,
    dirac_residual,
    etd_coefficients,
    evolve,
    hierarchy_coeffs,
    jk_functionals,
    k3_apply,
    mkdv_rhs,
    traveling_speed,
    willmore_functional,
)
from willmore_tori.profile import PeriodicProfile
from willmore_tori.willmore import clifford_fixture


def trig(func, n=64):
    return PeriodicProfile.from_function(func, n)


def inner(f, g):
    return float(np.sum(f.samples * g.samples) * f.dx)


def random_trig(rng, modes, n=64):
    """Random real combination of cos(kx), sin(kx) over the given modes."""
    a, b = rng.normal(size=(2, len(modes)))
    return trig(lambda x: sum(ak * np.cos(k * x) + bk * np.sin(k * x) for k, ak, bk in zip(modes, a, b)), n)


def clifford_state(n, spinor=True):
    p, _, r, s = clifford_fixture(n)
    v = p.with_samples(4.0 * p.samples)
    return FlowState(v=v, r=r, s=s) if spinor else FlowState(v=v)


@pytest.fixture(scope="module")
def clifford_flow():
    state = clifford_state(128)
    final, report = evolve(state, t_final=0.2)
    return state, final, report


@pytest.fixture(scope="module")
def clifford_unit_flow():
    state = clifford_state(512)
    final, report = evolve(state, t_final=1.0)
    return state, final, report


# --------------------------------------------------------------
# Operators
# --------------------------------------------------------------


def test_antiderivative_of_cosine():
    """Test that the zero-mean antiderivative of cos x is sin x."""
    f = trig(np.cos)
    assert np.max(np.abs(antiderivative_periodic(f).samples - np.sin(f.x))) < 1e-13


def test_antiderivative_needs_zero_mean():
    """Test that an operand with nonzero mean is refused."""
    with pytest.raises(NonExactDerivativeError):
        antiderivative_periodic(trig(lambda x: 1.0 + np.cos(x)))


def test_first_flow_matches_direct_formula():
    """Test that D v_x equals v_xxx + 3/2 v^2 v_x."""
    v = trig(lambda x: np.cos(x) + 0.3 * np.sin(2.0 * x))
    rhs = mkdv_rhs(v, check=False)
    direct = v.derivative(3).samples + 1.5 * v.samples**2 * v.derivative().samples
    assert np.max(np.abs(rhs.samples - direct)) < 1e-11


def test_flow_index_must_be_positive():
    """Test that n = 0 is refused."""
    with pytest.raises(DomainError):
        mkdv_rhs(trig(np.cos), n=0)


def test_adjoint_pairing():
    """Test that <D g, f> = <g, D+ f> when v g and v_x f have zero mean."""
    v = trig(np.cos)
    g = trig(lambda x: np.sin(2.0 * x) + np.cos(3.0 * x))
    f = trig(lambda x: np.cos(2.0 * x) + np.sin(3.0 * x))
    left = inner(apply_D(v, g), f)
    right = inner(g, apply_D_adjoint(v, f))
    assert left == pytest.approx(right, abs=1e-12)


def test_adjoint_pairing_random_triples():
    """Test the pairing on random trigonometric data whose products have zero mean by construction."""
    rng = np.random.default_rng(11)
    for _ in range(20):
        v = random_trig(rng, (1, 2))
        g = random_trig(rng, (3, 4))
        f = random_trig(rng, (3, 4))
        left = inner(apply_D(v, g), f)
        right = inner(g, apply_D_adjoint(v, f))
        assert left == pytest.approx(right, abs=1e-11)


def test_intertwining():
    """Test that D(f_x) = (D+ f)_x when v f has zero mean."""
    v = trig(np.cos)
    f = trig(lambda x: np.cos(2.0 * x) + np.sin(3.0 * x))
    left = apply_D(v, f.derivative()).samples
    right = apply_D_adjoint(v, f).derivative().samples
    assert np.max(np.abs(left - right)) < 1e-11


def test_hierarchy_coefficients_first_flow():
    """Test A_1 = v^2/2 - mean, T_2 = v - mean(v) and the constant top coefficient."""
    v = trig(lambda x: 0.5 + np.cos(x))
    coeffs = hierarchy_coeffs(v, 1)
    assert len(coeffs.A_list) == 2 and len(coeffs.T_list) == 2
    half_square = 0.5 * v.samples**2
    assert np.max(np.abs(coeffs.A_list[0] - (half_square - half_square.mean()))) < 1e-13
    assert np.max(np.abs(coeffs.T_list[1] - (v.samples - 0.5))) < 1e-13
    assert np.max(np.abs(coeffs.S_list[0] - v.derivative().samples)) < 1e-13
    assert np.all(coeffs.A_list[-1] == 1.0)


def test_polynomials_at_lambda():
    """Test that B + C is twice the odd part and B - C twice the even part."""
    v = trig(np.cos)
    coeffs = hierarchy_coeffs(v, 1)
    lam = 0.7
    A, B, C = coeffs.polynomials(lam)
    assert np.max(np.abs(A - (coeffs.A_list[0] * lam + lam**3))) < 1e-14
    assert np.max(np.abs(0.5 * (B + C) - coeffs.S_list[0] * lam)) < 1e-14
    assert np.max(np.abs(0.5 * (B - C) - (coeffs.T_list[0] + coeffs.T_list[1] * lam**2))) < 1e-14


def test_k3_on_constant_potential():
    """Test the generator coefficients for a constant potential, where v_x and v_xx vanish."""
    c, lam = 1.5, -1.0
    v = PeriodicProfile(np.full(32, c))
    r = PeriodicProfile(np.ones(32))
    s = PeriodicProfile(np.zeros(32))
    dr, ds = k3_apply(v, lam, r, s)
    A = 0.5 * lam * c**2 + lam**3
    T = 0.5 * c**3 + lam**2 * c
    assert np.allclose(dr, 0.5 * A, atol=1e-14)
    assert np.allclose(ds, -0.5 * T, atol=1e-14)


def test_k3_matches_local_coefficients():
    """Test that the generator built from the hierarchy coefficients equals the local closed form."""
    v = trig(lambda x: 0.4 + np.cos(x) + 0.3 * np.sin(2.0 * x))
    r = trig(lambda x: np.cos(x) + 0.2 * np.sin(2.0 * x))
    s = trig(lambda x: np.sin(x) - 0.1)
    lam = -1.0
    vs, v_x, v_xx = v.samples, v.derivative().samples, v.derivative(2).samples
    A = 0.5 * lam * vs**2 + lam**3
    T = v_xx + 0.5 * vs**3 + lam**2 * vs
    dr, ds = k3_apply(v, lam, r, s)
    assert np.max(np.abs(dr - 0.5 * (A * r.samples + (lam * v_x + T) * s.samples))) < 1e-11
    assert np.max(np.abs(ds - 0.5 * ((lam * v_x - T) * r.samples - A * s.samples))) < 1e-11


def test_jk_functionals_on_clifford():
    """Test that the J_k of the periodic Clifford spinor vanish, so J_k = lam^2 J_{k-1}."""
    p, _, r, s = clifford_fixture(128)
    v = p.with_samples(4.0 * p.samples)
    values, defects = jk_functionals(v, r, s, kmax=3)
    assert len(values) == 4 and len(defects) == 3
    assert max(abs(value) for value in values) < 1e-8
    assert max(defects) < 1e-8


# --------------------------------------------------------------
# Flow setup
# --------------------------------------------------------------


def test_flow_state_validation():
    """Test that inconsistent flow states are refused."""
    v = trig(np.cos)
    _, _, r, s = clifford_fixture(64)
    with pytest.raises(DomainError):
        FlowState(v=v, n=0)
    with pytest.raises(DomainError):
        FlowState(v=v.with_samples(v.samples + 1j))
    with pytest.raises(DomainError):
        FlowState(v=v, r=r)
    with pytest.raises(DomainError):
        FlowState(v=v, n=2, r=r, s=s)


def test_default_time_steps():
    """Test the explicit and integrating-factor step rules."""
    zero = PeriodicProfile(np.zeros(64))
    assert default_time_step(zero, 1, "explicit") == pytest.approx(0.05 * zero.dx**3)
    assert default_time_step(zero, 2, "explicit") == pytest.approx(0.05 * zero.dx**5 / math.pi**2)
    assert default_time_step(zero, 1) == 1e-2
    v = trig(lambda x: 4.0 * np.cos(x))
    assert default_time_step(v, 1) == pytest.approx(0.4 * v.dx / 24.0)
    with pytest.raises(DomainError):
        default_time_step(zero, 1, "implicit")


def test_evolve_needs_a_horizon():
    """Test that evolve wants steps or t_final."""
    with pytest.raises(DomainError):
        evolve(FlowState(v=trig(np.cos)))
    with pytest.raises(DomainError):
        evolve(FlowState(v=trig(np.cos)), t_final=-0.1)


def test_zero_horizon_returns_initial_state():
    """Test that t_final = 0 leaves the state alone and records it once."""
    state = clifford_state(64)
    final, report = evolve(state, t_final=0.0)
    assert final is state
    assert report.t == [0.0]
    assert len(report.snapshots) == 1
    assert report.W_drift == 0.0


def test_etd_weights_small_step_limit():
    """Test that a zero symbol gives the RK4 weights h/2 and h/6."""
    h = 0.1
    weights = etd_coefficients(np.zeros(4, dtype=complex), h)
    assert np.allclose(weights.e, 1.0)
    assert np.allclose(weights.q, h / 2.0, atol=1e-14)
    for f in (weights.f1, weights.f2, weights.f3):
        assert np.allclose(f, h / 6.0, atol=1e-14)


def test_etd_weights_match_closed_forms():
    """Test the contour means against the closed forms where no cancellation occurs."""
    h = 0.02
    symbol = np.array([250j, -1000j, 4e4j])
    weights = etd_coefficients(symbol, h)
    z = h * symbol
    ez = np.exp(z)
    assert np.allclose(weights.q, h * (np.exp(0.5 * z) - 1.0) / z, rtol=1e-10)
    assert np.allclose(weights.f1, h * (-4.0 - z + ez * (4.0 - 3.0 * z + z**2)) / z**3, rtol=1e-10)
    assert np.allclose(weights.f2, h * (2.0 + z + ez * (-2.0 + z)) / z**3, rtol=1e-10)
    assert np.allclose(weights.f3, h * (-4.0 - 3.0 * z - z**2 + ez * (4.0 - z)) / z**3, rtol=1e-10)


# --------------------------------------------------------------
# Clifford flow
# --------------------------------------------------------------


def test_clifford_flow_conserves_energy_and_closure(clifford_flow):
    """Test that W and int rs are conserved and the spinor keeps solving the Dirac system."""
    state, final, report = clifford_flow
    assert final.t == pytest.approx(0.2)
    assert report.W[0] == pytest.approx(willmore_functional(state.v))
    assert report.W_drift < 1e-6
    assert report.closure_drift < 1e-6
    assert report.max_dirac_residual < 1e-5


def test_clifford_potential_translates(clifford_flow):
    """Test that the Clifford potential moves rigidly: v(x, t) = V(x + 2t)."""
    state, final, report = clifford_flow
    assert traveling_speed(report.snapshots) == pytest.approx(-2.0, abs=2e-2)
    expected = state.v.shifted(2.0 * final.t)
    assert np.max(np.abs(final.v.samples - expected.samples)) < 1e-6


def test_clifford_unit_time_at_full_resolution(clifford_unit_flow):
    """Test the default flow at N = 512 over unit time: stable, conservative and rigid."""
    state, final, report = clifford_unit_flow
    assert final.t == pytest.approx(1.0)
    assert report.W_drift < 1e-6
    assert report.closure_drift < 1e-6
    assert report.max_dirac_residual < 1e-5
    assert np.max(np.abs(final.v.samples - state.v.shifted(2.0).samples)) < 1e-5
    assert traveling_speed(report.snapshots) == pytest.approx(-2.0, rel=1e-2)


def test_explicit_and_integrating_factor_agree():
    """Test that both time steppers give the same potential after a short time."""
    state = clifford_state(64, spinor=False)
    explicit, _ = evolve(state, t_final=0.01, mode="explicit")
    factored, _ = evolve(state, t_final=0.01)
    assert np.max(np.abs(explicit.v.samples - factored.v.samples)) < 1e-6


def test_spinor_error_falls_with_the_step():
    """Test that halving dt shrinks the distance to a fine-step reference at high order."""
    state = clifford_state(64)
    reference, _ = evolve(state, dt=1e-3 / 8, steps=80)

    def error(dt):
        final, _ = evolve(state, dt=dt, steps=int(round(0.01 / dt)))
        return np.max(np.abs(final.r.samples - reference.r.samples)) + np.max(np.abs(final.v.samples - reference.v.samples))

    coarse, fine = error(5e-3), error(2.5e-3)
    assert fine < coarse
    assert coarse / fine > 6.0


def test_flow_is_deterministic():
    """Test that two runs from the same state agree bit for bit."""
    state = clifford_state(64)
    first, _ = evolve(state, steps=5)
    second, _ = evolve(state, steps=5)
    assert np.array_equal(first.v.samples, second.v.samples)
    assert np.array_equal(first.r.samples, second.r.samples)


def test_dirac_residual_detects_a_perturbed_spinor():
    """Test that noise on r shows up in the Dirac residual."""
    state = clifford_state(128)
    assert dirac_residual(state.v, state.r, state.s) < 1e-8
    noise = 1e-3 * np.random.default_rng(5).normal(size=state.r.n)
    noisy = state.r.with_samples(state.r.samples + noise)
    assert dirac_residual(state.v, noisy, state.s) > 1e-3


# --------------------------------------------------------------
# General data
# --------------------------------------------------------------


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_random_data_conserves_energy(seed):
    """Test W conservation for smooth random potentials under the first flow."""
    rng = np.random.default_rng(seed)
    v = random_trig(rng, (1, 2, 3, 4))
    v = v.with_samples(v.samples / v.max_abs())
    _, report = evolve(FlowState(v=v), t_final=0.1)
    assert report.W_drift < 1e-6


def test_second_flow_conserves_energy():
    """Test W conservation under v_t = D^2 v_x."""
    v = random_trig(np.random.default_rng(4), (1, 2), n=32)
    v = v.with_samples(0.5 * v.samples / v.max_abs())
    final, report = evolve(FlowState(v=v, n=2), t_final=0.02)
    assert report.W_drift < 1e-6
    assert np.max(np.abs(final.v.samples - v.samples)) > 0.0


def test_zero_potential_stays_zero():
    """Test that v = 0 is a fixed point."""
    final, _ = evolve(FlowState(v=PeriodicProfile(np.zeros(32))), steps=4)
    assert np.all(final.v.samples == 0.0)


def test_unstable_step_raises_with_diagnostics():
    """Test that an explicit step far beyond the stability limit trips the growth guard."""
    state = clifford_state(64, spinor=False)
    with pytest.raises(InstabilityError) as excinfo:
        evolve(state, dt=1e-2, steps=200, mode="explicit")
    diagnostics = excinfo.value.diagnostics
    assert "t" in diagnostics and "max_abs_v" in diagnostics


def test_report_to_csv(tmp_path):
    """Test that the conservation report is written with its header."""
    state = clifford_state(64)
    _, report = evolve(state, steps=3)
    path = tmp_path / "flow.csv"
    report.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,W,closure_integral,dirac_residual"
    assert len(lines) == 5


def test_report_csv_is_reproducible(tmp_path):
    """Test that the same run writes byte-identical reports."""
    state = clifford_state(64)
    paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
    for path in paths:
        evolve(state, steps=3)[1].to_csv(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
