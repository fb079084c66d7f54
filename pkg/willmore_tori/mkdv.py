"""
The mKdV hierarchy on periodic potentials.

    D  = d_x^2 + v^2 + v_x d_x^{-1} v,
    D+ = d_x^2 + v^2 - v d_x^{-1} v_x,
    v_t = D^n v_x,

with d_x^{-1} the zero-mean periodic antiderivative. The first D applied to v_x
uses the local antiderivative v^2/2 of v v_x so that the n = 1 flow is exactly
v_t = v_xxx + 3/2 v^2 v_x. Spinors of the lam-Dirac system are carried along the
n = 1 flow by eta_t = K3 eta, which preserves the torus closure integral int rs dx
and W = (pi/2) int v^2 dx.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import DomainError, InstabilityError, NonExactDerivativeError
from .export import write_csv
from .profile import PeriodicProfile, mode_numbers

logger = logging.getLogger(__name__)

FlowMode = Literal["integrating_factor", "explicit"]

MEAN_TOL = 1e-8
RHS_CHECK_TOL = 1e-9
EXPLICIT_FACTOR = 0.05
ADVECTIVE_FACTOR = 0.4
MAX_DT = 1e-2
GROWTH_LIMIT = 10.0
CONTOUR_POINTS = 64


# --------------------------------------------------------------
# Operators
# --------------------------------------------------------------


def antiderivative_periodic(f: PeriodicProfile, mean_tol: float = MEAN_TOL) -> PeriodicProfile:
    """Zero-mean periodic antiderivative; refuses operands that are not total derivatives."""
    scale = f.max_abs()
    mean = f.mean()
    if abs(mean) > mean_tol * scale:
        raise NonExactDerivativeError(f"operand has mean {mean:.3e} (max |f| = {scale:.3e}); no periodic antiderivative")
    wavenumbers = 2.0 * np.pi / f.period * mode_numbers(f.n)
    coeffs = np.fft.fft(f.samples)
    nonzero = wavenumbers != 0.0
    coeffs[nonzero] /= 1j * wavenumbers[nonzero]
    coeffs[~nonzero] = 0.0
    coeffs[f.n // 2] = 0.0
    values = np.fft.ifft(coeffs)
    return f.with_samples(values.real if f.is_real else values)


def apply_D(
    v: PeriodicProfile,
    g: PeriodicProfile,
    offset: float | None = None,
    dealias: bool = False,
) -> PeriodicProfile:
    """g_xx + v^2 g + v_x (d_x^{-1}(v g) + offset)."""
    vs, gs = v.samples, g.samples
    integral = antiderivative_periodic(g.with_samples(vs * gs)).samples
    if offset is not None:
        integral = integral + offset
    v_x = v.derivative(dealias=dealias).samples
    return g.with_samples(g.derivative(2, dealias=dealias).samples + vs**2 * gs + v_x * integral)


def apply_D_adjoint(v: PeriodicProfile, g: PeriodicProfile, dealias: bool = False) -> PeriodicProfile:
    """g_xx + v^2 g - v d_x^{-1}(v_x g)."""
    vs, gs = v.samples, g.samples
    v_x = v.derivative(dealias=dealias).samples
    integral = antiderivative_periodic(g.with_samples(v_x * gs)).samples
    return g.with_samples(g.derivative(2, dealias=dealias).samples + vs**2 * gs - vs * integral)


def hierarchy_orbit(v: PeriodicProfile, n: int, dealias: bool = False) -> list[PeriodicProfile]:
    """[v_x, D v_x, ..., D^n v_x]; the first D carries the local offset mean(v^2)/2."""
    orbit = [v.derivative(dealias=dealias)]
    for level in range(n):
        offset = 0.5 * float(np.mean(v.samples**2)) if level == 0 else None
        orbit.append(apply_D(v, orbit[-1], offset, dealias))
    return orbit


def mkdv_rhs(v: PeriodicProfile, n: int = 1, dealias: bool = False, check: bool = True) -> PeriodicProfile:
    """D^n v_x; for n = 1 checked against v_xxx + 3/2 v^2 v_x."""
    if n < 1:
        raise DomainError(f"hierarchy index must be >= 1, got {n}")
    rhs = hierarchy_orbit(v, n, dealias)[-1]
    if check and n == 1:
        direct = v.derivative(3, dealias=dealias).samples + 1.5 * v.samples**2 * v.derivative(dealias=dealias).samples
        gap = float(np.max(np.abs(rhs.samples - direct)))
        if gap > RHS_CHECK_TOL * max(1.0, float(np.max(np.abs(direct)))):
            raise NonExactDerivativeError(f"D v_x deviates from v_xxx + 3/2 v^2 v_x by {gap:.2e}; v is under-resolved")
    return rhs


@dataclass(frozen=True, eq=False)
class HierarchyCoeffs:
    """
    Coefficients of K_{2n+1} = 1/2 [[A, B], [C, -A]] in powers of lam.

    A_list[k] multiplies lam^{2k+1} (the last entry is the constant 1), S_list[k]
    multiplies lam^{2k+1} in B and C, T_list[k] multiplies lam^{2k} with opposite
    signs in B and C. All antiderivatives use the zero-mean convention.
    """

    n: int
    A_list: list[np.ndarray]
    S_list: list[np.ndarray]
    T_list: list[np.ndarray]

    def polynomials(self, lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(A, B, C) evaluated at lam."""
        A = sum(a * lam ** (2 * k + 1) for k, a in enumerate(self.A_list))
        S = sum(s * lam ** (2 * k + 1) for k, s in enumerate(self.S_list))
        T = sum(t * lam ** (2 * k) for k, t in enumerate(self.T_list))
        return A, S + T, S - T


def hierarchy_coeffs(v: PeriodicProfile, n: int, dealias: bool = False) -> HierarchyCoeffs:
    """
    A_{2k+1} = d^{-1}(v D^{n-k-1} v_x), S_{2k+1} = D^{n-k-1} v_x for k < n,
    T_{2k} = d^{-1}(D^{n-k} v_x) for k <= n and A_{2n+1} = 1.
    """
    orbit = hierarchy_orbit(v, n, dealias)
    A_list, S_list, T_list = [], [], []
    for k in range(n):
        level = orbit[n - k - 1]
        A_list.append(antiderivative_periodic(level.with_samples(v.samples * level.samples)).samples)
        S_list.append(level.samples)
    for k in range(n + 1):
        T_list.append(antiderivative_periodic(orbit[n - k]).samples)
    A_list.append(np.ones(v.n))
    return HierarchyCoeffs(n=n, A_list=A_list, S_list=S_list, T_list=T_list)


def k3_apply(v: PeriodicProfile, lam: float, r: PeriodicProfile, s: PeriodicProfile) -> tuple[np.ndarray, np.ndarray]:
    """
    (dr, ds) = 1/2 (A r + B s, C r - A s) for the n = 1 generator.

    The zero-mean hierarchy coefficients are shifted back to their local forms
    A = lam v^2/2 + lam^3 and T = v_xx + v^3/2 + lam^2 v, which make eta_t = K3 eta
    compatible with the lam-Dirac system along v_t = v_xxx + 3/2 v^2 v_x.
    """
    coeffs = hierarchy_coeffs(v, 1)
    vs = v.samples
    local = HierarchyCoeffs(
        n=1,
        A_list=[coeffs.A_list[0] + 0.5 * np.mean(vs**2), coeffs.A_list[1]],
        S_list=coeffs.S_list,
        T_list=[coeffs.T_list[0] + 0.5 * np.mean(vs**3), coeffs.T_list[1] + np.mean(vs)],
    )
    A, B, C = local.polynomials(lam)
    rs, ss = r.samples, s.samples
    return 0.5 * (A * rs + B * ss), 0.5 * (C * rs - A * ss)


def jk_functionals(
    v: PeriodicProfile,
    r: PeriodicProfile,
    s: PeriodicProfile,
    kmax: int,
    lam: float = -1.0,
    dealias: bool = False,
) -> tuple[list[float], list[float]]:
    """J_k = int (D^k v_x)(|r|^2 + |s|^2) dx for k <= kmax, and the defects |J_k - lam^2 J_{k-1}|."""
    u = np.abs(r.samples) ** 2 + np.abs(s.samples) ** 2
    orbit = hierarchy_orbit(v, kmax, dealias)
    values = [float(np.sum(level.samples * u) * v.dx) for level in orbit]
    defects = [abs(values[k] - lam**2 * values[k - 1]) for k in range(1, kmax + 1)]
    return values, defects


# --------------------------------------------------------------
# Flow
# --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FlowState:
    v: PeriodicProfile
    t: float = 0.0
    n: int = 1
    r: PeriodicProfile | None = None
    s: PeriodicProfile | None = None
    lam: float = -1.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"hierarchy index must be >= 1, got {self.n}")
        if not self.v.is_real:
            raise DomainError("the potential must be real")
        if (self.r is None) != (self.s is None):
            raise DomainError("co-evolve both spinor components or neither")
        if self.r is not None and self.n != 1:
            raise DomainError("spinor co-evolution is available for n = 1 only")

    @property
    def has_spinor(self) -> bool:
        return self.r is not None


def willmore_functional(v: PeriodicProfile) -> float:
    """(pi/2) int v^2 dx over one period."""
    return 0.5 * np.pi * float(np.sum(v.samples**2)) * v.dx


def closure_integral(r: PeriodicProfile, s: PeriodicProfile) -> float:
    return float(np.sum(np.real(np.conj(r.samples) * s.samples)) * r.dx)


def dirac_residual(v: PeriodicProfile, r: PeriodicProfile, s: PeriodicProfile, lam: float = -1.0) -> float:
    """max |r_x - (lam r + v s)/2| + max |s_x + (v r + lam s)/2|."""
    vs, rs, ss = v.samples, r.samples, s.samples
    first = np.max(np.abs(r.derivative().samples - 0.5 * (lam * rs + vs * ss)))
    second = np.max(np.abs(s.derivative().samples + 0.5 * (vs * rs + lam * ss)))
    return float(first + second)


@dataclass(eq=False)
class ConservationReport:
    """Per-step time series of W, the closure integral and the Dirac residual, plus sparse v snapshots."""

    t: list[float] = field(default_factory=list)
    W: list[float] = field(default_factory=list)
    closure_integral: list[float] = field(default_factory=list)
    dirac_residual: list[float] = field(default_factory=list)
    snapshots: list[tuple[float, PeriodicProfile]] = field(default_factory=list)
    closure_scale: float = 0.0

    def record(self, state: FlowState) -> None:
        self.t.append(state.t)
        self.W.append(willmore_functional(state.v))
        if state.has_spinor:
            self.closure_integral.append(closure_integral(state.r, state.s))
            self.dirac_residual.append(dirac_residual(state.v, state.r, state.s, state.lam))
        else:
            self.closure_integral.append(np.nan)
            self.dirac_residual.append(np.nan)

    @property
    def W_drift(self) -> float:
        """max |W(t) - W(0)| / W(0); absolute when W(0) = 0."""
        W = np.asarray(self.W)
        scale = W[0] if W[0] > 0.0 else 1.0
        return float(np.max(np.abs(W - W[0])) / scale)

    @property
    def closure_drift(self) -> float:
        """max |int rs(t) - int rs(0)| relative to int |rs|(0) dx; nan without a spinor."""
        values = np.asarray(self.closure_integral)
        if np.all(np.isnan(values)):
            return float("nan")
        scale = self.closure_scale if self.closure_scale > 0.0 else 1.0
        return float(np.max(np.abs(values - values[0])) / scale)

    @property
    def max_dirac_residual(self) -> float:
        values = np.asarray(self.dirac_residual)
        return float("nan") if np.all(np.isnan(values)) else float(np.max(values))

    def rows(self) -> list[list[float]]:
        return [list(row) for row in zip(self.t, self.W, self.closure_integral, self.dirac_residual)]

    def to_csv(self, path: str | Path) -> None:
        write_csv(path, ["t", "W", "closure_integral", "dirac_residual"], self.rows())


def default_time_step(v: PeriodicProfile, n: int = 1, mode: FlowMode = "integrating_factor") -> float:
    """
    Explicit RK4: 0.05 dx^{2n+1} / pi^{2n-2}, inside the imaginary-axis limit of (ik)^{2n+1}.
    Integrating factor: the advective bound 0.4 dx^{2n-1} / max(1.5 max v^2, 1), capped at 1e-2.
    """
    dx = v.dx
    if mode == "explicit":
        return EXPLICIT_FACTOR * dx ** (2 * n + 1) / np.pi ** (2 * n - 2)
    if mode == "integrating_factor":
        speed = max(1.5 * v.max_abs() ** 2, 1.0)
        return min(ADVECTIVE_FACTOR * dx ** (2 * n - 1) / speed, MAX_DT)
    raise DomainError(f"unknown flow mode {mode!r}")


def _linear_symbol(v: PeriodicProfile, n: int) -> np.ndarray:
    wavenumbers = 2.0 * np.pi / v.period * mode_numbers(v.n)
    symbol = (1j * wavenumbers) ** (2 * n + 1)
    symbol[v.n // 2] = 0.0
    return symbol


def _spinor_stage(v: PeriodicProfile, lam: float, eta: tuple[np.ndarray, np.ndarray], like: tuple[PeriodicProfile, PeriodicProfile]):
    r = like[0].with_samples(eta[0])
    s = like[1].with_samples(eta[1])
    return k3_apply(v, lam, r, s)


def _guard(state: FlowState, v_samples: np.ndarray, limit: float, step: int, dt: float) -> None:
    peak = float(np.max(np.abs(v_samples))) if np.all(np.isfinite(v_samples)) else np.inf
    if peak > limit:
        diagnostics = {"t": state.t, "step": step, "dt": dt, "max_abs_v": peak, "limit": limit}
        raise InstabilityError(f"flow left the stable regime at t = {state.t:.6g} (max |v| = {peak:.3e})", diagnostics)


def evolve(
    state: FlowState,
    dt: float | None = None,
    steps: int | None = None,
    t_final: float | None = None,
    mode: FlowMode = "integrating_factor",
    growth_limit: float = GROWTH_LIMIT,
    snapshot_every: int | None = None,
) -> tuple[FlowState, ConservationReport]:
    """
    Advance v (and the spinor, when present) to t + steps * dt.

    In integrating-factor mode the linear part d_x^{2n+1} is integrated exactly by
    exponential time differencing RK4 and the nonlinear part is evaluated without
    aliasing; explicit mode steps the full right-hand side by classical RK4.
    Give either steps or t_final; dt defaults to default_time_step. A zero horizon
    returns the initial state with a one-record report.
    """
    if mode not in ("integrating_factor", "explicit"):
        raise DomainError(f"unknown flow mode {mode!r}")
    if dt is None:
        dt = default_time_step(state.v, state.n, mode)
    if steps is None:
        if t_final is None:
            raise DomainError("give steps or t_final")
        if t_final < 0.0:
            raise DomainError(f"t_final must be >= 0, got {t_final}")
        steps = int(np.ceil(t_final / dt - 1e-9))
        if steps > 0:
            dt = t_final / steps
    if dt <= 0.0 or steps < 0:
        raise DomainError(f"need dt > 0 and steps >= 0, got dt={dt}, steps={steps}")
    if snapshot_every is None:
        snapshot_every = max(1, steps // 50)
    logger.info("evolving n=%d for %d steps of dt=%.3e (%s)", state.n, steps, dt, mode)

    initial_peak = state.v.max_abs()
    limit = growth_limit * (initial_peak if initial_peak > 0.0 else 1.0)
    report = ConservationReport()
    if state.has_spinor:
        report.closure_scale = float(np.sum(np.abs(np.real(np.conj(state.r.samples) * state.s.samples))) * state.r.dx)
    report.record(state)
    report.snapshots.append((state.t, state.v))
    if steps == 0:
        return state, report

    stepper = ExponentialStepper(state, dt) if mode == "integrating_factor" else _explicit_step
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, steps + 1):
            state = stepper(state, dt)
            _guard(state, state.v.samples, limit, step, dt)
            report.record(state)
            if step % snapshot_every == 0 or step == steps:
                report.snapshots.append((state.t, state.v))
    logger.debug("W drift %.3e, closure drift %.3e", report.W_drift, report.closure_drift)
    return state, report


def _with_v(state: FlowState, samples: np.ndarray) -> PeriodicProfile:
    if not np.all(np.isfinite(samples)):
        raise InstabilityError(f"non-finite potential at t = {state.t:.6g}", {"t": state.t, "max_abs_v": np.inf})
    return state.v.with_samples(samples)


def _advance_spinor(state: FlowState, stage_potentials: list[PeriodicProfile], dt: float):
    """RK4 for eta_t = K3(v(t)) eta with v at the four stage times."""
    if not state.has_spinor:
        return None, None
    like = (state.r, state.s)
    eta = (state.r.samples, state.s.samples)
    v1, v2, v3, v4 = stage_potentials
    k1 = _spinor_stage(v1, state.lam, eta, like)
    k2 = _spinor_stage(v2, state.lam, tuple(e + 0.5 * dt * k for e, k in zip(eta, k1)), like)
    k3 = _spinor_stage(v3, state.lam, tuple(e + 0.5 * dt * k for e, k in zip(eta, k2)), like)
    k4 = _spinor_stage(v4, state.lam, tuple(e + dt * k for e, k in zip(eta, k3)), like)
    new = [e + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d) for e, a, b, c, d in zip(eta, k1, k2, k3, k4)]
    return state.r.with_samples(new[0]), state.s.with_samples(new[1])


def _explicit_step(state: FlowState, dt: float) -> FlowState:
    v = state.v

    def rhs(samples):
        return mkdv_rhs(_with_v(state, samples), state.n, check=False).samples

    k1 = rhs(v.samples)
    v2 = v.samples + 0.5 * dt * k1
    k2 = rhs(v2)
    v3 = v.samples + 0.5 * dt * k2
    k3 = rhs(v3)
    v4 = v.samples + dt * k3
    k4 = rhs(v4)
    new_v = v.samples + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    stages = [v, _with_v(state, v2), _with_v(state, v3), _with_v(state, v4)]
    r, s = _advance_spinor(state, stages, dt)
    return replace(state, v=_with_v(state, new_v), t=state.t + dt, r=r, s=s)


@dataclass(frozen=True)
class EtdCoefficients:
    """Exponential time differencing RK4 weights for one step length h."""

    e: np.ndarray
    e_half: np.ndarray
    q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray


def etd_coefficients(symbol: np.ndarray, h: float, contour_points: int = CONTOUR_POINTS) -> EtdCoefficients:
    """
    The phi-function weights as means over a unit circle around each h L.

    The circle is full and the mean complex since the dispersive symbol is imaginary.
    """
    hl = h * symbol
    roots = np.exp(2j * np.pi * (np.arange(1, contour_points + 1) - 0.5) / contour_points)
    lr = hl[:, None] + roots[None, :]
    exp_lr = np.exp(lr)
    return EtdCoefficients(
        e=np.exp(hl),
        e_half=np.exp(0.5 * hl),
        q=h * np.mean((np.exp(0.5 * lr) - 1.0) / lr, axis=1),
        f1=h * np.mean((-4.0 - lr + exp_lr * (4.0 - 3.0 * lr + lr**2)) / lr**3, axis=1),
        f2=h * np.mean((2.0 + lr + exp_lr * (-2.0 + lr)) / lr**3, axis=1),
        f3=h * np.mean((-4.0 - 3.0 * lr - lr**2 + exp_lr * (4.0 - lr)) / lr**3, axis=1),
    )


class ExponentialStepper:
    """
    ETDRK4 for v_t = d_x^{2n+1} v + N(v).

    N is the Galerkin projection of the nonlinear part: products are formed on an
    (n + 1)-fold grid, which holds the degree 2n + 1 polynomial of v without
    aliasing, and truncated back. The Nyquist mode stays zero. With a spinor the
    potential takes two half steps so that eta gets one RK4 step against v at
    t, t + dt/2 and t + dt.
    """

    def __init__(self, state: FlowState, dt: float):
        self.dt = dt
        self.symbol = _linear_symbol(state.v, state.n)
        self.nyquist = state.v.n // 2
        if state.has_spinor:
            self.weights = etd_coefficients(self.symbol, 0.5 * dt)
        else:
            self.weights = etd_coefficients(self.symbol, dt)

    def nonlinear(self, state: FlowState, v_hat: np.ndarray) -> np.ndarray:
        v = _with_v(state, np.fft.ifft(v_hat).real)
        fine = v.resample((state.n + 1) * v.n)
        if state.n == 1:
            # 3/2 v^2 v_x in flux form
            flux = fine.with_samples(0.5 * fine.samples**3).resample(v.n)
            out = np.fft.fft(flux.derivative().samples)
        else:
            out = np.fft.fft(mkdv_rhs(fine, state.n, check=False).resample(v.n).samples) - self.symbol * v_hat
        out[self.nyquist] = 0.0
        return out

    def advance(self, state: FlowState, v_hat: np.ndarray) -> np.ndarray:
        w = self.weights
        nv = self.nonlinear(state, v_hat)
        a = w.e_half * v_hat + w.q * nv
        na = self.nonlinear(state, a)
        b = w.e_half * v_hat + w.q * na
        nb = self.nonlinear(state, b)
        c = w.e_half * a + w.q * (2.0 * nb - nv)
        nc = self.nonlinear(state, c)
        return w.e * v_hat + w.f1 * nv + 2.0 * w.f2 * (na + nb) + w.f3 * nc

    def __call__(self, state: FlowState, dt: float) -> FlowState:
        if dt != self.dt:
            raise DomainError(f"stepper was built for dt={self.dt}, got {dt}")
        v_hat = np.fft.fft(state.v.samples)
        v_hat[self.nyquist] = 0.0
        if not state.has_spinor:
            new_v = _with_v(state, np.fft.ifft(self.advance(state, v_hat)).real)
            return replace(state, v=new_v, t=state.t + dt)
        mid_hat = self.advance(state, v_hat)
        mid = _with_v(state, np.fft.ifft(mid_hat).real)
        new_v = _with_v(state, np.fft.ifft(self.advance(state, mid_hat)).real)
        r, s = _advance_spinor(state, [state.v, mid, mid, new_v], dt)
        return replace(state, v=new_v, t=state.t + dt, r=r, s=s)


def traveling_speed(snapshots: list[tuple[float, PeriodicProfile]]) -> float:
    """Least-squares slope of the cross-correlation offset against the first snapshot."""
    if len(snapshots) < 2:
        raise DomainError("need at least two snapshots")
    times = np.array([t for t, _ in snapshots])
    reference = snapshots[0][1]
    offsets = np.array([profile.cross_correlation_shift(reference) for _, profile in snapshots])
    period = reference.period
    unwrapped = np.unwrap(offsets * (2.0 * np.pi / period)) * (period / (2.0 * np.pi))
    slope, _ = np.polyfit(times, unwrapped, 1)
    return float(slope)
