"""
Surfaces of revolution induced by x-dependent potentials.

With psi1 = r(x) e^{iy/2}, psi2 = s(x) e^{iy/2} and v = 4p the Dirac system
reduces to the linear ODE

    r_x = (lam r + v s) / 2,    s_x = (-v r - lam s) / 2,

with lam = -1 for geometry. The induced surface is a surface of revolution
with conformal factor u = r^2 + s^2 and profile height X3 = -4 int r s dx; it
closes into a torus iff the spinor densities are periodic and int r s dx = 0
over a period.

Complex spinors (complex Floquet solutions of elliptic monodromy) are
supported: then u = |r|^2 + |s|^2, rs is replaced by Re(conj(r) s) and
Im(conj(r) s) is constant.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.interpolate import CubicSpline

from .errors import (
    BlowUpError,
    DomainError,
    GridTooSmallError,
    NonPeriodicTrajectoryError,
    WillmoreToriError,
)
from .profile import PeriodicProfile, mode_numbers

logger = logging.getLogger(__name__)

Interpolation = Literal["cubic", "spectral"]

GEOMETRIC_LAMBDA = -1.0
OVERSAMPLING = 8
BLOW_UP_LIMIT = 1e8
RETURN_TOL = 1e-6
TRACE_TOL = 1e-8
MAX_CLOSING_PERIODS = 16
MIN_MESH_NY = 8


class MonodromyKind(str, Enum):
    IDENTITY = "Identity"
    MINUS_IDENTITY = "MinusIdentity"
    ELLIPTIC = "EllipticRotation"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"


class ClosureVerdict(str, Enum):
    TORUS = "Torus"
    CYLINDER = "Cylinder"


class ClosureReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: ClosureVerdict
    closure_integral: float
    pitch: float
    tolerance: float


@dataclass(frozen=True, eq=False)
class SpinorTrajectory:
    """
    (r, s) sampled at the potential's grid nodes over `periods` potential periods.

    end_state is (r, s) at x = periods * T, used for the return map.
    """

    v: PeriodicProfile
    lam: float
    periods: int
    r: np.ndarray
    s: np.ndarray
    end_state: np.ndarray

    @property
    def dx(self) -> float:
        return self.v.dx

    @property
    def length(self) -> float:
        return self.periods * self.v.period

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.r.size) * self.dx

    @property
    def v_samples(self) -> np.ndarray:
        return np.tile(self.v.samples, self.periods)

    @property
    def is_real(self) -> bool:
        return not (np.iscomplexobj(self.r) or np.iscomplexobj(self.s))

    @property
    def u(self) -> np.ndarray:
        return np.abs(self.r) ** 2 + np.abs(self.s) ** 2

    @property
    def rs(self) -> np.ndarray:
        """Re(conj(r) s); equal to r s for real trajectories."""
        return np.real(np.conj(self.r) * self.s)

    @property
    def twist(self) -> float:
        """Im(conj(r) s), constant along the trajectory; zero for real ones."""
        return float(np.mean(np.imag(np.conj(self.r) * self.s)))

    @property
    def closure_integral(self) -> float:
        return float(np.sum(self.rs) * self.dx)

    @property
    def start_state(self) -> np.ndarray:
        return np.array([self.r[0], self.s[0]])

    @property
    def multiplier(self) -> complex:
        """mu with end_state ~ mu * start_state."""
        start = self.start_state
        return complex(np.vdot(start, self.end_state) / np.vdot(start, start))

    @property
    def return_defect(self) -> float:
        start = self.start_state
        mu = self.multiplier
        mismatch = np.linalg.norm(self.end_state - mu * start) / np.linalg.norm(start)
        return float(mismatch + abs(abs(mu) - 1.0))

    def is_closed(self, tol: float = RETURN_TOL) -> bool:
        return self.return_defect <= tol

    @property
    def bloch_phase(self) -> float:
        mu = self.multiplier
        if self.is_real:
            return 0.0 if mu.real > 0.0 else np.pi
        return float(np.angle(mu))

    def density(self, values: np.ndarray) -> PeriodicProfile:
        """A quadratic density of a closed trajectory as a periodic profile over the full length."""
        if not self.is_closed():
            raise NonPeriodicTrajectoryError(f"trajectory does not close (return defect {self.return_defect:.2e})")
        return PeriodicProfile(values, self.length)

    def component_profiles(self) -> tuple[PeriodicProfile, PeriodicProfile]:
        """r and s as Bloch-periodic profiles over the full length."""
        if not self.is_closed():
            raise NonPeriodicTrajectoryError(f"trajectory does not close (return defect {self.return_defect:.2e})")
        phase = self.bloch_phase
        return PeriodicProfile(self.r, self.length, phase), PeriodicProfile(self.s, self.length, phase)


@dataclass(frozen=True, eq=False)
class Monodromy:
    """Transfer matrix of the spinor ODE over one potential period; columns are the solutions from (1,0), (0,1)."""

    m: np.ndarray
    kind: MonodromyKind
    angle: float | None = None

    @property
    def trace(self) -> float:
        return float(np.trace(self.m))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.m))

    def closing_period(self, qmax: int = MAX_CLOSING_PERIODS, tol: float = TRACE_TOL) -> int | None:
        """Smallest q <= qmax with m^q = +-identity."""
        identity = np.eye(2)
        for q in range(1, qmax + 1):
            power = np.linalg.matrix_power(self.m, q)
            scale = max(1.0, np.linalg.norm(power))
            if min(np.linalg.norm(power - identity), np.linalg.norm(power + identity)) <= tol * scale:
                return q
        return None

    def floquet_vector(self) -> np.ndarray:
        """A start vector whose trajectory returns to a multiple of itself after one period."""
        if self.kind in (MonodromyKind.IDENTITY, MonodromyKind.MINUS_IDENTITY):
            return np.array([1.0, 0.0])
        if self.kind is MonodromyKind.PARABOLIC:
            sign = np.sign(self.trace)
            _, _, vh = np.linalg.svd(self.m - sign * np.eye(2))
            return vh[-1]
        if self.kind is MonodromyKind.ELLIPTIC:
            values, vectors = np.linalg.eig(self.m.astype(complex))
            vector = vectors[:, int(np.argmax(values.imag))]
            return vector / np.linalg.norm(vector)
        raise NonPeriodicTrajectoryError("hyperbolic monodromy has no bounded Floquet solution")


def _fine_potential(v: PeriodicProfile, oversampling: int, interpolation: Interpolation) -> np.ndarray:
    """v at every half step of the fine integration grid over one period."""
    if v.bloch_phase != 0.0 or not v.is_real:
        raise DomainError("the potential must be a real periodic profile")
    points = 2 * oversampling * v.n
    if interpolation == "spectral":
        return v.resample(points).samples
    if interpolation == "cubic":
        nodes = np.append(v.x, v.period)
        spline = CubicSpline(nodes, np.append(v.samples, v.samples[0]), bc_type="periodic")
        return spline(np.arange(points) * (v.period / points))
    raise DomainError(f"unknown interpolation {interpolation!r}")


def _transport(
    v: PeriodicProfile,
    lam: float,
    start: np.ndarray,
    periods: int,
    oversampling: int,
    interpolation: Interpolation,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Classical RK4 for the spinor ODE; start has shape (2, m). Returns (r, s) node samples and the end state."""
    fine = _fine_potential(v, oversampling, interpolation)
    h = v.dx / oversampling
    steps_per_period = v.n * oversampling
    half = 0.5 * h

    def rhs(vv, r, s):
        return 0.5 * (lam * r + vv * s), -0.5 * (vv * r + lam * s)

    r, s = start[0].copy(), start[1].copy()
    total = v.n * periods
    r_nodes = np.empty((total,) + r.shape, dtype=r.dtype)
    s_nodes = np.empty((total,) + s.shape, dtype=s.dtype)
    for step in range(steps_per_period * periods):
        if step % oversampling == 0:
            node = step // oversampling
            r_nodes[node], s_nodes[node] = r, s
            if max(np.max(np.abs(r)), np.max(np.abs(s))) > BLOW_UP_LIMIT:
                raise BlowUpError(f"spinor exceeded {BLOW_UP_LIMIT:.0e} at x = {node * v.dx:.4f}")
        index = 2 * (step % steps_per_period)
        v0, vh, v1 = fine[index], fine[index + 1], fine[(index + 2) % fine.size]
        k1r, k1s = rhs(v0, r, s)
        k2r, k2s = rhs(vh, r + half * k1r, s + half * k1s)
        k3r, k3s = rhs(vh, r + half * k2r, s + half * k2s)
        k4r, k4s = rhs(v1, r + h * k3r, s + h * k3s)
        r = r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        s = s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    if max(np.max(np.abs(r)), np.max(np.abs(s))) > BLOW_UP_LIMIT:
        raise BlowUpError(f"spinor exceeded {BLOW_UP_LIMIT:.0e} at the end of the trajectory")
    return r_nodes, s_nodes, np.array([r, s])


def integrate_spinor(
    v: PeriodicProfile,
    lam: float,
    r0: complex,
    s0: complex,
    periods: int = 1,
    oversampling: int = OVERSAMPLING,
    interpolation: Interpolation = "spectral",
) -> SpinorTrajectory:
    """Integrate the spinor ODE from (r0, s0) over `periods` periods of v."""
    if r0 == 0 and s0 == 0:
        raise DomainError("the zero spinor induces no surface")
    if periods < 1:
        raise DomainError(f"periods must be >= 1, got {periods}")
    dtype = complex if np.iscomplexobj(np.array([r0, s0])) else float
    start = np.array([[r0], [s0]], dtype=dtype)
    r, s, end = _transport(v, lam, start, periods, oversampling, interpolation)
    return SpinorTrajectory(v=v, lam=lam, periods=periods, r=r[:, 0], s=s[:, 0], end_state=end[:, 0])


def monodromy(
    v: PeriodicProfile,
    lam: float = GEOMETRIC_LAMBDA,
    oversampling: int = OVERSAMPLING,
    interpolation: Interpolation = "spectral",
    tol: float = TRACE_TOL,
) -> Monodromy:
    """Transfer matrix over one period, classified by its trace."""
    _, _, m = _transport(v, lam, np.eye(2), 1, oversampling, interpolation)
    trace = float(np.trace(m))
    scale = max(1.0, float(np.linalg.norm(m)))
    angle = None
    if abs(trace - 2.0) <= tol:
        kind = MonodromyKind.IDENTITY if np.linalg.norm(m - np.eye(2)) <= tol * scale else MonodromyKind.PARABOLIC
    elif abs(trace + 2.0) <= tol:
        kind = MonodromyKind.MINUS_IDENTITY if np.linalg.norm(m + np.eye(2)) <= tol * scale else MonodromyKind.PARABOLIC
    elif abs(trace) < 2.0:
        kind = MonodromyKind.ELLIPTIC
        angle = float(np.arccos(0.5 * trace))
    else:
        kind = MonodromyKind.HYPERBOLIC
    logger.debug("monodromy trace %.12f det %.3e -> %s", trace, np.linalg.det(m) - 1.0, kind.value)
    return Monodromy(m=m, kind=kind, angle=angle)


def periodic_trajectory(
    v: PeriodicProfile,
    lam: float = GEOMETRIC_LAMBDA,
    qmax: int = MAX_CLOSING_PERIODS,
    oversampling: int = OVERSAMPLING,
    interpolation: Interpolation = "spectral",
) -> SpinorTrajectory:
    """
    A trajectory whose quadratic densities are periodic, when one exists.

    Elliptic monodromy with m^q = +-I for some q <= qmax gives a real
    trajectory over q periods; otherwise the complex Floquet solution is used.
    """
    mono = monodromy(v, lam, oversampling, interpolation)
    periods = 1
    start = mono.floquet_vector()
    if mono.kind is MonodromyKind.ELLIPTIC:
        q = mono.closing_period(qmax)
        if q is not None:
            periods, start = q, np.array([1.0, 0.0])
        else:
            logger.info("elliptic monodromy (angle %.6f) does not close within %d periods; using the complex Floquet solution", mono.angle, qmax)
    return integrate_spinor(v, lam, start[0], start[1], periods, oversampling, interpolation)


def torus_closure_test(traj: SpinorTrajectory, tol: float | None = None) -> ClosureReport:
    """Torus iff |int r s dx| <= tol over the trajectory; otherwise a cylinder with the reported X3 pitch."""
    if not traj.is_closed():
        raise NonPeriodicTrajectoryError(f"trajectory does not close (return defect {traj.return_defect:.2e})")
    if tol is None:
        tol = 1e-7 * traj.length * float(np.max(np.abs(traj.rs)))
    closure = traj.closure_integral
    verdict = ClosureVerdict.TORUS if abs(closure) <= tol else ClosureVerdict.CYLINDER
    return ClosureReport(verdict=verdict, closure_integral=closure, pitch=-4.0 * closure, tolerance=tol)


def _fd4(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """Fourth-order central differences on interior nodes [2:-2]."""
    f = values
    if order == 1:
        return (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    return (-f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3] - f[:-4]) / (12.0 * h * h)


def _derivatives(traj: SpinorTrajectory, values: np.ndarray, orders: tuple[int, ...]) -> tuple[slice, list[np.ndarray]]:
    """Spectral derivatives for closed trajectories, interior fourth-order differences otherwise."""
    if traj.is_closed():
        profile = PeriodicProfile(values, traj.length)
        return slice(None), [profile.derivative(order).samples for order in orders]
    return slice(2, -2), [_fd4(values, traj.dx, order) for order in orders]


def derivative_identity_residuals(traj: SpinorTrajectory) -> tuple[float, float, float]:
    """
    Residuals of

        (rs)_x = -(v/2)(r^2 - s^2),
        (r^2 + s^2)_x = lam (r^2 - s^2),
        (r^2 - s^2)_x = lam (r^2 + s^2) + 2 v rs.
    """
    v = traj.v_samples
    difference = np.abs(traj.r) ** 2 - np.abs(traj.s) ** 2
    inner, (rs_x,) = _derivatives(traj, traj.rs, (1,))
    _, (u_x,) = _derivatives(traj, traj.u, (1,))
    _, (diff_x,) = _derivatives(traj, difference, (1,))
    res1 = np.max(np.abs(rs_x + 0.5 * v[inner] * difference[inner]))
    res2 = np.max(np.abs(u_x - traj.lam * difference[inner]))
    res3 = np.max(np.abs(diff_x - traj.lam * traj.u[inner] - 2.0 * v[inner] * traj.rs[inner]))
    return float(res1), float(res2), float(res3)


def metric_identity_residual(traj: SpinorTrajectory) -> float:
    """
    Max of |v^2 R - (lam^2 u - u_xx)^2| with R = lam^2 u^2 - u_x^2 - 4 lam^2 Im(conj(r) s)^2.

    This is v sqrt(R) = lam^2 u - u_xx squared. The root carries the sign of -lam * rs:
    wherever lam^2 u - u_xx is clear of zero, v * (-lam rs) must share its sign,
    and a mismatch gives an infinite residual.
    """
    lam = traj.lam
    inner, (u_x, u_xx) = _derivatives(traj, traj.u, (1, 2))
    u = traj.u[inner]
    v = traj.v_samples[inner]
    scale = float(np.max(lam**2 * u**2))
    radicand = lam**2 * u**2 - u_x**2 - 4.0 * lam**2 * traj.twist**2
    if np.min(radicand) < -1e-8 * scale:
        raise DomainError(f"lam^2 u^2 - u_x^2 is negative ({np.min(radicand):.3e})")
    target = lam**2 * u - u_xx
    clear = np.abs(target) > 1e-6 * np.sqrt(scale)
    if np.any(np.sign(v[clear] * -lam * traj.rs[inner][clear]) != np.sign(target[clear])):
        return float("inf")
    return float(np.max(np.abs(v**2 * np.clip(radicand, 0.0, None) - target**2)))


def willmore_energy(p: PeriodicProfile, q_periods: int = 1) -> float:
    """W = 8 pi int p^2 dx over q_periods periods, cross-checked against (pi/2) int v^2 dx."""
    w_p = 8.0 * np.pi * q_periods * float(np.sum(p.samples**2)) * p.dx
    v = 4.0 * p.samples
    w_v = 0.5 * np.pi * q_periods * float(np.sum(v**2)) * p.dx
    if abs(w_p - w_v) > 1e-12 * max(abs(w_p), 1e-300):
        raise WillmoreToriError(f"energy routes disagree: {w_p!r} vs {w_v!r}")
    return w_p


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Vertices X(x_i, y_j) of shape (nx, ny, 3) with per-vertex u, H, K; periodic in both directions."""

    vertices: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    H: np.ndarray
    K: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.vertices.shape[0], self.vertices.shape[1]

    @property
    def vertex_count(self) -> int:
        return self.shape[0] * self.shape[1]

    def profile_curve(self) -> tuple[np.ndarray, np.ndarray]:
        """(distance to the X3 axis, height) along y = 0."""
        column = self.vertices[:, 0, :]
        return np.hypot(column[:, 0], column[:, 1]), column[:, 2]

    def y_invariance_defects(self) -> tuple[float, float]:
        """Spread over y of the axis distance and of X3, maximised over x."""
        rho = np.hypot(self.vertices[..., 0], self.vertices[..., 1])
        height = self.vertices[..., 2]
        return float(np.max(np.ptp(rho, axis=1))), float(np.max(np.ptp(height, axis=1)))

    def willmore_energy(self) -> float:
        """sum of H^2 dmu with dmu from the mesh's own tangent vectors."""
        dx, dy = self.x[1] - self.x[0], self.y[1] - self.y[0]
        Xx = np.gradient(self.vertices, dx, axis=0, edge_order=2)
        Xy = np.gradient(self.vertices, dy, axis=1, edge_order=2)
        area = np.linalg.norm(np.cross(Xx, Xy), axis=-1)
        return float(np.sum(self.H**2 * area) * dx * dy)


def _spectral_cumulative(values: np.ndarray, length: float) -> np.ndarray:
    """int_0^x of periodic samples, exact for band-limited data; a nonzero mean adds a linear term."""
    n = values.size
    coeffs = np.fft.fft(values)
    mean = np.mean(values)
    wavenumbers = 2.0 * np.pi / length * mode_numbers(n)
    wavenumbers[0] = 1.0
    coeffs = coeffs / (1j * wavenumbers)
    coeffs[0] = 0.0
    coeffs[n // 2] = 0.0
    antiderivative = np.fft.ifft(coeffs)
    if np.isrealobj(values):
        antiderivative = antiderivative.real
    x = np.arange(n) * (length / n)
    return antiderivative - antiderivative[0] + mean * x


def build_revolution_mesh(traj: SpinorTrajectory, ny: int = 64) -> SurfaceMesh:
    """
    Integrate the inducing forms of the revolution ansatz: along x at y = 0, then along y.

    Along y only X1 + i X2 moves, with derivative -2 (conj(r)^2 + conj(s)^2) e^{-iy};
    both integrals are spectral. The integration constant puts the axis of revolution
    on the X3 axis.
    """
    if ny < MIN_MESH_NY:
        raise GridTooSmallError(f"mesh needs ny >= {MIN_MESH_NY}, got {ny}")
    if not traj.is_closed():
        raise NonPeriodicTrajectoryError(f"trajectory does not close (return defect {traj.return_defect:.2e})")
    if not traj.is_real or abs(traj.twist) > RETURN_TOL:
        raise NonPeriodicTrajectoryError("complex Floquet trajectories induce helicoidal surfaces, not tori")
    x = traj.x
    y = np.arange(ny) * (2.0 * np.pi / ny)
    r, s = traj.r, traj.s
    u = traj.u

    along_x = _spectral_cumulative(2j * (np.conj(r) ** 2 - np.conj(s) ** 2), traj.length) - 2j * u[0]
    height = _spectral_cumulative(-4.0 * traj.rs, traj.length)
    along_y = _spectral_cumulative(np.exp(-1j * y), 2.0 * np.pi)
    Z = along_x[:, None] - 2.0 * (np.conj(r) ** 2 + np.conj(s) ** 2)[:, None] * along_y[None, :]
    vertices = np.stack([Z.real, Z.imag, np.broadcast_to(height[:, None], Z.shape)], axis=-1)

    p = traj.v_samples / 4.0
    log_u_xx = traj.density(np.log(u)).derivative(2).samples
    per_vertex = lambda values: np.broadcast_to(values[:, None], Z.shape).copy()
    return SurfaceMesh(
        vertices=vertices,
        x=x,
        y=y,
        u=per_vertex(u),
        H=per_vertex(p / u),
        K=per_vertex(-log_u_xx / (4.0 * u**2)),
    )
