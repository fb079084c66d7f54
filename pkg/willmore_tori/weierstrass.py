"""
Generalized Weierstrass inducing on a rectangular grid in the z = x + iy plane.

Given samples of a solution (psi1, psi2) of

    psi1_z = p psi2,    psi2_zbar = -p psi1

this module checks the system and the closedness of the inducing one-forms,
integrates

    X1 + i X2 = 2i int (conj(psi1)^2 dz - conj(psi2)^2 dzbar),
    X3 = -2 int (psi2 conj(psi1) dz + psi1 conj(psi2) dzbar)

along axis-aligned paths, and reads off u = |psi1|^2 + |psi2|^2, H = p/u and
K = -Laplace(log u) / (4 u^2). It does not solve the Dirac system; fields come
from known solution families (see the fixtures at the bottom).
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import ChartError, DegenerateImmersionError, DiracResidualError, GridTooSmallError
from .willmore import clifford_potential, clifford_spinor

logger = logging.getLogger(__name__)

MIN_NODES = 5
U_MIN = 1e-10
DIRAC_TOL = 5e-2
CHART_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class SpinorField2D:
    """psi1, psi2 (complex) and p (real) sampled on the tensor grid x (axis 0) by y (axis 1)."""

    x: np.ndarray
    y: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        shape = (self.x.size, self.y.size)
        for name in ("psi1", "psi2", "p"):
            if getattr(self, name).shape != shape:
                raise GridTooSmallError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if np.iscomplexobj(self.p):
            if np.max(np.abs(self.p.imag)) > 0.0:
                raise ValueError("the potential p must be real")
            object.__setattr__(self, "p", self.p.real)

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.size, self.y.size


@dataclass(frozen=True, eq=False)
class SurfacePatch:
    """Immersion X (nx, ny, 3) with optional induced geometry per node."""

    X: np.ndarray
    path_independence_defect: float
    u: np.ndarray | None = None
    H: np.ndarray | None = None
    K: np.ndarray | None = None
    metric_defect: float | None = None

    @property
    def X1(self) -> np.ndarray:
        return self.X[..., 0]

    @property
    def X2(self) -> np.ndarray:
        return self.X[..., 1]

    @property
    def X3(self) -> np.ndarray:
        return self.X[..., 2]


@dataclass(frozen=True, eq=False)
class KenmotsuData:
    f: np.ndarray
    phi: np.ndarray
    compatibility_residual: float
    recovered_p: np.ndarray
    recovery_defect: float
    # -(conj(f) conj(phi))_z / |phi|, kept as a diagnostic; equals p (|psi2|^2 - |psi1|^2) / |psi2|^2
    conjugate_form: np.ndarray


def _check_grid(field: SpinorField2D):
    nx, ny = field.shape
    if nx < MIN_NODES or ny < MIN_NODES:
        raise GridTooSmallError(f"need at least {MIN_NODES} nodes per direction, got {nx}x{ny}")


def _d_dz(f: np.ndarray, field: SpinorField2D) -> np.ndarray:
    fx = np.gradient(f, field.x, axis=0, edge_order=2)
    fy = np.gradient(f, field.y, axis=1, edge_order=2)
    return 0.5 * (fx - 1j * fy)


def _d_dzbar(f: np.ndarray, field: SpinorField2D) -> np.ndarray:
    fx = np.gradient(f, field.x, axis=0, edge_order=2)
    fy = np.gradient(f, field.y, axis=1, edge_order=2)
    return 0.5 * (fx + 1j * fy)


def _interior_max(values: np.ndarray) -> float:
    return float(np.max(np.abs(values[1:-1, 1:-1])))


def dirac_residual(field: SpinorField2D) -> float:
    """Max over interior nodes of |psi1_z - p psi2| and |psi2_zbar + p psi1|."""
    _check_grid(field)
    first = _d_dz(field.psi1, field) - field.p * field.psi2
    second = _d_dzbar(field.psi2, field) + field.p * field.psi1
    return max(_interior_max(first), _interior_max(second))


def closedness_residual(field: SpinorField2D) -> float:
    """Max interior defect of the three closedness conditions of the inducing forms."""
    _check_grid(field)
    c1, c2 = np.conj(field.psi1), np.conj(field.psi2)
    psi1, psi2 = field.psi1, field.psi2
    combos = (
        _d_dzbar(c1**2, field) + _d_dz(c2**2, field),
        _d_dzbar(psi2**2, field) + _d_dz(psi1**2, field),
        _d_dzbar(psi2 * c1, field) - _d_dz(psi1 * c2, field),
    )
    return max(_interior_max(c) for c in combos)


def _anchored_cumulative(values: np.ndarray, coords: np.ndarray, axis: int, anchor: int) -> np.ndarray:
    integral = cumulative_trapezoid(values, coords, axis=axis, initial=0.0)
    return integral - np.take(integral, [anchor], axis=axis)


def inducing_forms(field: SpinorField2D) -> tuple[np.ndarray, np.ndarray]:
    """dX/dx and dX/dy as (nx, ny, 3) arrays."""
    c1, c2 = np.conj(field.psi1), np.conj(field.psi2)
    w = field.psi2 * c1
    dz_dx = 2j * (c1**2 - c2**2)
    dz_dy = -2.0 * (c1**2 + c2**2)
    form_x = np.stack([dz_dx.real, dz_dx.imag, -4.0 * w.real], axis=-1)
    form_y = np.stack([dz_dy.real, dz_dy.imag, 4.0 * w.imag], axis=-1)
    return form_x, form_y


def integrate_patch(
    field: SpinorField2D,
    basepoint: tuple[int, int] = (0, 0),
    dirac_tol: float = DIRAC_TOL,
) -> SurfacePatch:
    """
    Integrate the inducing forms from basepoint by the composite trapezoid rule.

    The primary path runs along the basepoint row and then up the target
    column; the column-first path is integrated as well and the largest
    discrepancy is reported as path_independence_defect.
    """
    residual = dirac_residual(field)
    if residual > dirac_tol:
        raise DiracResidualError(f"Dirac residual {residual:.3e} exceeds {dirac_tol:.3e}")
    i0, j0 = basepoint
    form_x, form_y = inducing_forms(field)

    row_first = (
        _anchored_cumulative(form_x[:, j0, :], field.x, 0, i0)[:, None, :]
        + _anchored_cumulative(form_y, field.y, 1, j0)
    )
    column_first = (
        _anchored_cumulative(form_y[i0, :, :], field.y, 0, j0)[None, :, :]
        + _anchored_cumulative(form_x, field.x, 0, i0)
    )
    defect = float(np.max(np.abs(row_first - column_first)))
    logger.debug("patch %dx%d integrated, path defect %.3e", *field.shape, defect)
    return SurfacePatch(X=row_first, path_independence_defect=defect)


def _area_element(field: SpinorField2D, X: np.ndarray) -> np.ndarray:
    Xx = np.gradient(X, field.x, axis=0, edge_order=2)
    Xy = np.gradient(X, field.y, axis=1, edge_order=2)
    return np.linalg.norm(np.cross(Xx, Xy), axis=-1)


def induced_geometry(field: SpinorField2D, patch: SurfacePatch, u_min: float = U_MIN) -> SurfacePatch:
    """Attach u, H = p/u, K = -Laplace(log u)/(4u^2) and the first fundamental form defect."""
    u = np.abs(field.psi1) ** 2 + np.abs(field.psi2) ** 2
    if u.min() < u_min:
        raise DegenerateImmersionError(f"conformal factor drops to {u.min():.3e} < {u_min:.1e}")
    log_u = np.log(u)
    laplacian = np.gradient(np.gradient(log_u, field.x, axis=0, edge_order=2), field.x, axis=0, edge_order=2)
    laplacian += np.gradient(np.gradient(log_u, field.y, axis=1, edge_order=2), field.y, axis=1, edge_order=2)

    Xx = np.gradient(patch.X, field.x, axis=0, edge_order=2)
    Xy = np.gradient(patch.X, field.y, axis=1, edge_order=2)
    metric = 4.0 * u**2
    defect = max(
        np.max(np.abs(np.sum(Xx * Xx, axis=-1) - metric)),
        np.max(np.abs(np.sum(Xy * Xy, axis=-1) - metric)),
        np.max(np.abs(np.sum(Xx * Xy, axis=-1))),
    ) / metric.max()
    return replace(patch, u=u, H=field.p / u, K=-laplacian / (4.0 * u**2), metric_defect=float(defect))


def willmore_density_check(field: SpinorField2D, patch: SurfacePatch) -> tuple[float, float]:
    """Returns (4 int p^2 dx dy, int H^2 dmu) with dmu the area element of the integrated patch."""
    flat = 4.0 * trapezoid(trapezoid(field.p**2, field.y, axis=1), field.x)
    u = np.abs(field.psi1) ** 2 + np.abs(field.psi2) ** 2
    density = (field.p / u) ** 2 * _area_element(field, patch.X)
    curved = trapezoid(trapezoid(density, field.y, axis=1), field.x)
    return float(flat), float(curved)


def recover_potential(field: SpinorField2D) -> tuple[np.ndarray, np.ndarray]:
    """
    p recovered from the Kenmotsu data f = i conj(psi1)/psi2, phi = i psi2^2, in two forms:

        -phi f_zbar / (|phi| (1 + |f|^2))   reproduces p,
        -(conj(f) conj(phi))_z / |phi|       equals p (|psi2|^2 - |psi1|^2) / |psi2|^2.
    """
    f = 1j * np.conj(field.psi1) / field.psi2
    phi = 1j * field.psi2**2
    recovered = -phi * _d_dzbar(f, field) / (np.abs(phi) * (1.0 + np.abs(f) ** 2))
    conjugate_form = -_d_dz(np.conj(f) * np.conj(phi), field) / np.abs(phi)
    return recovered.real, conjugate_form.real


def to_kenmotsu(field: SpinorField2D, chart_threshold: float = CHART_THRESHOLD) -> KenmotsuData:
    """
    f = i conj(psi1)/psi2 and phi = i psi2^2, with the compatibility residual of
    (log phi)_zbar = -2 conj(f) f_zbar / (1 + |f|^2) and the round trip through recover_potential.
    """
    _check_grid(field)
    smallest = float(np.min(np.abs(field.psi2)))
    if smallest < chart_threshold:
        raise ChartError(f"|psi2| drops to {smallest:.3e}; Kenmotsu chart undefined")
    f = 1j * np.conj(field.psi1) / field.psi2
    phi = 1j * field.psi2**2
    compatibility = _d_dzbar(phi, field) / phi + 2.0 * np.conj(f) * _d_dzbar(f, field) / (1.0 + np.abs(f) ** 2)
    recovered, conjugate_form = recover_potential(field)
    return KenmotsuData(
        f=f,
        phi=phi,
        compatibility_residual=_interior_max(compatibility),
        recovered_p=recovered,
        recovery_defect=_interior_max(recovered - field.p),
        conjugate_form=conjugate_form,
    )


# --------------------------------------------------------------
# Solution families
# --------------------------------------------------------------


def _grid(x_range, y_range, nx, ny):
    x = np.linspace(*x_range, nx)
    y = np.linspace(*y_range, ny)
    return x, y, *np.meshgrid(x, y, indexing="ij")


def minimal_field(nx: int = 33, ny: int = 33, extent: float = 1.0) -> SpinorField2D:
    """psi1 = 1, psi2 = z, p = 0 on [-extent, extent]^2 (an Enneper-type minimal patch)."""
    x, y, X, Y = _grid((-extent, extent), (-extent, extent), nx, ny)
    z = X + 1j * Y
    return SpinorField2D(x=x, y=y, psi1=np.ones_like(z), psi2=z, p=np.zeros_like(X))


def constant_field(nx: int = 9, ny: int = 9) -> SpinorField2D:
    """psi1 = 0, psi2 = 1, p = 0."""
    x, y, X, _ = _grid((0.0, 1.0), (0.0, 1.0), nx, ny)
    return SpinorField2D(x=x, y=y, psi1=np.zeros(X.shape, complex), psi2=np.ones(X.shape, complex), p=np.zeros_like(X))


def clifford_field(
    nx: int = 129,
    ny: int = 129,
    x_range: tuple[float, float] = (0.0, 2.0 * np.pi),
    y_range: tuple[float, float] = (0.0, 2.0 * np.pi),
) -> SpinorField2D:
    """Revolution ansatz psi1 = r(x) e^{iy/2}, psi2 = s(x) e^{iy/2} with the Clifford spinor."""
    x, y, X, Y = _grid(x_range, y_range, nx, ny)
    r, s = clifford_spinor(X)
    phase = np.exp(0.5j * Y)
    return SpinorField2D(x=x, y=y, psi1=r * phase, psi2=s * phase, p=clifford_potential(X))
