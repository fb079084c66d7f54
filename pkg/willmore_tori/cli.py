"""
Command-line front end.

    python -m willmore_tori clifford   --n 512 --out-mesh clifford.obj --out-csv clifford.csv
    python -m willmore_tori flow       --init clifford --t-final 1 --out-csv flow.csv
    python -m willmore_tori revolve    --alpha -0.03125
    python -m willmore_tori bound-scan --alpha-min 1e-4 --alpha-max 100 --alpha-count 50
    python -m willmore_tori mesh       --out-mesh torus.obj

Exit codes: 0 pass, 1 I/O failure, 2 tolerance or verdict failure, 3 numerical instability.
"""

import argparse
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable

import numpy as np

from .config import RunConfig, load_config
from .elliptic import EllipticModulus, f_minimum, f_of_k, solve_two_E_equals_F
from .errors import BlowUpError, DomainError, InstabilityError, NonPeriodicTrajectoryError, WillmoreToriError
from .export import check_writable, read_profile_csv, write_csv, write_obj
from .mkdv import FlowState, evolve, traveling_speed
from .profile import PeriodicProfile
from .revolution import (
    ClosureVerdict,
    build_revolution_mesh,
    metric_identity_residual,
    monodromy,
    periodic_trajectory,
    torus_closure_test,
    willmore_energy,
)
from .willmore import (
    BOUND_CSV_HEADER,
    CLIFFORD_ENERGY,
    ProfileBranch,
    QuarticCoeffs,
    bound_verdict,
    clifford_fixture,
    clifford_trajectory,
    clifford_potential_derivative,
    delta0,
    euler_lagrange_residual,
    lax_invariant,
    periodic_conformal_factor,
    schrodinger_residual,
    stationary_profile,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_IO, EXIT_TOLERANCE, EXIT_INSTABILITY = 0, 1, 2, 3


def status(ok: bool, message: str) -> bool:
    print(f"{'✅' if ok else '❌'} {message}")
    return ok


def warn(message: str) -> None:
    print(f"⚠️  {message}")


# --------------------------------------------------------------
# Commands
# --------------------------------------------------------------


def cmd_clifford(config: RunConfig) -> int:
    tol = config.tolerances()
    p, u, _, _ = clifford_fixture(config.n)
    print(f"🍩 Clifford torus, N = {config.n}")
    print("=" * 60)

    W = willmore_energy(p)
    passed = status(abs(W - CLIFFORD_ENERGY) <= tol.clifford_energy, f"W = {W:.10f} (2π² = {CLIFFORD_ENERGY:.10f})")

    res_el, a_const, a_var, res_flow = euler_lagrange_residual(p, u)
    passed &= status(res_el <= tol.residual, f"Euler-Lagrange residual {res_el:.3e}")
    passed &= status(a_var <= tol.residual, f"a = {a_const:.12f}, variation {a_var:.3e} (flow form residual {res_flow:.3e})")
    res_schrodinger, excluded = schrodinger_residual(p, u)
    passed &= status(res_schrodinger <= tol.schrodinger, f"Schrödinger residual {res_schrodinger:.3e} ({100 * excluded:.1f}% of nodes excluded)")
    quartic = QuarticCoeffs.clifford()
    res_quartic = float(np.max(np.abs(clifford_potential_derivative(p.x) ** 2 - quartic(p.samples))))
    passed &= status(res_quartic <= tol.residual, f"quartic first integral residual {res_quartic:.3e}")

    traj = clifford_trajectory(config.n)
    closure = torus_closure_test(traj)
    passed &= status(abs(closure.closure_integral) <= tol.closure, f"closure integral {closure.closure_integral:.3e} -> {closure.verdict.value}")
    res_metric = metric_identity_residual(traj)
    passed &= status(res_metric <= tol.identity, f"metric identity residual {res_metric:.3e}")

    if config.n >= 32:
        coarse_p, coarse_u, _, _ = clifford_fixture(config.n // 2)
        coarse = euler_lagrange_residual(coarse_p, coarse_u, method="central2")[0]
        fine = euler_lagrange_residual(p, u, method="central2")[0]
        print(f"📉 second-order check: EL residual {coarse:.3e} (N={config.n // 2}) -> {fine:.3e} (N={config.n}), ratio {coarse / fine:.2f}")

    if config.out_mesh:
        mesh = build_revolution_mesh(traj, config.ny)
        write_obj(config.out_mesh, mesh.vertices)
        print(f"💾 mesh with {mesh.vertex_count} vertices written to {config.out_mesh}")
    if config.out_csv:
        rows = [
            ["W", W],
            ["euler_lagrange", res_el],
            ["a_const", a_const],
            ["a_variation", a_var],
            ["schrodinger", res_schrodinger],
            ["quartic", res_quartic],
            ["closure_integral", closure.closure_integral],
            ["metric_identity", res_metric],
        ]
        write_csv(config.out_csv, ["quantity", "value"], rows)
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_TOLERANCE


def random_profile(n: int, seed: int, modes: int = 4, amplitude: float = 0.5) -> PeriodicProfile:
    """A smooth real profile with random coefficients on the lowest Fourier modes."""
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(n // 2 + 1, dtype=complex)
    coeffs[1 : modes + 1] = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    samples = np.fft.irfft(coeffs, n)
    return PeriodicProfile(amplitude * samples / np.max(np.abs(samples)))


def initial_state(config: RunConfig) -> FlowState:
    if config.init == "clifford":
        p, _, r, s = clifford_fixture(config.n)
        v = p.with_samples(4.0 * p.samples)
        return FlowState(v=v, r=r, s=s) if config.spinor else FlowState(v=v)
    if config.init == "zero":
        return FlowState(v=PeriodicProfile(np.zeros(config.n)))
    if config.init == "noise":
        return FlowState(v=random_profile(config.n, config.seed))
    v = PeriodicProfile(read_profile_csv(config.init))
    if config.spinor:
        try:
            traj = periodic_trajectory(v)
            if traj.periods == 1:
                r, s = traj.component_profiles()
                return FlowState(v=v, r=r, s=s)
            warn(f"spinor closes after {traj.periods} periods only; evolving v alone")
        except (NonPeriodicTrajectoryError, BlowUpError) as exc:
            warn(f"no periodic spinor for this profile ({exc}); evolving v alone")
    return FlowState(v=v)


def cmd_flow(config: RunConfig) -> int:
    tol = config.tolerances()
    state = initial_state(config)
    print(f"🌊 mKdV flow from '{config.init}', N = {state.v.n}, t = {config.t_final}, {config.mode}")
    print("=" * 60)
    final, report = evolve(state, dt=config.dt, t_final=config.t_final, mode=config.mode)

    passed = status(report.W_drift <= tol.drift, f"W drift {report.W_drift:.3e} (W = {report.W[0]:.10f})")
    if state.has_spinor:
        passed &= status(report.closure_drift <= tol.drift, f"closure integral drift {report.closure_drift:.3e}")
        passed &= status(report.max_dirac_residual <= tol.dirac, f"max Dirac residual of the co-evolved spinor {report.max_dirac_residual:.3e}")
    if config.init == "clifford" and final.t > 0.0:
        speed = traveling_speed(report.snapshots)
        passed &= status(abs(speed + 2.0) <= 2.0 * tol.speed, f"Clifford potential translates at speed {speed:.6f} (expected -2)")
        expected = state.v.shifted(2.0 * final.t)
        gap = float(np.max(np.abs(final.v.samples - expected.samples)))
        print(f"📏 max deviation from the translated initial profile {gap:.3e}")
    if config.out_csv:
        report.to_csv(config.out_csv)
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_revolve(config: RunConfig) -> int:
    if config.alpha is None:
        raise DomainError("revolve needs --alpha")
    tol = config.tolerances()
    alpha = config.alpha
    coeffs = QuarticCoeffs.alpha_family(alpha)
    profile = stationary_profile(coeffs, config.n)
    print(f"🔁 alpha = {alpha:g}: {profile.branch.value} potential, p in [{profile.p_min:.9f}, {profile.p_max:.9f}], T = {profile.period:.12f}")
    print("=" * 60)
    mono = monodromy(profile.v)
    print(f"🧭 monodromy {mono.kind.value}, trace {mono.trace:.12f}, Lax invariant {lax_invariant(coeffs):.6g}")

    passed = True
    row = {"alpha": alpha, "branch": profile.branch.value, "monodromy": mono.kind.value, "trace": mono.trace}
    if profile.branch is ProfileBranch.SIGN_DEFINITE:
        u, traj = periodic_conformal_factor(profile)
        report = delta0(profile, u)
        print(f"   delta_0 direct {report.direct:.12e}, parts {report.parts:.12e}, closed {report.closed:.12e}")
        passed &= status(report.agreement <= tol.delta0_agreement, f"delta_0 routes agree to {report.agreement:.2e}")
        closure = torus_closure_test(traj)
        no_torus = report.closed != 0.0 and closure.verdict is ClosureVerdict.CYLINDER
        passed &= status(no_torus, f"delta_0 = {report.closed:.6e} -> no torus (closure integral {closure.closure_integral:.6e}, pitch {closure.pitch:.6e})")
        row.update(delta0=report.closed, closure_integral=closure.closure_integral)
    if alpha > 0.0:
        verdict = bound_verdict(alpha, config.n)
        passed &= status(verdict.relative_gap <= tol.energy_routes, f"W = {verdict.W_elliptic:.10f} (elliptic) vs {verdict.W_quadrature:.10f} (quadrature)")
        passed &= status(verdict.exceeds, f"W > 2π² = {CLIFFORD_ENERGY:.6f}")
        row.update(W_elliptic=verdict.W_elliptic, W_quadrature=verdict.W_quadrature)
        try:
            traj = periodic_trajectory(profile.v)
            if traj.is_real:
                closure = torus_closure_test(traj)
                print(f"   spinor closes after {traj.periods} period(s): {closure.verdict.value}, closure integral {closure.closure_integral:.3e}")
                if config.out_mesh and closure.verdict is ClosureVerdict.TORUS:
                    write_obj(config.out_mesh, build_revolution_mesh(traj, config.ny).vertices)
            else:
                warn("only a complex Floquet spinor closes; the induced surface is not a torus of revolution")
        except NonPeriodicTrajectoryError as exc:
            warn(str(exc))
    if config.out_csv:
        write_csv(config.out_csv, list(row), [list(row.values())])
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_bound_scan(config: RunConfig) -> int:
    if config.alpha_min <= 0.0:
        raise DomainError("the bound scan covers alpha > 0 only")
    tol = config.tolerances()
    alphas = np.geomspace(config.alpha_min, config.alpha_max, config.alpha_count)
    print(f"📐 Willmore bound scan over {alphas.size} values of alpha in [{config.alpha_min:g}, {config.alpha_max:g}]")
    print("=" * 60)
    with ThreadPoolExecutor() as pool:
        verdicts = list(pool.map(partial(bound_verdict, N=config.n), alphas))

    f_min, ksq_min = f_minimum(config.f_grid)
    root = solve_two_E_equals_F()
    print(f"   f(1) = {f_of_k(EllipticModulus.from_k(1.0)):.12f}")
    print(f"   2E = F at k^2 = {root.ksq:.10f}")
    passed = status(f_min > math.pi / 4.0, f"min f = {f_min:.10f} at k^2 = {ksq_min:.6f} (π/4 = {math.pi / 4.0:.6f})")
    worst_gap = max(v.relative_gap for v in verdicts)
    passed &= status(worst_gap <= tol.energy_routes, f"energy routes agree to {worst_gap:.2e}")
    passed &= status(all(v.exceeds for v in verdicts), f"W > 2π² for all {len(verdicts)} values, smallest W = {min(v.W_elliptic for v in verdicts):.10f}")
    if config.out_csv:
        write_csv(config.out_csv, BOUND_CSV_HEADER, [v.csv_row() for v in verdicts])
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_mesh(config: RunConfig) -> int:
    if config.alpha is None:
        traj = clifford_trajectory(config.n)
        label = "Clifford torus"
    else:
        profile = stationary_profile(QuarticCoeffs.alpha_family(config.alpha), config.n)
        traj = periodic_trajectory(profile.v)
        label = f"alpha = {config.alpha:g}"
    mesh = build_revolution_mesh(traj, config.ny)
    print(f"🕸️  {label}: {mesh.vertex_count} vertices")
    rho_defect, height_defect = mesh.y_invariance_defects()
    print(f"   y-invariance defects: axis distance {rho_defect:.3e}, height {height_defect:.3e}")
    W = willmore_energy(traj.v.with_samples(traj.v.samples / 4.0), traj.periods)
    print(f"   mesh W = {mesh.willmore_energy():.8f}, profile W = {W:.8f}")
    if config.out_mesh:
        write_obj(config.out_mesh, mesh.vertices)
        print(f"💾 written to {config.out_mesh}")
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "clifford": cmd_clifford,
    "flow": cmd_flow,
    "revolve": cmd_revolve,
    "bound-scan": cmd_bound_scan,
    "mesh": cmd_mesh,
}


# --------------------------------------------------------------
# Entry point
# --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat KEY=value settings file")
    common.add_argument("--n", type=int, help="grid points per period")
    common.add_argument("--ny", type=int, help="mesh points around the axis")
    common.add_argument("--dt", type=float, help="time step of the flow")
    common.add_argument("--t-final", type=float, help="flow time")
    common.add_argument("--mode", choices=["integrating_factor", "explicit"], help="time stepping of the flow")
    common.add_argument("--alpha", type=float, help="alpha-family parameter")
    common.add_argument("--alpha-min", type=float)
    common.add_argument("--alpha-max", type=float)
    common.add_argument("--alpha-count", type=int)
    common.add_argument("--f-grid", type=int, help="grid size for the minimum of f")
    common.add_argument("--init", help="clifford, zero, noise or a CSV file of samples")
    common.add_argument("--spinor", action=argparse.BooleanOptionalAction, default=None, help="co-evolve the spinor")
    common.add_argument("--out-mesh", type=Path)
    common.add_argument("--out-csv", type=Path)
    common.add_argument("--tol-scale", type=float, help="factor applied to every tolerance")
    common.add_argument("--seed", type=int)
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="willmore_tori", description="Willmore tori of revolution and the mKdV hierarchy")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = {key: value for key, value in vars(args).items() if key not in ("command", "config", "verbose")}
    try:
        config = load_config(args.config, overrides)
        for path in (config.out_mesh, config.out_csv):
            if path is not None:
                check_writable(path)
        return COMMANDS[args.command](config)
    except OSError as exc:
        print(f"❌ I/O error: {exc}")
        return EXIT_IO
    except (InstabilityError, BlowUpError) as exc:
        print(f"❌ numerical instability: {exc}")
        for key, value in getattr(exc, "diagnostics", {}).items():
            print(f"   {key} = {value}")
        return EXIT_INSTABILITY
    except (WillmoreToriError, ValueError) as exc:
        print(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_TOLERANCE
