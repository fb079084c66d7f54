import math

import numpy as np

from willmore_tori.elliptic import EllipticModulus, f_minimum, f_of_k, solve_two_E_equals_F
from willmore_tori.revolution import torus_closure_test
from willmore_tori.willmore import (
    CLIFFORD_ENERGY,
    QuarticCoeffs,
    bound_verdict,
    case_split_check,
    delta0,
    periodic_conformal_factor,
    stationary_profile,
)

# --------------------------------------------------------------
# The bound function f(k) = I(k) / 2
# --------------------------------------------------------------

f_min, ksq_min = f_minimum()
root = solve_two_E_equals_F()

print("📐 Willmore bound for tori of revolution")
print("=" * 50)
print(f"min f = {f_min:.10f} at k^2 = {ksq_min:.6f} (pi/4 = {math.pi / 4.0:.10f})")
print(f"2E(k) = F(k) at k^2 = {root.ksq:.10f}")
print(f"f(1) = {f_of_k(EllipticModulus.from_k(1.0)):.10f}")

# --------------------------------------------------------------
# Sign-changing potentials: W > 2 pi^2 for alpha > 0
# --------------------------------------------------------------

print("\nalpha        k^2        W (elliptic)     W (quadrature)")
for alpha in np.geomspace(1e-3, 50.0, 8):
    verdict = bound_verdict(alpha, N=256)
    print(f"{alpha:<12.4g} {verdict.ksq:<10.6f} {verdict.W_elliptic:<16.10f} {verdict.W_quadrature:.10f}")
print(f"All above 2 pi^2 = {CLIFFORD_ENERGY:.6f}")

# --------------------------------------------------------------
# Sign-definite potentials: delta_0 > 0, so no torus
# --------------------------------------------------------------

profile = stationary_profile(QuarticCoeffs.alpha_family(-1.0 / 32.0), 256)
u, traj = periodic_conformal_factor(profile)
report = delta0(profile, u)
closure = torus_closure_test(traj)
print(f"\nalpha = -1/32: delta_0 = {report.closed:.6e}, 8 int rs dx = {8.0 * closure.closure_integral:.6e} -> {closure.verdict.value}")

# --------------------------------------------------------------
# Constants of the stationary quartic
# --------------------------------------------------------------

split = case_split_check()
print(f"\nc2 = {split.c2:g}, c1 = ±{abs(split.c1_roots[0]):.6f}, c0 = {split.c0:g} (Clifford: {split.matches_clifford})")
