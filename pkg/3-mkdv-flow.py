import numpy as np

from willmore_tori.mkdv import FlowState, evolve, jk_functionals, traveling_speed
from willmore_tori.willmore import clifford_fixture

# --------------------------------------------------------------
# Clifford potential with its spinor
# --------------------------------------------------------------

p, _, r, s = clifford_fixture(256)
v = p.with_samples(4.0 * p.samples)
state = FlowState(v=v, r=r, s=s)

values, _ = jk_functionals(v, r, s, kmax=3)
print("🌊 mKdV flow of the Clifford potential")
print("=" * 50)
print("J_0..J_3 =", ", ".join(f"{value:.2e}" for value in values))

# --------------------------------------------------------------
# Evolve v and the spinor together
# --------------------------------------------------------------

final, report = evolve(state, t_final=1.0)
print(f"\nW drift:              {report.W_drift:.3e}")
print(f"closure drift:        {report.closure_drift:.3e}")
print(f"max Dirac residual:   {report.max_dirac_residual:.3e}")

# --------------------------------------------------------------
# The Clifford potential translates rigidly
# --------------------------------------------------------------

speed = traveling_speed(report.snapshots)
expected = state.v.shifted(2.0 * final.t)
print(f"\nspeed = {speed:.6f} (expected -2)")
print(f"max |v(t) - V(x + 2t)| = {np.max(np.abs(final.v.samples - expected.samples)):.3e}")

report.to_csv("clifford_flow.csv")
print("\n💾 Saved the conservation report to clifford_flow.csv")
