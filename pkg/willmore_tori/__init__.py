"""
Willmore tori of revolution from Dirac potentials.

Generalized Weierstrass surfaces, the mKdV hierarchy acting on Dirac
potentials, and elliptic-integral Willmore bounds for tori of revolution.
"""

from .elliptic import EllipticModulus, EnergyFamilyParams, energy_integral, f_minimum, f_of_k, solve_two_E_equals_F
from .errors import WillmoreToriError
from .mkdv import FlowState, evolve, mkdv_rhs
from .profile import PeriodicProfile
from .revolution import build_revolution_mesh, integrate_spinor, monodromy, periodic_trajectory, torus_closure_test, willmore_energy
from .weierstrass import SpinorField2D, induced_geometry, integrate_patch
from .willmore import QuarticCoeffs, bound_verdict, clifford_fixture, delta0, stationary_profile

__version__ = "0.1.0"

__all__ = [
    "EllipticModulus",
    "EnergyFamilyParams",
    "FlowState",
    "PeriodicProfile",
    "QuarticCoeffs",
    "SpinorField2D",
    "WillmoreToriError",
    "bound_verdict",
    "build_revolution_mesh",
    "clifford_fixture",
    "delta0",
    "energy_integral",
    "evolve",
    "f_minimum",
    "f_of_k",
    "induced_geometry",
    "integrate_patch",
    "integrate_spinor",
    "mkdv_rhs",
    "monodromy",
    "periodic_trajectory",
    "solve_two_E_equals_F",
    "stationary_profile",
    "torus_closure_test",
    "willmore_energy",
]
