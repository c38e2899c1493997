"""Numerical tolerances and default budgets, collected in one place.

All feasibility and incidence comparisons in the geometry layer use
FEASIBILITY_TOL as an absolute slack.  Unit-vector checks use UNIT_TOL.
Changing these values changes the meaning of every containment predicate,
so they are module constants rather than per-call parameters.
"""

# Absolute slack for halfspace feasibility, vertex incidence and
# point-membership comparisons.
FEASIBILITY_TOL = 1e-9

# Maximum deviation of a direction vector's norm from 1.
UNIT_TOL = 1e-12

# Angular resolution of circle quadrature (d = 2 spherical integrals).
CIRCLE_QUADRATURE_NODES = 4096

# Direction count for Monte Carlo spherical integrals in d = 3.
SPHERE_MC_DIRECTIONS = 1_000_000

# Rejection sampling gives up after this many proposals per requested point.
REJECTION_CAP = 1_000_000

# Window radius default: choose R with exp(-mass * R^(a+1)/(a+1)) below this.
WINDOW_TAIL_PROB = 1e-6
