"""zerocell: intersections of randomly translated sets and their Poisson limits.

The package samples the intersection body formed by translating a host set
by random interior points, realizes the limiting zero cell of a Poisson
hyperplane tessellation driven by the host's boundary geometry, and checks
the two against each other with closed forms and Monte Carlo estimates.
"""

__version__ = "0.1.0"

from . import boundary, experiments, geometry, intersections, sampling, stats  # noqa: F401
