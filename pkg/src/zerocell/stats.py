"""Small statistical helpers used by experiments and tests."""

from __future__ import annotations

import math


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def wilson_sigma(successes: int, trials: int) -> float:
    """Half-width of the z=1 Wilson interval; a robust binomial scale that
    stays positive at proportions 0 and 1."""
    lo, hi = wilson_interval(successes, trials, z=1.0)
    return 0.5 * (hi - lo)


def binomial_stderr(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


# Asymptotic Kolmogorov-Smirnov critical scale at the 1% level:
# sqrt(-ln(0.005) / 2).
KS_CRITICAL_1PCT = math.sqrt(-math.log(0.005) / 2.0)
