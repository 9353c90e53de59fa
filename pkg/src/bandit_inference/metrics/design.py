"""Sample size and power of the two-proportion Wald test under equal allocation."""

import math

from scipy import stats

from ..core.rng import check_probability
from ..errors import DomainError


def _check_levels(alpha: float, power: float = 0.5) -> None:
    if not (0.0 < alpha < 1.0 and 0.0 < power < 1.0):
        raise DomainError("alpha and power must lie strictly between 0 and 1")


def required_sample_size(p1: float, p2: float, alpha: float = 0.05, power: float = 0.8) -> int:
    """Total participants for a two-sided Wald test with two equal arms.

    Per arm m = ceil((z_{1-alpha/2} + z_power)^2 (p1(1-p1) + p2(1-p2)) / (p1-p2)^2);
    the total is 2m.

    Raises:
        DomainError: If p1 == p2 or a level is outside (0, 1)
    """
    p1 = check_probability(p1, "p1")
    p2 = check_probability(p2, "p2")
    _check_levels(alpha, power)
    if p1 == p2:
        raise DomainError("sample size is unbounded when p1 == p2")
    z = stats.norm.ppf(1.0 - alpha / 2.0) + stats.norm.ppf(power)
    variance = p1 * (1.0 - p1) + p2 * (1.0 - p2)
    per_arm = math.ceil(z**2 * variance / (p1 - p2) ** 2)
    return 2 * per_arm


def ur_power(p1: float, p2: float, n: int, alpha: float = 0.05) -> float:
    """Normal-approximation power of the Wald test with n / 2 participants per arm."""
    p1 = check_probability(p1, "p1")
    p2 = check_probability(p2, "p2")
    _check_levels(alpha)
    if n < 2:
        raise DomainError("need at least one participant per arm")
    per_arm = n / 2.0
    se = math.sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / per_arm)
    if se == 0.0:
        return 1.0 if p1 != p2 else 0.0
    z = stats.norm.ppf(1.0 - alpha / 2.0)
    shift = abs(p1 - p2) / se
    return float(stats.norm.cdf(shift - z) + stats.norm.cdf(-shift - z))
