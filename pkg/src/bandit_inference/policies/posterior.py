"""Posterior probability that arm 1 has the higher mean under Beta posteriors."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, special

from ..errors import DomainError

QUAD_TOLERANCE = 1e-10

# Longest closed-form sum evaluated before switching to quadrature.
_MAX_SERIES_TERMS = 100_000

# Below this a Beta density or CDF has an unbounded derivative at 0 or 1.
_SMOOTH_ENDPOINT_PARAM = 2.0


@dataclass(frozen=True)
class BetaParams:
    """Parameters of a Beta distribution."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"Beta {name} must be positive and finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def std(self) -> float:
        total = self.alpha + self.beta
        return math.sqrt(self.alpha * self.beta / (total * total * (total + 1.0)))


def _prob_b_beats_a(a_alpha: float, a_beta: float, b_alpha: int, b_beta: float) -> float:
    """P(X_B > X_A) by the finite sum over the integer ``b_alpha``."""
    i = np.arange(b_alpha, dtype=np.float64)
    log_terms = (
        special.betaln(a_alpha + i, a_beta + b_beta)
        - np.log(b_beta + i)
        - special.betaln(1.0 + i, b_beta)
        - special.betaln(a_alpha, a_beta)
    )
    return float(np.exp(log_terms).sum())


def _series_prob(a1: float, b1: float, a2: float, b2: float) -> Optional[float]:
    """Closed form for P(theta1 > theta2) when one parameter is an integer.

    Four equivalent sums exist, one per parameter (by exchanging arms and by
    reflecting x -> 1 - x); the shortest one with an integer index is used.
    Returns ``None`` when no parameter is an integer within the series limit.
    """
    candidates = []
    if a1.is_integer():
        candidates.append((a1, lambda: _prob_b_beats_a(a2, b2, int(a1), b1)))
    if a2.is_integer():
        candidates.append((a2, lambda: 1.0 - _prob_b_beats_a(a1, b1, int(a2), b2)))
    if b2.is_integer():
        candidates.append((b2, lambda: _prob_b_beats_a(b1, a1, int(b2), a2)))
    if b1.is_integer():
        candidates.append((b1, lambda: 1.0 - _prob_b_beats_a(b2, a2, int(b1), a1)))
    candidates = [c for c in candidates if c[0] <= _MAX_SERIES_TERMS]
    if not candidates:
        return None
    _, evaluate = min(candidates, key=lambda c: c[0])
    return evaluate()


def _split_exponent(exponent: float) -> Tuple[float, int]:
    """Write ``exponent`` as ``r + k`` with integer ``k >= 0`` and ``-1 < r < 1``."""
    if exponent < 0.0:
        return exponent, 0
    whole = math.floor(exponent)
    return exponent - whole, int(whole)


def _weighted_quadrature_prob(a1: float, b1: float, a2: float, b2: float) -> float:
    """Quadrature for posteriors whose densities or CDFs are singular at 0 or 1.

    The integral is split at 1/2. Near 0 the integrand is x^(a1 + a2 - 1) times an
    analytic factor, and near 1 it is (1 - x)^(b1 + b2 - 1) times an analytic factor,
    so each half is integrated with the algebraic factor as a QAWS weight.
    """
    mid = 0.5
    log_norm2 = special.betaln(a2, b2)
    log_norm1 = special.betaln(a1, b1)

    low_frac, low_power = _split_exponent(a1 + a2 - 1.0)
    high_frac, high_power = _split_exponent(b1 + b2 - 1.0)

    # x^-(a1 + a2 - 1 - low_frac) * pdf2(x) * I_x(a1, b1)
    def lower(x: float) -> float:
        if x <= 0.0:
            return math.exp(-log_norm2 - log_norm1 - math.log(a1)) if low_power == 0 else 0.0
        tail = special.betainc(a1, b1, x)
        if tail <= 0.0:
            return 0.0
        log_value = (
            (low_power - a1) * math.log(x)
            + (b2 - 1.0) * math.log1p(-x)
            - log_norm2
            + math.log(tail)
        )
        return math.exp(log_value)

    # (1 - x)^-(b1 + b2 - 1 - high_frac) * pdf2(x) * (1 - I_x(a1, b1))
    def upper(x: float) -> float:
        if x >= 1.0:
            return math.exp(-log_norm2 - log_norm1 - math.log(b1)) if high_power == 0 else 0.0
        tail = special.betaincc(a1, b1, x)
        if tail <= 0.0:
            return 0.0
        log_value = (
            (high_power - b1) * math.log1p(-x)
            + (a2 - 1.0) * math.log(x)
            - log_norm2
            + math.log(tail)
        )
        return math.exp(log_value)

    options = dict(epsabs=QUAD_TOLERANCE / 10, epsrel=QUAD_TOLERANCE / 10, limit=500)
    below, _ = integrate.quad(lower, 0.0, mid, weight="alg", wvar=(low_frac, 0.0), **options)
    above, _ = integrate.quad(upper, mid, 1.0, weight="alg", wvar=(0.0, high_frac), **options)
    return float(special.betainc(a2, b2, mid)) - below + above


def _quadrature_prob(a1: float, b1: float, a2: float, b2: float) -> float:
    """P(theta1 > theta2) = integral of pdf2(x) * (1 - I_x(a1, b1)) over [0, 1]."""
    if min(a1, b1, a2, b2) < _SMOOTH_ENDPOINT_PARAM:
        return _weighted_quadrature_prob(a1, b1, a2, b2)
    log_norm = special.betaln(a2, b2)

    def integrand(x: float) -> float:
        if x <= 0.0 or x >= 1.0:
            return 0.0
        log_pdf = (a2 - 1.0) * math.log(x) + (b2 - 1.0) * math.log1p(-x) - log_norm
        return math.exp(log_pdf) * special.betaincc(a1, b1, x)

    # Break points around the bulk of arm 2's posterior keep the adaptive rule on
    # the peak when the density is concentrated.
    post2 = BetaParams(a2, b2)
    points = sorted(
        {
            min(max(post2.mean + k * post2.std, 1e-12), 1.0 - 1e-12)
            for k in (-8.0, -3.0, 0.0, 3.0, 8.0)
        }
    )
    value, _ = integrate.quad(
        integrand,
        0.0,
        1.0,
        points=points,
        epsabs=QUAD_TOLERANCE,
        epsrel=QUAD_TOLERANCE,
        limit=500,
    )
    return value


def posterior_prob_optimal(
    post1: BetaParams, post2: BetaParams, method: str = "auto"
) -> float:
    """Probability that arm 1's mean exceeds arm 2's under independent Beta posteriors.

    This is the Thompson Sampling probability of assigning arm 1.

    Args:
        post1: Posterior of arm 1
        post2: Posterior of arm 2
        method: ``"auto"`` (closed form when a parameter is an integer, otherwise
            quadrature), ``"series"`` or ``"quad"``

    Returns:
        P(theta1 > theta2), in [0, 1]

    Raises:
        DomainError: If a parameter is not positive, or ``"series"`` is requested
            for non-integer parameters
    """
    if not isinstance(post1, BetaParams):
        post1 = BetaParams(*post1)
    if not isinstance(post2, BetaParams):
        post2 = BetaParams(*post2)
    a1, b1, a2, b2 = post1.alpha, post1.beta, post2.alpha, post2.beta

    if post1 == post2:
        return 0.5

    value: Optional[float] = None
    if method in ("auto", "series"):
        value = _series_prob(a1, b1, a2, b2)
        if value is None and method == "series":
            raise DomainError("closed-form evaluation needs at least one integer parameter")
    elif method != "quad":
        raise DomainError(f"unknown method '{method}'")
    if value is None:
        value = _quadrature_prob(a1, b1, a2, b2)
    return min(max(value, 0.0), 1.0)


def increment_gain(
    a1: np.ndarray, b1: np.ndarray, a2: np.ndarray, b2: np.ndarray
) -> np.ndarray:
    """g = B(a1 + a2, b1 + b2) / (B(a1, b1) B(a2, b2)), evaluated in log space."""
    return np.exp(
        special.betaln(a1 + a2, b1 + b2) - special.betaln(a1, b1) - special.betaln(a2, b2)
    )


def prob_after_unit_increment(
    prob: np.ndarray,
    params: Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    arms: np.ndarray,
    successes: np.ndarray,
) -> np.ndarray:
    """Update P(theta1 > theta2) after one parameter grows by exactly 1.

    With ``h = P(theta1 > theta2)`` and ``g`` from :func:`increment_gain` at the
    parameters before the increment:

    - alpha1 + 1: h + g / alpha1
    - beta1 + 1:  h - g / beta1
    - alpha2 + 1: h - g / alpha2
    - beta2 + 1:  h + g / beta2

    These identities hold for real-valued parameters.

    Args:
        prob: Current probabilities, shape (k,)
        params: (alpha1, beta1, alpha2, beta2) before the increment, each shape (k,)
        arms: Arm whose posterior grows (1 or 2), shape (k,)
        successes: Boolean mask, True when the alpha parameter grows

    Returns:
        Updated probabilities clipped to [0, 1]
    """
    a1, b1, a2, b2 = params
    gain = increment_gain(a1, b1, a2, b2)
    delta = np.where(
        arms == 1,
        np.where(successes, gain / a1, -gain / b1),
        np.where(successes, -gain / a2, gain / b2),
    )
    return np.clip(prob + delta, 0.0, 1.0)
