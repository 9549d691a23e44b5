"""
Bound calculators - closed-form tail bounds and expectation formulas

These feed the harness: predicted values come from the expectation
formulas, tolerances and trial counts from the tail bounds. All
exponential bounds are evaluated in log space and clamped to [0, 1].
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError

# Validity windows for the simplified upper-tail variants
THIRD_VARIANT_MAX_DELTA = 1.81
FOURTH_VARIANT_MAX_DELTA = 4.11
SAMPLING_MAX_EPSILON = 1.81

# Above this n the harmonic sum is accumulated with fsum instead of Fractions
EXACT_HARMONIC_LIMIT = 2000


@dataclass
class BoundQuery:
    """Inputs shared by the tail-bound calculators"""
    mu: float = 0.0
    delta: float = 0.0
    t: float = 0.0
    c: List[float] = field(default_factory=list)
    ab: List[Tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.mu < 0:
            raise InvalidParameterError(f"mu must be >= 0, got {self.mu}")
        if self.delta < 0:
            raise InvalidParameterError(f"delta must be >= 0, got {self.delta}")
        if self.t < 0:
            raise InvalidParameterError(f"t must be >= 0, got {self.t}")
        if any(ci < 0 for ci in self.c):
            raise InvalidParameterError(f"every c_i must be >= 0, got {self.c}")
        if any(a > b for a, b in self.ab):
            raise InvalidParameterError(f"every pair needs a_i <= b_i, got {self.ab}")


@dataclass(frozen=True)
class TrialPlan:
    """Trial count from the sampling lemma N >= 3/(eps^2 rho) ln(2/delta)"""
    epsilon: float
    confidence_delta: float
    rho: float
    n_trials: int


def _clamp_exp(log_value: float) -> float:
    """exp() of a log-space bound, clamped to [0, 1]"""
    if log_value >= 0:
        return 1.0
    return math.exp(log_value)


def chernoff_upper(q: BoundQuery, variant: str = 'classic') -> float:
    """
    Pr[X >= (1+delta) mu] for a sum of independent 0-1 variables

    Args:
        q: mu and delta (for power_of_two_R, the threshold R goes in q.t)
        variant: 'classic' (e^delta / (1+delta)^(1+delta))^mu,
            'third' exp(-mu delta^2 / 3) for delta <= 1.81,
            'fourth' exp(-mu delta^2 / 4) for delta <= 4.11,
            'power_of_two_R' 2^-R for R >= 2 e mu

    Returns:
        Bound in [0, 1]
    """
    mu, delta = q.mu, q.delta
    if variant == 'classic':
        return _clamp_exp(mu * (delta - (1 + delta) * math.log1p(delta)))
    if variant == 'third':
        if delta > THIRD_VARIANT_MAX_DELTA:
            raise InvalidParameterError(
                f"'third' variant holds for delta <= {THIRD_VARIANT_MAX_DELTA}, got {delta}")
        return _clamp_exp(-mu * delta * delta / 3)
    if variant == 'fourth':
        if delta > FOURTH_VARIANT_MAX_DELTA:
            raise InvalidParameterError(
                f"'fourth' variant holds for delta <= {FOURTH_VARIANT_MAX_DELTA}, got {delta}")
        return _clamp_exp(-mu * delta * delta / 4)
    if variant == 'power_of_two_R':
        big_r = q.t
        if big_r < 2 * math.e * mu:
            raise InvalidParameterError(
                f"'power_of_two_R' needs R >= 2e*mu = {2 * math.e * mu:.4f}, got R={big_r}")
        return _clamp_exp(-big_r * math.log(2))
    raise InvalidParameterError(f"Unknown Chernoff variant: {variant}")


def chernoff_lower(q: BoundQuery) -> float:
    """Pr[X <= (1-delta) mu] <= exp(-mu delta^2 / 2), 0 <= delta <= 1"""
    if q.delta > 1:
        raise InvalidParameterError(f"lower-tail bound needs delta <= 1, got {q.delta}")
    return _clamp_exp(-q.mu * q.delta * q.delta / 2)


def chernoff_two_sided(mu: float, delta: float) -> float:
    """Pr[|X - mu| >= delta mu] <= 2 exp(-mu delta^2 / 3), 0 <= delta <= 1.81"""
    chernoff_upper(BoundQuery(mu=mu, delta=delta), 'third')
    return min(1.0, 2 * math.exp(-mu * delta * delta / 3))


def chernoff_deviation(mu: float, eps: float) -> float:
    """
    Absolute deviation sqrt(3 mu ln(2/eps)) exceeded with probability <= eps

    Valid when eps >= 2 exp(-mu/3); below that the deviation would need
    delta > 1.81.
    """
    if not 0 < eps < 1:
        raise InvalidParameterError(f"eps must lie in (0, 1), got {eps}")
    if eps < 2 * math.exp(-mu / 3):
        raise InvalidParameterError(
            f"two-sided inversion needs eps >= 2exp(-mu/3) = {2 * math.exp(-mu / 3):.3g}")
    return math.sqrt(3 * mu * math.log(2 / eps))


def hoeffding(q: BoundQuery, form: str = 'symmetric') -> float:
    """
    Hoeffding/Azuma tail bound for sums with bounded increments

    symmetric:  exp(-t^2 / (2 sum c_i^2))
    asymmetric: exp(-2 t^2 / sum (b_i - a_i)^2)
    """
    if form == 'symmetric':
        if not q.c:
            raise InvalidParameterError("symmetric Hoeffding needs a nonempty c")
        denominator = 2 * math.fsum(ci * ci for ci in q.c)
        numerator = q.t * q.t
    elif form == 'asymmetric':
        if not q.ab:
            raise InvalidParameterError("asymmetric Hoeffding needs nonempty ab pairs")
        denominator = math.fsum((b - a) ** 2 for a, b in q.ab)
        numerator = 2 * q.t * q.t
    else:
        raise InvalidParameterError(f"Unknown Hoeffding form: {form}")
    return _ratio_bound(numerator, denominator, q.t)


def mcdiarmid(q: BoundQuery) -> float:
    """Bounded-differences bound exp(-2 t^2 / sum c_i^2)"""
    if not q.c:
        raise InvalidParameterError("McDiarmid needs a nonempty c")
    return _ratio_bound(2 * q.t * q.t, math.fsum(ci * ci for ci in q.c), q.t)


def _ratio_bound(numerator: float, denominator: float, t: float) -> float:
    if t == 0:
        return 1.0
    if denominator == 0:
        raise InvalidParameterError("all increment bounds are zero but t > 0")
    return _clamp_exp(-numerator / denominator)


def trials_needed(epsilon: float, confidence_delta: float, rho: float) -> TrialPlan:
    """
    Sampling-lemma trial count for relative error epsilon

    Sampling N >= 3/(eps^2 rho) ln(2/delta) times estimates a hit rate of
    at least rho within relative error eps with probability >= 1 - delta.
    """
    if not 0 < epsilon <= SAMPLING_MAX_EPSILON:
        raise InvalidParameterError(f"epsilon must lie in (0, {SAMPLING_MAX_EPSILON}], got {epsilon}")
    if not 0 < confidence_delta < 1:
        raise InvalidParameterError(f"confidence_delta must lie in (0, 1), got {confidence_delta}")
    if not 0 < rho <= 1:
        raise InvalidParameterError(f"rho must lie in (0, 1], got {rho}")
    n_trials = math.ceil(3.0 / (epsilon * epsilon * rho) * math.log(2.0 / confidence_delta))
    return TrialPlan(epsilon=epsilon, confidence_delta=confidence_delta, rho=rho,
                     n_trials=max(1, n_trials))


def kuw_expected_rounds(a: float, n: float, mu_fn: Callable[[float], float],
                        rel_tol: float = 1e-6) -> float:
    """
    Upper bound on expected rounds for a process shrinking from n to a

    Evaluates the integral of 1/mu(t) over (a, n]. The range is split at
    integer breakpoints so ceil()-style step functions are integrated
    exactly piece by piece.
    """
    if not a < n:
        raise InvalidParameterError(f"need a < n, got a={a}, n={n}")
    breakpoints = [a] + [float(k) for k in range(math.floor(a) + 1, math.ceil(n))] + [n]
    total = 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        for probe in (hi, (lo + hi) / 2):
            if mu_fn(probe) <= 0:
                raise InvalidParameterError(f"mu must be positive on (a, n]; mu({probe}) <= 0")
        value, _ = integrate.quad(lambda x: 1.0 / mu_fn(x), lo, hi,
                                  epsrel=rel_tol * 1e-2, epsabs=0.0, limit=200)
        total += value
    return total


def harmonic_exact(n: int) -> Fraction:
    """H_n as an exact rational"""
    if n < 1:
        raise InvalidParameterError(f"harmonic number needs n >= 1, got {n}")
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def harmonic(n: int) -> float:
    """H_n = sum 1/i, exact rational summation for moderate n and fsum beyond"""
    if n < 1:
        raise InvalidParameterError(f"harmonic number needs n >= 1, got {n}")
    if n <= EXACT_HARMONIC_LIMIT:
        return float(harmonic_exact(n))
    return math.fsum(1.0 / np.arange(1, n + 1, dtype=np.float64))


def coupon_collector_expectation(n: int) -> float:
    """Expected draws to see all n coupons, n H_n"""
    return float(n * harmonic_exact(n)) if n <= EXACT_HARMONIC_LIMIT else n * harmonic(n)
