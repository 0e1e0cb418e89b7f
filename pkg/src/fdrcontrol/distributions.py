"""Scalar distribution kernels shared by every other module.

Standard-normal CDF/quantile (the common null marginal), the location-shift
family used for alternatives, and the Poisson-binomial pmf that powers all
exact error-rate evaluators under independence.

Thresholds are carried around in probability space wherever possible and
converted through the quantile only at comparison boundaries; the helpers
``threshold_from_upper_level`` / ``threshold_from_lower_level`` do that
conversion without catastrophic cancellation in the tails.
"""

import math

import numpy as np
from scipy import special

from ._validation import check_finite
from .exceptions import ParameterError

__all__ = [
    "std_normal_cdf",
    "std_normal_sf",
    "std_normal_quantile",
    "threshold_from_upper_level",
    "threshold_from_lower_level",
    "location_exceedance",
    "location_cdf",
    "poisson_binomial_pmf",
]


def std_normal_cdf(x):
    """Standard normal CDF. Accepts scalars or arrays; saturates at 0/1 for +-inf."""
    return special.ndtr(x)


def std_normal_sf(x):
    """Upper tail 1 - CDF, evaluated as CDF(-x) so tiny tails keep full precision."""
    return special.ndtr(np.negative(x))


def std_normal_quantile(p):
    """Inverse standard normal CDF.

    p must lie in [0, 1]; the endpoints map to the explicit -inf/+inf
    sentinels that the two-step procedures use as degenerate thresholds.
    """
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise ParameterError(f"probability must lie in [0, 1], got {p}")
    out = special.ndtri(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def threshold_from_upper_level(level):
    """The t with 1 - CDF(t) = level, computed in the upper tail (t = -quantile(level))."""
    q = std_normal_quantile(level)
    return -q if np.isscalar(q) else np.negative(q)


def threshold_from_lower_level(level):
    """The t with CDF(t) = level."""
    return std_normal_quantile(level)


def location_cdf(t, shift=0.0):
    """P{X < t} when X is standard normal shifted by ``shift``; t may be +-inf."""
    check_finite(shift, "shift")
    return std_normal_cdf(np.subtract(t, shift))


def location_exceedance(t, shift=0.0):
    """P{X >= t} when X is standard normal shifted by ``shift``; t may be +-inf."""
    check_finite(shift, "shift")
    return std_normal_cdf(np.subtract(shift, t))


def poisson_binomial_pmf(probs) -> np.ndarray:
    """Pmf of the number of successes among independent Bernoulli(probs[i]).

    Direct O(m^2) convolution recurrence; exact for the few-hundred sizes the
    evaluators need. Returns an array of length m + 1 summing to 1.
    """
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError("probs must be one-dimensional")
    if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr))):
        raise ParameterError("success probabilities must lie in [0, 1]")
    pmf = np.zeros(arr.size + 1, dtype=np.float64)
    pmf[0] = 1.0
    for i, p in enumerate(arr):
        head = pmf[: i + 2]
        head[1:] = head[1:] * (1.0 - p) + head[:-1] * p
        head[0] *= 1.0 - p
    return pmf
