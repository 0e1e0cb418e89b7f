"""Mixture-model analytics: posterior error rates, q-values, and Monte-Carlo
pFDR/pFNR estimation.

The closed forms are specialized to the two-point normal location mixture
(null at 0, alternative at delta, prior null weight pi0), the only case in
which the conditional error rates have desk-scale exact values. Under
independence the Monte-Carlo conditional rates match the posteriors exactly
in expectation; under positive dependence they can only fall below them.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_correlation, check_open_unit, check_positive_int, check_unit_interval
from .distributions import std_normal_cdf, std_normal_sf
from .exceptions import ParameterError, UndefinedConditionalRateError
from .metrics import exact_error_rates_from_probs
from .samplers import Seed, sample_mixture

__all__ = [
    "MixtureConfig",
    "ConditionalRate",
    "posterior_null_given_exceed",
    "posterior_null_given_accept",
    "posterior_alt_given_accept",
    "q_value",
    "estimate_pfdr_pfnr",
    "estimate_pfdr_for_thresholds",
    "mixture_fdr_bound",
]


@dataclass(frozen=True)
class MixtureConfig:
    """Two-point normal mixture: P{H_i = 0} = pi0, alternatives shifted by delta,
    one-factor correlation rho, single-step rejection threshold t."""

    n: int
    pi0: float
    delta: float
    rho: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_unit_interval(self.pi0, "pi0")
        check_correlation(self.rho)
        if not self.delta >= 0.0:
            raise ParameterError(f"delta must be nonnegative, got {self.delta}")
        if math.isnan(self.t):
            raise ParameterError("t must not be NaN")


@dataclass(frozen=True)
class ConditionalRate:
    """Monte-Carlo estimate of a conditional rate with its standard error and
    the number of iterations in which the conditioning event occurred."""

    estimate: float
    standard_error: float
    conditioning_count: int


def _check_posterior_cfg(cfg: MixtureConfig):
    check_open_unit(cfg.pi0, "pi0")


def posterior_null_given_exceed(cfg: MixtureConfig, t: float = None) -> float:
    """P{H = 0 | X >= t} for one coordinate of the mixture."""
    _check_posterior_cfg(cfg)
    t = cfg.t if t is None else t
    if t == math.inf:
        raise ParameterError("posterior given exceedance is undefined at t = +inf")
    null_tail = cfg.pi0 * std_normal_sf(t)
    alt_tail = (1.0 - cfg.pi0) * std_normal_sf(t - cfg.delta)
    return float(null_tail / (null_tail + alt_tail))


def posterior_null_given_accept(cfg: MixtureConfig, t: float = None) -> float:
    """P{H = 0 | X < t}."""
    _check_posterior_cfg(cfg)
    t = cfg.t if t is None else t
    if t == -math.inf:
        raise ParameterError("posterior given acceptance is undefined at t = -inf")
    null_head = cfg.pi0 * std_normal_cdf(t)
    alt_head = (1.0 - cfg.pi0) * std_normal_cdf(t - cfg.delta)
    return float(null_head / (null_head + alt_head))


def posterior_alt_given_accept(cfg: MixtureConfig, t: float = None) -> float:
    """P{H = 1 | X < t}; the conditional miss rate of a single acceptance."""
    return 1.0 - posterior_null_given_accept(cfg, t)


def q_value(cfg: MixtureConfig, lookback: float = 20.0, step: float = 1e-3) -> float:
    """inf over x <= t of P{H = 0 | X >= x}.

    A bounded grid search (down to t - lookback, then a fine pass around the
    argmin) rather than a monotonicity assumption; for the normal location
    family the posterior is decreasing in x, so the infimum lands at t itself
    and the grid simply confirms it.
    """
    _check_posterior_cfg(cfg)
    t = cfg.t
    if t == math.inf:
        raise ParameterError("q-value is undefined at t = +inf")
    if math.isfinite(t):
        grid = np.append(np.arange(t - lookback, t, step), t)  # never evaluate above t
    else:
        grid = np.array([t])
    null_tail = cfg.pi0 * std_normal_sf(grid)
    alt_tail = (1.0 - cfg.pi0) * std_normal_sf(grid - cfg.delta)
    post = null_tail / (null_tail + alt_tail)
    best = int(np.argmin(post))
    coarse = float(post[best])
    if not math.isfinite(t):
        return coarse
    lo = max(t - lookback, grid[best] - step)
    hi = min(t, grid[best] + step)
    fine = np.linspace(lo, hi, 2001)
    null_tail = cfg.pi0 * std_normal_sf(fine)
    alt_tail = (1.0 - cfg.pi0) * std_normal_sf(fine - cfg.delta)
    refined = float(np.min(null_tail / (null_tail + alt_tail)))
    return min(coarse, refined, posterior_null_given_exceed(cfg))


def _conditional_rate(values: list) -> ConditionalRate:
    count = len(values)
    if count == 0:
        raise UndefinedConditionalRateError("the conditioning event never occurred")
    arr = np.asarray(values)
    se = float(arr.std(ddof=1) / math.sqrt(count)) if count > 1 else math.nan
    return ConditionalRate(estimate=float(arr.mean()), standard_error=se, conditioning_count=count)


def estimate_pfdr_pfnr(cfg: MixtureConfig, iterations: int, seed: Seed):
    """Monte-Carlo (pFDR, pFNR) of the rule X_i >= t under the mixture model.

    Conditional means over the iterations with at least one rejection
    (resp. acceptance); standard errors are computed over those conditioning
    iterations only. Iteration i consumes substream seed.stream_id + i.
    """
    check_positive_int(iterations, "iterations")
    fdps, fnps = [], []
    for i in range(iterations):
        draw = sample_mixture(cfg.n, cfg.pi0, cfg.delta, cfg.rho, seed.with_stream(seed.stream_id + i))
        rejected = draw.x >= cfg.t
        r = int(np.count_nonzero(rejected))
        if r > 0:
            v = int(np.count_nonzero(rejected & (draw.h == 0)))
            fdps.append(v / r)
        a = cfg.n - r
        if a > 0:
            t_cnt = int(np.count_nonzero(~rejected & (draw.h == 1)))
            fnps.append(t_cnt / a)
    return _conditional_rate(fdps), _conditional_rate(fnps)


def estimate_pfdr_for_thresholds(cfg: MixtureConfig, thresholds, iterations: int, seed: Seed):
    """Monte-Carlo pFDR at several thresholds on shared draws (common random numbers).

    Returns a list aligned with ``thresholds``; entries are None where the
    conditioning event never occurred.
    """
    check_positive_int(iterations, "iterations")
    ts = [float(t) for t in thresholds]
    per_threshold = [[] for _ in ts]
    for i in range(iterations):
        draw = sample_mixture(cfg.n, cfg.pi0, cfg.delta, cfg.rho, seed.with_stream(seed.stream_id + i))
        for j, t in enumerate(ts):
            rejected = draw.x >= t
            r = int(np.count_nonzero(rejected))
            if r > 0:
                v = int(np.count_nonzero(rejected & (draw.h == 0)))
                per_threshold[j].append(v / r)
    return [(_conditional_rate(vals) if vals else None) for vals in per_threshold]


def mixture_fdr_bound(cfg: MixtureConfig) -> float:
    """Upper bound on the mixture-model FDR: sum of per-hypothesis rejection
    terms times the posterior null probability (equality in the i.i.d. case,
    where it reduces to posterior * P{R > 0}). Independence only."""
    _check_posterior_cfg(cfg)
    if cfg.rho != 0.0:
        raise ParameterError("the exact mixture FDR bound requires rho = 0; use Monte Carlo for dependence")
    marginal_exceed = cfg.pi0 * std_normal_sf(cfg.t) + (1.0 - cfg.pi0) * std_normal_sf(cfg.t - cfg.delta)
    probs = np.full(cfg.n, float(marginal_exceed))
    rates = exact_error_rates_from_probs(probs, np.zeros(cfg.n, dtype=bool))
    posterior = posterior_null_given_exceed(cfg)
    return float(rates.rejection_terms.sum() * posterior)
