"""Outcome accounting and exact error-rate evaluators under independence.

The exact evaluators are valid only for independent statistics; dependent
configurations are handled exclusively by Monte Carlo in the simulation
module. Every exact FDR/FNR is computed along two algebraically equivalent
but numerically distinct routes and the function refuses to return if the
routes disagree:

  (a) the order-statistic route: per-hypothesis terms
      d_i = p_i * (1 - sum_{m=1}^{n-1} P{W_i >= m} / (m (m + 1))),
      where p_i = P{X_i >= t} and W_i counts how many of the other
      statistics exceed t (a Poisson-binomial variable);
  (b) the direct decomposition: sum over i of
      p_i * sum_m P{W_i = m} / (m + 1),
      i.e. conditioning on how many others are rejected alongside i.

The d_i terms (and their acceptance-side mirrors g_i) sum to P{R > 0}
(resp. P{A > 0}); those identities are asserted on every call and exposed
because the mixture analytics reuse the same terms.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_positive_int, check_unit_interval
from .distributions import location_cdf, location_exceedance, poisson_binomial_pmf, std_normal_cdf, std_normal_sf
from .exceptions import InternalConsistencyError, ParameterError
from .procedures import two_step_threshold_table
from .samplers import TruthAssignment

__all__ = [
    "OutcomeTable",
    "ExactErrorRates",
    "outcome_table",
    "fdp",
    "fnp",
    "exact_error_rates_from_probs",
    "exact_rates_for_shifts",
    "exact_fdr_independent",
    "exact_fnr_independent",
    "single_step_fdr_supremum",
    "single_step_fnr_supremum",
    "two_step_fdr_bound",
    "two_step_fdr_linear_bound",
    "two_step_fnr_bound",
    "power_from_rates",
]

# tolerance hierarchy: 1e-12 enumeration vs DP, 1e-10 analytic identities over n <= 50 terms
_IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class OutcomeTable:
    """Counts of one realized multiple test.

    false_discoveries: true nulls rejected; true_acceptances: true nulls accepted;
    true_discoveries: false nulls rejected; missed_discoveries: false nulls accepted.
    """

    false_discoveries: int
    true_acceptances: int
    true_discoveries: int
    missed_discoveries: int

    def __post_init__(self):
        for name in ("false_discoveries", "true_acceptances", "true_discoveries", "missed_discoveries"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")

    @property
    def rejections(self) -> int:
        return self.false_discoveries + self.true_discoveries

    @property
    def acceptances(self) -> int:
        return self.true_acceptances + self.missed_discoveries

    @property
    def true_null_count(self) -> int:
        return self.false_discoveries + self.true_acceptances

    @property
    def false_null_count(self) -> int:
        return self.true_discoveries + self.missed_discoveries

    @property
    def total(self) -> int:
        return self.rejections + self.acceptances


def outcome_table(rejected, truth: TruthAssignment) -> OutcomeTable:
    """Cross-tabulate a rejected index set against the truth assignment."""
    rejected = np.asarray(rejected, dtype=np.intp)
    if rejected.size:
        if rejected.min() < 0 or rejected.max() >= truth.n:
            raise ParameterError("rejected indices out of range")
        if np.unique(rejected).size != rejected.size:
            raise ParameterError("rejected indices must be distinct")
    mask = np.zeros(truth.n, dtype=bool)
    mask[rejected] = True
    nulls = truth.null_mask()
    v = int(np.count_nonzero(mask & nulls))
    s = int(np.count_nonzero(mask & ~nulls))
    return OutcomeTable(
        false_discoveries=v,
        true_acceptances=truth.n0 - v,
        true_discoveries=s,
        missed_discoveries=truth.n1 - s,
    )


def fdp(table: OutcomeTable) -> float:
    """Realized false discovery proportion; 0 when nothing is rejected."""
    r = table.rejections
    return table.false_discoveries / r if r > 0 else 0.0


def fnp(table: OutcomeTable) -> float:
    """Realized false nondiscovery proportion; 0 when nothing is accepted."""
    a = table.acceptances
    return table.missed_discoveries / a if a > 0 else 0.0


def power_from_rates(fdr: float, fnr: float) -> float:
    """1 - fdr - fnr; may be negative, which flags a biased procedure."""
    check_unit_interval(fdr, "fdr")
    check_unit_interval(fnr, "fnr")
    return 1.0 - fdr - fnr


@dataclass(frozen=True)
class ExactErrorRates:
    """Exact single-step error rates plus the per-hypothesis decomposition terms."""

    fdr: float
    fnr: float
    p_any_rejection: float
    p_any_acceptance: float
    rejection_terms: np.ndarray
    acceptance_terms: np.ndarray


def exact_error_rates_from_probs(exceed_probs, null_mask) -> ExactErrorRates:
    """Exact FDR/FNR of the rule X_i >= t from marginal exceedance probabilities.

    exceed_probs[i] = P{X_i >= t}; null_mask[i] marks true nulls. Statistics
    must be independent. Raises InternalConsistencyError if the two internal
    routes (order-statistic vs direct decomposition) drift apart.
    """
    p = np.asarray(exceed_probs, dtype=np.float64)
    nulls = np.asarray(null_mask, dtype=bool)
    if p.shape != nulls.shape or p.ndim != 1 or p.size == 0:
        raise ParameterError("exceed_probs and null_mask must be equal-length 1-D arrays")
    if np.any(p < 0.0) or np.any(p > 1.0) or np.any(np.isnan(p)):
        raise ParameterError("exceedance probabilities must lie in [0, 1]")
    n = p.size
    q = 1.0 - p

    delta = np.empty(n)
    gamma = np.empty(n)
    fdr_direct = fnr_direct = 0.0
    inv_weights = 1.0 / (np.arange(1, n) * np.arange(2, n + 1))  # 1/(m(m+1)), m = 1..n-1
    inv_counts = 1.0 / np.arange(1, n + 1)  # 1/(m+1), m = 0..n-1
    for i in range(n):
        others = np.delete(p, i)
        pmf_above = poisson_binomial_pmf(others)  # counts of other exceedances, length n
        pmf_below = pmf_above[::-1]
        # upper-tail sums P{W >= m} for m = 1..n-1 (and mirror for below-counts)
        tail_above = np.cumsum(pmf_above[::-1])[::-1]
        tail_below = np.cumsum(pmf_below[::-1])[::-1]
        if n > 1:
            delta[i] = p[i] * (1.0 - np.dot(tail_above[1:], inv_weights))
            gamma[i] = q[i] * (1.0 - np.dot(tail_below[1:], inv_weights))
        else:
            delta[i] = p[i]
            gamma[i] = q[i]
        fdr_i = p[i] * np.dot(pmf_above, inv_counts)
        fnr_i = q[i] * np.dot(pmf_below, inv_counts)
        if nulls[i]:
            fdr_direct += fdr_i
        else:
            fnr_direct += fnr_i

    fdr_orderstat = float(delta[nulls].sum())
    fnr_orderstat = float(gamma[~nulls].sum())
    p_any_rejection = float(1.0 - np.prod(q))
    p_any_acceptance = float(1.0 - np.prod(p))

    checks = [
        ("fdr routes", fdr_orderstat, fdr_direct),
        ("fnr routes", fnr_orderstat, fnr_direct),
        ("sum of rejection terms vs P{R>0}", float(delta.sum()), p_any_rejection),
        ("sum of acceptance terms vs P{A>0}", float(gamma.sum()), p_any_acceptance),
    ]
    for name, a, b in checks:
        if abs(a - b) > _IDENTITY_TOL:
            raise InternalConsistencyError(f"{name} disagree: {a!r} vs {b!r}")

    return ExactErrorRates(
        fdr=float(fdr_direct),
        fnr=float(fnr_direct),
        p_any_rejection=p_any_rejection,
        p_any_acceptance=p_any_acceptance,
        rejection_terms=delta,
        acceptance_terms=gamma,
    )


def exact_rates_for_shifts(t: float, shifts, null_indices) -> ExactErrorRates:
    """Exact rates for arbitrary per-hypothesis location shifts (independent case)."""
    shifts = np.asarray(shifts, dtype=np.float64)
    nulls = np.zeros(shifts.size, dtype=bool)
    nulls[list(null_indices)] = True
    return exact_error_rates_from_probs(_exceed(t, shifts), nulls)


def _exceed(t: float, shifts: np.ndarray) -> np.ndarray:
    return std_normal_cdf(shifts - t)


def exact_fdr_independent(t: float, truth: TruthAssignment) -> ExactErrorRates:
    """Exact error rates of the single-step rule at t under the fixed truth (rho = 0 only)."""
    return exact_error_rates_from_probs(_exceed(t, truth.shifts()), truth.null_mask())


def exact_fnr_independent(t: float, truth: TruthAssignment) -> ExactErrorRates:
    """Mirror of exact_fdr_independent; returned struct carries both sides."""
    return exact_fdr_independent(t, truth)


def single_step_fdr_supremum(n0: int, n: int, t: float) -> float:
    """Worst-case FDR (n0/n) * P{R > 0} at the exchangeable all-null point, independent case."""
    check_positive_int(n, "n")
    if not 0 <= n0 <= n:
        raise ParameterError(f"n0 must lie in [0, n], got {n0}")
    return (n0 / n) * float(1.0 - std_normal_cdf(t) ** n)


def single_step_fnr_supremum(n1: int, n: int, t: float, reference_shift: float = 0.0) -> float:
    """Worst-case FNR (n1/n) * P{A > 0} at the exchangeable reference point."""
    check_positive_int(n, "n")
    if not 0 <= n1 <= n:
        raise ParameterError(f"n1 must lie in [0, n], got {n1}")
    return (n1 / n) * float(1.0 - location_exceedance(t, reference_shift) ** n)


def _bracket(ratios: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    """1 - (1 - r)^m, elementwise, with r = 1 handled exactly."""
    out = np.ones_like(ratios)
    inside = ratios < 1.0
    with np.errstate(divide="ignore"):
        out[inside] = -np.expm1(np.log1p(-ratios[inside]) * exponents[inside])
    return out


def two_step_fdr_bound(threshold_of_k, tau: float, truth: TruthAssignment) -> float:
    """Exact upper bound on the FDR of a two-step rule with t(k) >= tau (independent case).

    Evaluates, per true null i and each count k of the other statistics
    falling below tau,
        (1 - F0(tau)) / (n - k) * [1 - (1 - (1-F0(t(k)))/(1-F0(tau)))^(n-k)]
    weighted by the Poisson-binomial probability of that count.
    """
    n = truth.n
    table = two_step_threshold_table(threshold_of_k, n)
    if np.any(table < tau):
        raise ParameterError("two-step FDR bound requires t(k) >= tau for all k")
    upper_tau = float(std_normal_sf(tau))
    if upper_tau <= 0.0:
        raise ParameterError("tau must leave positive mass above it")
    shifts = truth.shifts()
    below = std_normal_cdf(tau - shifts)
    ratios = std_normal_sf(table[:n]) / upper_tau
    counts = n - np.arange(n)  # n - k for k = 0..n-1
    kernel = upper_tau * _bracket(ratios, counts) / counts
    total = 0.0
    for i in truth.null_indices:
        pmf = poisson_binomial_pmf(np.delete(below, i))  # others below tau, length n
        total += float(np.dot(kernel, pmf))
    return total


def two_step_fdr_linear_bound(threshold_of_k, tau: float, truth: TruthAssignment) -> float:
    """Chain-step diagnostic: sum of (1 - F0(t(k))) * P{k others below tau} over true nulls.

    Not guaranteed tight; it sits between the exact two-step bound and the
    Bonferroni-style cap for the adaptive Bonferroni rule.
    """
    n = truth.n
    table = two_step_threshold_table(threshold_of_k, n)
    if np.any(table < tau):
        raise ParameterError("two-step FDR bound requires t(k) >= tau for all k")
    shifts = truth.shifts()
    below = std_normal_cdf(tau - shifts)
    levels = std_normal_sf(table[:n])
    total = 0.0
    for i in truth.null_indices:
        pmf = poisson_binomial_pmf(np.delete(below, i))
        total += float(np.dot(levels, pmf))
    return total


def two_step_fnr_bound(
    threshold_of_k, tau: float, truth: TruthAssignment, reference_shift: float = 0.0
) -> float:
    """Exact upper bound on the FNR of a two-step rule with t(k) <= tau (independent case).

    Mirror of two_step_fdr_bound over false nulls: per false null i and each
    count k >= 1 of statistics below tau including X_i,
        F_ref(tau) / k * [1 - (1 - F_ref(t(k))/F_ref(tau))^k]
    weighted by the Poisson-binomial probability that exactly k - 1 of the
    others fall below tau. reference_shift selects the reference CDF.
    """
    n = truth.n
    table = two_step_threshold_table(threshold_of_k, n)
    if np.any(table > tau):
        raise ParameterError("two-step FNR bound requires t(k) <= tau for all k")
    lower_tau = float(location_cdf(tau, reference_shift))
    if lower_tau <= 0.0:
        raise ParameterError("tau must leave positive reference mass below it")
    shifts = truth.shifts()
    below = std_normal_cdf(tau - shifts)
    ratios = location_cdf(table[1:], reference_shift) / lower_tau
    counts = np.arange(1, n + 1)  # k = 1..n
    kernel = lower_tau * _bracket(ratios, counts) / counts
    total = 0.0
    for i in truth.alt_indices:
        pmf = poisson_binomial_pmf(np.delete(below, i))  # k - 1 others below tau
        total += float(np.dot(kernel, pmf))
    return total
