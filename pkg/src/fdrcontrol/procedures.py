"""The eight testing procedures: single-step and adaptive two-step thresholds.

Every procedure rejects H_i exactly when X_i >= t for some critical value t.
The single-step rules fix t from the level alone:

    Bonferroni (FDR side):  F0(t) = 1 - alpha/n
    Sidak      (FDR side):  F0(t) = (1 - alpha)^(1/n)
    Bonferroni (FNR side):  F_ref(t) = beta/n
    Sidak      (FNR side):  F_ref(t) = 1 - (1 - beta)^(1/n)

The two-step (modified) rules first count k = #{X_i < tau} for a fixed cut
tau, which drives the adaptive null-count estimate (k + 1)/F0(tau), and then
reject at a threshold t(k):

    modified Bonferroni (FDR): 1 - F0(t(k)) = min{1 - F0(tau), alpha * F0(tau)/(k + 1)}
    modified Sidak (FDR):      1 - F0(t(k)) = (1 - F0(tau)) *
        [1 - (1 - min{1, alpha*(n-k)*F0(tau) / ((k+1)*(1-F0(tau)))})^(1/(n-k))],
        with t(n) = +inf
    modified Bonferroni (FNR): F0(t(k)) = min{F0(tau), beta * (1-F0(tau))/(n - k + 1)},
        with t(0) = -inf
    modified Sidak (FNR):      F0(t(k)) = F0(tau) *
        [1 - (1 - min{1, beta*k*(1-F0(tau)) / ((n-k+1)*F0(tau))})^(1/k)],
        with t(0) = -inf

FDR-side two-step thresholds never fall below tau and FNR-side ones never
exceed it; ``apply_two_step`` enforces those constraints over the whole
threshold table because the error-rate guarantees need them at every k, not
just the realized one. FNR thresholds may be referenced to the shifted
alternative distribution instead of the null (``reference_shift``).

Besides the plain functions, each procedure is exposed as a small
sklearn-compatible estimator (fit / predict / get_params / set_params), so
the rules compose with the wider ecosystem.
"""

import inspect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ._validation import as_statistic_vector, check_finite, check_nonnegative_int, check_open_unit, check_positive_int
from .distributions import std_normal_cdf, std_normal_quantile, std_normal_sf, threshold_from_upper_level
from .exceptions import FdrControlError, ParameterError

__all__ = [
    "ProcedureKind",
    "ProcedureSpec",
    "RejectionSet",
    "estimated_null_count",
    "bonferroni_fdr_threshold",
    "sidak_fdr_threshold",
    "modified_bonferroni_fdr_threshold",
    "modified_sidak_fdr_threshold",
    "bonferroni_fnr_threshold",
    "sidak_fnr_threshold",
    "modified_bonferroni_fnr_threshold",
    "modified_sidak_fnr_threshold",
    "two_step_threshold_table",
    "apply_single_step",
    "apply_two_step",
    "modified_bonferroni_fdr",
    "BonferroniFdr",
    "SidakFdr",
    "ModifiedBonferroniFdr",
    "ModifiedSidakFdr",
    "BonferroniFnr",
    "SidakFnr",
    "ModifiedBonferroniFnr",
    "ModifiedSidakFnr",
    "make_procedure",
]


# ---------------------------------------------------------------------------
# Plain threshold computations (probability space first, quantile at the end)
# ---------------------------------------------------------------------------


def estimated_null_count(k_below: int, tau_quantile: float) -> float:
    """Adaptive estimate (k + 1)/F0(tau) of the number of true nulls."""
    check_nonnegative_int(k_below, "k_below")
    check_open_unit(tau_quantile, "tau_quantile")
    return (k_below + 1) / tau_quantile


def bonferroni_fdr_threshold(alpha: float, n: int) -> float:
    """t with F0(t) = 1 - alpha/n."""
    check_open_unit(alpha, "alpha")
    check_positive_int(n, "n")
    return threshold_from_upper_level(alpha / n)


def sidak_fdr_threshold(alpha: float, n: int) -> float:
    """t with F0(t) = (1 - alpha)^(1/n)."""
    check_open_unit(alpha, "alpha")
    check_positive_int(n, "n")
    return threshold_from_upper_level(-math.expm1(math.log1p(-alpha) / n))


def modified_bonferroni_fdr_threshold(k: int, alpha: float, tau: float) -> float:
    """Two-step Bonferroni-type FDR threshold given k statistics below tau.

    Upper-tail level min{1 - F0(tau), alpha * F0(tau)/(k+1)}; the clamp branch
    returns tau itself so saturation is exact.
    """
    check_nonnegative_int(k, "k")
    check_open_unit(alpha, "alpha")
    check_finite(tau, "tau")
    inner = alpha * std_normal_cdf(tau) / (k + 1)
    if inner >= std_normal_sf(tau):
        return tau
    return threshold_from_upper_level(inner)


def modified_sidak_fdr_threshold(k: int, n: int, alpha: float, tau: float) -> float:
    """Two-step Sidak-type FDR threshold given k statistics below tau; +inf at k = n."""
    check_nonnegative_int(k, "k")
    check_positive_int(n, "n")
    check_open_unit(alpha, "alpha")
    check_finite(tau, "tau")
    if k > n:
        raise ParameterError(f"k must not exceed n, got k={k}, n={n}")
    if k == n:
        return math.inf
    f0_tau = std_normal_cdf(tau)
    upper_tau = std_normal_sf(tau)
    arg = alpha * (n - k) * f0_tau / ((k + 1) * upper_tau)
    if arg >= 1.0:
        return tau
    level = upper_tau * (-math.expm1(math.log1p(-arg) / (n - k)))
    return threshold_from_upper_level(level)


def bonferroni_fnr_threshold(beta: float, n: int, reference_shift: float = 0.0) -> float:
    """t with F_ref(t) = beta/n, where F_ref is the null CDF shifted by reference_shift."""
    check_open_unit(beta, "beta")
    check_positive_int(n, "n")
    check_finite(reference_shift, "reference_shift")
    return std_normal_quantile(beta / n) + reference_shift


def sidak_fnr_threshold(beta: float, n: int, reference_shift: float = 0.0) -> float:
    """t with F_ref(t) = 1 - (1 - beta)^(1/n)."""
    check_open_unit(beta, "beta")
    check_positive_int(n, "n")
    check_finite(reference_shift, "reference_shift")
    level = -math.expm1(math.log1p(-beta) / n)
    return std_normal_quantile(level) + reference_shift


def modified_bonferroni_fnr_threshold(
    k: int, n: int, beta: float, tau: float, reference_shift: float = 0.0
) -> float:
    """Two-step Bonferroni-type FNR threshold given k statistics below tau; -inf at k = 0."""
    check_nonnegative_int(k, "k")
    check_positive_int(n, "n")
    check_open_unit(beta, "beta")
    check_finite(tau, "tau")
    check_finite(reference_shift, "reference_shift")
    if k > n:
        raise ParameterError(f"k must not exceed n, got k={k}, n={n}")
    if k == 0:
        return -math.inf
    tau0 = tau - reference_shift
    inner = beta * std_normal_sf(tau0) / (n - k + 1)
    if inner >= std_normal_cdf(tau0):
        return tau
    return std_normal_quantile(inner) + reference_shift


def modified_sidak_fnr_threshold(
    k: int, n: int, beta: float, tau: float, reference_shift: float = 0.0
) -> float:
    """Two-step Sidak-type FNR threshold given k statistics below tau; -inf at k = 0."""
    check_nonnegative_int(k, "k")
    check_positive_int(n, "n")
    check_open_unit(beta, "beta")
    check_finite(tau, "tau")
    check_finite(reference_shift, "reference_shift")
    if k > n:
        raise ParameterError(f"k must not exceed n, got k={k}, n={n}")
    if k == 0:
        return -math.inf
    tau0 = tau - reference_shift
    f_tau = std_normal_cdf(tau0)
    arg = beta * k * std_normal_sf(tau0) / ((n - k + 1) * f_tau)
    if arg >= 1.0:
        return tau
    level = f_tau * (-math.expm1(math.log1p(-arg) / k))
    return std_normal_quantile(level) + reference_shift


# ---------------------------------------------------------------------------
# Applying procedures to data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RejectionSet:
    """Outcome of applying one procedure: rejected indices i satisfy x[i] >= threshold_used."""

    rejected: np.ndarray
    threshold_used: float
    k_observed: Optional[int] = None

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        out[self.rejected] = True
        return out

    @property
    def count(self) -> int:
        return int(self.rejected.size)


def two_step_threshold_table(threshold_of_k: Union[Callable[[int], float], Sequence[float]], n: int) -> np.ndarray:
    """Materialize a k -> t(k) rule into an array of length n + 1."""
    if callable(threshold_of_k):
        table = np.asarray([float(threshold_of_k(k)) for k in range(n + 1)])
    else:
        table = np.asarray(threshold_of_k, dtype=np.float64)
        if table.shape != (n + 1,):
            raise ParameterError(f"threshold table must have length n + 1 = {n + 1}, got {table.shape}")
    if np.any(np.isnan(table)):
        raise ParameterError("threshold table contains NaN")
    return table


def apply_single_step(x, t: float) -> RejectionSet:
    """Reject every H_i with x[i] >= t."""
    arr = as_statistic_vector(x)
    return RejectionSet(rejected=np.flatnonzero(arr >= t), threshold_used=float(t))


def apply_two_step(x, tau: float, threshold_of_k, side: str) -> RejectionSet:
    """Count k = #{x_i < tau}, then reject every H_i with x_i >= t(k).

    side is "fdr" (t(k) >= tau required for every k) or "fnr" (t(k) <= tau).
    Ties at tau count as not below tau. tau = -inf reduces the rule to the
    single-step procedure with threshold t(0).
    """
    arr = as_statistic_vector(x)
    n = arr.size
    table = two_step_threshold_table(threshold_of_k, n)
    if side == "fdr":
        if np.any(table < tau):
            raise ParameterError("fdr-side two-step thresholds must satisfy t(k) >= tau for all k")
    elif side == "fnr":
        if np.any(table > tau):
            raise ParameterError("fnr-side two-step thresholds must satisfy t(k) <= tau for all k")
    else:
        raise ParameterError(f"side must be 'fdr' or 'fnr', got {side!r}")
    k = int(np.count_nonzero(arr < tau))
    t = float(table[k])
    return RejectionSet(rejected=np.flatnonzero(arr >= t), threshold_used=t, k_observed=k)


def modified_bonferroni_fdr(x, alpha: float, tau: float) -> RejectionSet:
    """The adaptive Bonferroni FDR rule: never rejects statistics below tau."""
    arr = as_statistic_vector(x)
    check_finite(tau, "tau")
    table = [max(tau, modified_bonferroni_fdr_threshold(k, alpha, tau)) for k in range(arr.size + 1)]
    return apply_two_step(arr, tau, table, side="fdr")


# ---------------------------------------------------------------------------
# sklearn-style estimator face
# ---------------------------------------------------------------------------


class BaseProcedure:
    """Minimal sklearn-compatible base: introspective get_params/set_params."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseProcedure":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ParameterError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    # -- fitting -----------------------------------------------------------

    def fit(self, x, y=None) -> "BaseProcedure":
        arr = as_statistic_vector(x)
        self.n_ = arr.size
        result = self._apply(arr)
        self.threshold_ = result.threshold_used
        self.k_observed_ = result.k_observed
        self.rejected_ = result.mask(self.n_)
        return self

    def predict(self, x) -> np.ndarray:
        """Boolean rejection mask of ``x`` against the fitted threshold."""
        if not hasattr(self, "threshold_"):
            raise FdrControlError(f"{type(self).__name__} is not fitted yet; call fit first")
        return as_statistic_vector(x) >= self.threshold_

    def fit_predict(self, x, y=None) -> np.ndarray:
        return self.fit(x).rejected_

    def rejection_set(self) -> RejectionSet:
        if not hasattr(self, "threshold_"):
            raise FdrControlError(f"{type(self).__name__} is not fitted yet; call fit first")
        return RejectionSet(
            rejected=np.flatnonzero(self.rejected_),
            threshold_used=self.threshold_,
            k_observed=self.k_observed_,
        )

    def _apply(self, arr: np.ndarray) -> RejectionSet:
        raise NotImplementedError


class _SingleStep(BaseProcedure):
    def _apply(self, arr):
        return apply_single_step(arr, self._threshold(arr.size))

    def threshold_value(self, n: int) -> float:
        """The fixed critical value this procedure uses on n statistics."""
        return self._threshold(n)

    def _threshold(self, n: int) -> float:
        raise NotImplementedError


class _TwoStep(BaseProcedure):
    _side = None  # "fdr" or "fnr"

    def _apply(self, arr):
        tau = self._tau()
        table = [self._threshold_at(k, arr.size, tau) for k in range(arr.size + 1)]
        return apply_two_step(arr, tau, table, side=self._side)

    def threshold_table(self, n: int) -> np.ndarray:
        """The full k -> t(k) table this procedure would use on n statistics."""
        tau = self._tau()
        return two_step_threshold_table([self._threshold_at(k, n, tau) for k in range(n + 1)], n)

    def tau_value(self) -> float:
        """The first-step cut below which statistics count toward k."""
        return self._tau()

    def _tau(self) -> float:
        raise NotImplementedError

    def _threshold_at(self, k: int, n: int, tau: float) -> float:
        raise NotImplementedError


class BonferroniFdr(_SingleStep):
    """Single-step rule at the Bonferroni cut F0(t) = 1 - alpha/n."""

    def __init__(self, alpha: float = 0.05):
        self.alpha = alpha

    def _threshold(self, n):
        return bonferroni_fdr_threshold(self.alpha, n)


class SidakFdr(_SingleStep):
    """Single-step rule at the Sidak cut F0(t) = (1 - alpha)^(1/n)."""

    def __init__(self, alpha: float = 0.05):
        self.alpha = alpha

    def _threshold(self, n):
        return sidak_fdr_threshold(self.alpha, n)


class ModifiedBonferroniFdr(_TwoStep):
    """Adaptive Bonferroni FDR rule; tau is the F0-quantile at tau_quantile."""

    _side = "fdr"

    def __init__(self, alpha: float = 0.05, tau_quantile: float = 0.5):
        self.alpha = alpha
        self.tau_quantile = tau_quantile

    def _tau(self):
        return std_normal_quantile(check_open_unit(self.tau_quantile, "tau_quantile"))

    def _threshold_at(self, k, n, tau):
        # statistics below tau are never rejected, hence the clamp to tau
        return max(tau, modified_bonferroni_fdr_threshold(k, self.alpha, tau))


class ModifiedSidakFdr(_TwoStep):
    """Adaptive Sidak FDR rule; less conservative than the Bonferroni version."""

    _side = "fdr"

    def __init__(self, alpha: float = 0.05, tau_quantile: float = 0.5):
        self.alpha = alpha
        self.tau_quantile = tau_quantile

    def _tau(self):
        return std_normal_quantile(check_open_unit(self.tau_quantile, "tau_quantile"))

    def _threshold_at(self, k, n, tau):
        return modified_sidak_fdr_threshold(k, n, self.alpha, tau)


class BonferroniFnr(_SingleStep):
    """Single-step rule at F_ref(t) = beta/n; reference_shift selects the reference CDF."""

    def __init__(self, beta: float = 0.05, reference_shift: float = 0.0):
        self.beta = beta
        self.reference_shift = reference_shift

    def _threshold(self, n):
        return bonferroni_fnr_threshold(self.beta, n, self.reference_shift)


class SidakFnr(_SingleStep):
    """Single-step rule at F_ref(t) = 1 - (1 - beta)^(1/n)."""

    def __init__(self, beta: float = 0.05, reference_shift: float = 0.0):
        self.beta = beta
        self.reference_shift = reference_shift

    def _threshold(self, n):
        return sidak_fnr_threshold(self.beta, n, self.reference_shift)


class ModifiedBonferroniFnr(_TwoStep):
    """Adaptive Bonferroni FNR rule; tau is the F_ref-quantile at tau_quantile."""

    _side = "fnr"

    def __init__(self, beta: float = 0.05, tau_quantile: float = 0.5, reference_shift: float = 0.0):
        self.beta = beta
        self.tau_quantile = tau_quantile
        self.reference_shift = reference_shift

    def _tau(self):
        return std_normal_quantile(check_open_unit(self.tau_quantile, "tau_quantile")) + self.reference_shift

    def _threshold_at(self, k, n, tau):
        return modified_bonferroni_fnr_threshold(k, n, self.beta, tau, self.reference_shift)


class ModifiedSidakFnr(_TwoStep):
    """Adaptive Sidak FNR rule."""

    _side = "fnr"

    def __init__(self, beta: float = 0.05, tau_quantile: float = 0.5, reference_shift: float = 0.0):
        self.beta = beta
        self.tau_quantile = tau_quantile
        self.reference_shift = reference_shift

    def _tau(self):
        return std_normal_quantile(check_open_unit(self.tau_quantile, "tau_quantile")) + self.reference_shift

    def _threshold_at(self, k, n, tau):
        return modified_sidak_fnr_threshold(k, n, self.beta, tau, self.reference_shift)


# ---------------------------------------------------------------------------
# Declarative procedure identification (config files, CSV labels)
# ---------------------------------------------------------------------------


class ProcedureKind(str, Enum):
    BONFERRONI_FDR = "bonferroni_fdr"
    SIDAK_FDR = "sidak_fdr"
    MODIFIED_BONFERRONI_FDR = "modified_bonferroni_fdr"
    MODIFIED_SIDAK_FDR = "modified_sidak_fdr"
    BONFERRONI_FNR = "bonferroni_fnr"
    SIDAK_FNR = "sidak_fnr"
    MODIFIED_BONFERRONI_FNR = "modified_bonferroni_fnr"
    MODIFIED_SIDAK_FNR = "modified_sidak_fnr"

    @property
    def is_fdr(self) -> bool:
        return self.value.endswith("_fdr")

    @property
    def is_two_step(self) -> bool:
        return self.value.startswith("modified_")


_ESTIMATOR_BY_KIND = {
    ProcedureKind.BONFERRONI_FDR: BonferroniFdr,
    ProcedureKind.SIDAK_FDR: SidakFdr,
    ProcedureKind.MODIFIED_BONFERRONI_FDR: ModifiedBonferroniFdr,
    ProcedureKind.MODIFIED_SIDAK_FDR: ModifiedSidakFdr,
    ProcedureKind.BONFERRONI_FNR: BonferroniFnr,
    ProcedureKind.SIDAK_FNR: SidakFnr,
    ProcedureKind.MODIFIED_BONFERRONI_FNR: ModifiedBonferroniFnr,
    ProcedureKind.MODIFIED_SIDAK_FNR: ModifiedSidakFnr,
}


@dataclass(frozen=True)
class ProcedureSpec:
    """Identifies one procedure plus its parameters.

    level is alpha for FDR kinds and beta for FNR kinds. reference selects
    the CDF the FNR thresholds refer to: "f0" (the null) or "f1" (the
    alternative shifted by the experiment's delta).
    """

    kind: ProcedureKind
    level: float = 0.05
    n: Optional[int] = None
    tau_quantile: float = 0.5
    reference: str = "f0"

    def __post_init__(self):
        object.__setattr__(self, "kind", ProcedureKind(self.kind))
        check_open_unit(self.level, "level")
        check_open_unit(self.tau_quantile, "tau_quantile")
        if self.n is not None:
            check_positive_int(self.n, "n")
        if self.reference not in ("f0", "f1"):
            raise ParameterError(f"reference must be 'f0' or 'f1', got {self.reference!r}")
        if self.reference == "f1" and self.kind.is_fdr:
            raise ParameterError("the f1 reference applies to FNR procedures only")

    @property
    def label(self) -> str:
        """CSV-facing identifier, with an _f1 suffix for alternative-referenced FNR rules."""
        return self.kind.value + ("_f1" if self.reference == "f1" else "")

    def build(self, delta: float = 0.0) -> BaseProcedure:
        """Instantiate the matching estimator; delta feeds the f1 reference shift."""
        cls = _ESTIMATOR_BY_KIND[self.kind]
        shift = delta if self.reference == "f1" else 0.0
        if self.kind.is_fdr:
            if self.kind.is_two_step:
                return cls(alpha=self.level, tau_quantile=self.tau_quantile)
            return cls(alpha=self.level)
        if self.kind.is_two_step:
            return cls(beta=self.level, tau_quantile=self.tau_quantile, reference_shift=shift)
        return cls(beta=self.level, reference_shift=shift)


def make_procedure(spec: ProcedureSpec, delta: float = 0.0) -> BaseProcedure:
    """Functional alias for ProcedureSpec.build."""
    return spec.build(delta)
