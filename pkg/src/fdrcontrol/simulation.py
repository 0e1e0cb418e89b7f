"""Monte-Carlo experiment engine with common random numbers and CSV emission.

Within an iteration every procedure sees the same simulated vector (common
random numbers), which is how the benchmark studies compare procedures and
also slashes comparison variance. Iteration i of scenario s draws from
substream s * 2**22 + i of the master seed, so results are bit-identical
for any worker count and chunking.

CSV schema (fixed column order, floats printed with 6 significant digits):
    scenario_id,n,n0,delta,rho,procedure,metric,mean,se,iterations,seed
Metrics: FDR, FNR, POWER (1 - FDR - FNR), plus the auxiliary diagnostic
AVGPOWER (mean fraction of false nulls rejected; omitted when n1 = 0).
MaxSE footer rows use scenario_id = -1, n0 = -1, delta = nan, metric MAXSE.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ._validation import check_correlation, check_nonnegative_int, check_open_unit, check_positive_int
from .exceptions import ParameterError
from .procedures import ProcedureKind, ProcedureSpec
from .samplers import Seed, TruthAssignment, sample_equicorrelated

__all__ = [
    "ITERATION_STRIDE",
    "factorial_suite",
    "ExperimentConfig",
    "CellEstimate",
    "ScenarioResult",
    "FooterRow",
    "ResultGrid",
    "default_fdr_procedures",
    "fnr_procedures",
    "run_experiment",
    "table2_suite",
    "figure1_suite",
    "fnr_suite",
    "bound_check_suite",
    "BoundCheckRow",
    "grid_to_csv",
    "grid_to_json",
    "bound_report_to_csv",
]

ITERATION_STRIDE = 1 << 22

CSV_COLUMNS = ("scenario_id", "n", "n0", "delta", "rho", "procedure", "metric", "mean", "se", "iterations", "seed")

_METRIC_ORDER = ("FDR", "FNR", "POWER", "AVGPOWER")

_GRID_N0 = (30, 50, 70, 90)
_GRID_DELTA = (0.5, 1.5, 2.5)
_GRID_RHO = (0.0, 0.5)


def default_fdr_procedures(alpha: float = 0.05, tau_quantile: float = 0.5) -> Tuple[ProcedureSpec, ...]:
    """The four FDR procedures in benchmark column order: original/modified Bonferroni, original/modified Sidak."""
    return (
        ProcedureSpec(ProcedureKind.BONFERRONI_FDR, alpha),
        ProcedureSpec(ProcedureKind.MODIFIED_BONFERRONI_FDR, alpha, tau_quantile=tau_quantile),
        ProcedureSpec(ProcedureKind.SIDAK_FDR, alpha),
        ProcedureSpec(ProcedureKind.MODIFIED_SIDAK_FDR, alpha, tau_quantile=tau_quantile),
    )


def fnr_procedures(beta: float = 0.05, tau_quantile: float = 0.5, references=("f0", "f1")) -> Tuple[ProcedureSpec, ...]:
    """The four FNR procedures, repeated per requested reference CDF."""
    kinds = (
        ProcedureKind.BONFERRONI_FNR,
        ProcedureKind.MODIFIED_BONFERRONI_FNR,
        ProcedureKind.SIDAK_FNR,
        ProcedureKind.MODIFIED_SIDAK_FNR,
    )
    return tuple(
        ProcedureSpec(kind, beta, tau_quantile=tau_quantile, reference=ref) for ref in references for kind in kinds
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte-Carlo scenario."""

    n: int
    n0: int
    delta: float
    rho: float
    master_seed: int
    alpha: float = 0.05
    beta: float = 0.05
    tau_quantile: float = 0.5
    iterations: int = 5000
    procedures: Tuple[ProcedureSpec, ...] = ()

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_nonnegative_int(self.n0, "n0")
        if self.n0 > self.n:
            raise ParameterError(f"n0 must not exceed n, got n0={self.n0}, n={self.n}")
        if not self.delta >= 0.0:
            raise ParameterError(f"delta must be nonnegative, got {self.delta}")
        check_correlation(self.rho)
        check_nonnegative_int(self.master_seed, "master_seed")
        check_open_unit(self.alpha, "alpha")
        check_open_unit(self.beta, "beta")
        check_open_unit(self.tau_quantile, "tau_quantile")
        check_positive_int(self.iterations, "iterations")
        if self.iterations >= ITERATION_STRIDE:
            raise ParameterError(f"iterations must be below {ITERATION_STRIDE}")
        if not self.procedures:
            object.__setattr__(self, "procedures", default_fdr_procedures(self.alpha, self.tau_quantile))
        else:
            object.__setattr__(self, "procedures", tuple(self.procedures))

    def truth(self) -> TruthAssignment:
        return TruthAssignment.trailing_alternatives(self.n, self.n0, self.delta)


@dataclass(frozen=True)
class CellEstimate:
    procedure: ProcedureSpec
    metric: str
    mean: float
    standard_error: float
    iterations: int


@dataclass(frozen=True)
class ScenarioResult:
    scenario_id: int
    n: int
    n0: int
    delta: float
    rho: float
    master_seed: int
    estimates: Tuple[CellEstimate, ...]

    def estimate(self, procedure_label: str, metric: str) -> CellEstimate:
        for est in self.estimates:
            if est.procedure.label == procedure_label and est.metric == metric:
                return est
        raise KeyError(f"no estimate for ({procedure_label}, {metric})")


@dataclass(frozen=True)
class FooterRow:
    rho: float
    procedure_label: str
    value: float
    n: int
    iterations: int
    master_seed: int


@dataclass(frozen=True)
class ResultGrid:
    scenarios: Tuple[ScenarioResult, ...]
    footer: Tuple[FooterRow, ...] = ()

    def scenario(self, n0: int, delta: float, rho: float) -> ScenarioResult:
        for sc in self.scenarios:
            if sc.n0 == n0 and sc.delta == delta and sc.rho == rho:
                return sc
        raise KeyError(f"no scenario (n0={n0}, delta={delta}, rho={rho})")


def _procedure_runtimes(cfg: ExperimentConfig):
    """Materialize (label, tau, threshold table of length n+1) per procedure."""
    runtimes = []
    for spec in cfg.procedures:
        est = spec.build(cfg.delta)
        if spec.kind.is_two_step:
            tau = est.tau_value()
            table = est.threshold_table(cfg.n)
        else:
            tau = -math.inf
            table = np.full(cfg.n + 1, est.threshold_value(cfg.n))
        runtimes.append((spec.label, tau, table))
    return runtimes


def _simulate_range(cfg: ExperimentConfig, scenario_id: int, shift_override, start: int, stop: int):
    """Per-iteration FDP/FNP/true-discovery-fraction arrays for iterations [start, stop)."""
    truth = cfg.truth()
    null_mask = truth.null_mask()
    n, n1 = cfg.n, truth.n1
    runtimes = _procedure_runtimes(cfg)
    base_stream = scenario_id * ITERATION_STRIDE
    count = stop - start
    x = np.empty((count, n))
    for j, it in enumerate(range(start, stop)):
        x[j] = sample_equicorrelated(truth, cfg.rho, Seed(cfg.master_seed, base_stream + it), shifts=shift_override)

    out = {}
    k_cache = {}
    for label, tau, table in runtimes:
        if math.isinf(tau):
            k = np.zeros(count, dtype=np.intp)
        elif tau in k_cache:
            k = k_cache[tau]
        else:
            k = (x < tau).sum(axis=1)
            k_cache[tau] = k
        thresholds = table[k]
        mask = x >= thresholds[:, None]
        r = mask.sum(axis=1)
        v = (mask & null_mask).sum(axis=1)
        s = r - v
        a = n - r
        missed = n1 - s
        q = np.divide(v, r, out=np.zeros(count), where=r > 0)
        np_ = np.divide(missed, a, out=np.zeros(count), where=a > 0)
        avg = s / n1 if n1 > 0 else None
        out[label] = (q, np_, avg)
    return out


def run_experiment(
    cfg: ExperimentConfig,
    workers: int = 1,
    scenario_id: int = 0,
    shift_override=None,
    metrics: Sequence[str] = _METRIC_ORDER,
) -> ScenarioResult:
    """Run one scenario: every procedure applied to the same draws, means and SEs per metric.

    shift_override replaces the truth-derived means while keeping the truth
    labels fixed (used to probe worst-case parameter points). Results do not
    depend on ``workers``.
    """
    check_positive_int(workers, "workers")
    for m in metrics:
        if m not in _METRIC_ORDER:
            raise ParameterError(f"unknown metric {m!r}")
    if shift_override is not None:
        shift_override = np.asarray(shift_override, dtype=np.float64)

    iters = cfg.iterations
    chunk = 512
    ranges = [(lo, min(lo + chunk, iters)) for lo in range(0, iters, chunk)]
    labels = [spec.label for spec in cfg.procedures]
    acc = {label: (np.empty(iters), np.empty(iters), np.empty(iters)) for label in labels}

    def _store(lo, hi, part):
        for label, (q, np_, avg) in part.items():
            acc[label][0][lo:hi] = q
            acc[label][1][lo:hi] = np_
            if avg is not None:
                acc[label][2][lo:hi] = avg

    if workers == 1 or len(ranges) == 1:
        for lo, hi in ranges:
            _store(lo, hi, _simulate_range(cfg, scenario_id, shift_override, lo, hi))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(lo, hi, pool.submit(_simulate_range, cfg, scenario_id, shift_override, lo, hi)) for lo, hi in ranges]
            for lo, hi, fut in futures:
                _store(lo, hi, fut.result())

    n1 = cfg.n - cfg.n0
    estimates = []
    for spec, label in zip(cfg.procedures, labels):
        q, np_, avg = acc[label]
        series = {"FDR": q, "FNR": np_, "POWER": 1.0 - q - np_}
        if n1 > 0:
            series["AVGPOWER"] = avg
        for metric in _METRIC_ORDER:
            if metric not in metrics or metric not in series:
                continue
            values = series[metric]
            se = float(values.std(ddof=1) / math.sqrt(iters)) if iters > 1 else math.nan
            estimates.append(CellEstimate(spec, metric, float(values.mean()), se, iters))
    return ScenarioResult(scenario_id, cfg.n, cfg.n0, cfg.delta, cfg.rho, cfg.master_seed, tuple(estimates))


def factorial_suite(master_seed: int, procedures, iterations: int = 5000, workers: int = 1,
                    metrics: Sequence[str] = _METRIC_ORDER, n: int = 100) -> ResultGrid:
    """The benchmark factorial: n0 in {30,50,70,90} x delta in {0.5,1.5,2.5} x rho in {0, 0.5}.

    Scenario ids follow that nesting order (rho outermost), so a given master
    seed yields the same draws for every metric selection.
    """
    scenarios = []
    sid = 0
    for rho in _GRID_RHO:
        for n0 in _GRID_N0:
            for delta in _GRID_DELTA:
                cfg = ExperimentConfig(
                    n=n, n0=n0, delta=delta, rho=rho, master_seed=master_seed,
                    iterations=iterations, procedures=procedures,
                )
                scenarios.append(run_experiment(cfg, workers=workers, scenario_id=sid, metrics=metrics))
                sid += 1
    return ResultGrid(tuple(scenarios))


def _factorial(master_seed, procedures, iterations, workers, metrics, n=100):
    return list(factorial_suite(master_seed, procedures, iterations, workers, metrics, n).scenarios)


def _maxse_footer(scenarios, metric, master_seed, iterations, n=100):
    footer = []
    labels = [est.procedure.label for est in scenarios[0].estimates if est.metric == metric]
    seen = dict.fromkeys(labels)  # preserve order, dedupe
    for rho in _GRID_RHO:
        for label in seen:
            ses = [
                sc.estimate(label, metric).standard_error
                for sc in scenarios
                if sc.rho == rho
            ]
            footer.append(FooterRow(rho, label, max(ses), n, iterations, master_seed))
    return tuple(footer)


def table2_suite(master_seed: int, iterations: int = 5000, workers: int = 1, alpha: float = 0.05,
                 tau_quantile: float = 0.5) -> ResultGrid:
    """Factorial FDR study: n=100, n0 x delta x rho grid, four FDR procedures,
    FDR rows plus MaxSE footer per (rho, procedure)."""
    procedures = default_fdr_procedures(alpha, tau_quantile)
    scenarios = _factorial(master_seed, procedures, iterations, workers, metrics=("FDR",))
    footer = _maxse_footer(scenarios, "FDR", master_seed, iterations)
    return ResultGrid(tuple(scenarios), footer)


def figure1_suite(master_seed: int, iterations: int = 5000, workers: int = 1, alpha: float = 0.05,
                  tau_quantile: float = 0.5) -> ResultGrid:
    """Same factorial grid, POWER rows (plus the AVGPOWER diagnostic) for the four FDR procedures."""
    procedures = default_fdr_procedures(alpha, tau_quantile)
    scenarios = _factorial(master_seed, procedures, iterations, workers, metrics=("POWER", "AVGPOWER"))
    return ResultGrid(tuple(scenarios))


def fnr_suite(master_seed: int, iterations: int = 5000, workers: int = 1, beta: float = 0.05,
              tau_quantile: float = 0.5, references=("f0", "f1")) -> ResultGrid:
    """Factorial FNR study over the four FNR procedures with null- and
    alternative-referenced critical values; the grid delta doubles as the
    prespecified alternative the f1 reference uses."""
    procedures = fnr_procedures(beta, tau_quantile, references)
    scenarios = _factorial(master_seed, procedures, iterations, workers, metrics=("FNR",))
    return ResultGrid(tuple(scenarios))


@dataclass(frozen=True)
class BoundCheckRow:
    scenario_id: int
    n: int
    n0: int
    delta: float
    rho: float
    procedure: str
    metric: str
    mean: float
    se: float
    iterations: int
    seed: int
    bound: float
    cap: float


def bound_check_suite(master_seed: int, iterations: int = 5000, workers: int = 1, n: int = 100,
                      alpha: float = 0.05, beta: float = 0.05, tau_quantile: float = 0.5,
                      n0_values=_GRID_N0, delta_values=_GRID_DELTA) -> Tuple[BoundCheckRow, ...]:
    """Independent-case check of the two-step procedures against their exact bounds.

    For each grid cell (rho = 0 only), simulates the four modified procedures
    and reports the exact two-step FDR/FNR bound alongside the analytic cap
    level * (1 - q^n) (FDR) or level * (1 - (1-q)^n) (FNR), q = tau_quantile.
    """
    from .metrics import two_step_fdr_bound, two_step_fnr_bound  # local to avoid cycle at import time

    specs = (
        ProcedureSpec(ProcedureKind.MODIFIED_BONFERRONI_FDR, alpha, tau_quantile=tau_quantile),
        ProcedureSpec(ProcedureKind.MODIFIED_SIDAK_FDR, alpha, tau_quantile=tau_quantile),
        ProcedureSpec(ProcedureKind.MODIFIED_BONFERRONI_FNR, beta, tau_quantile=tau_quantile),
        ProcedureSpec(ProcedureKind.MODIFIED_SIDAK_FNR, beta, tau_quantile=tau_quantile),
    )
    cap_fdr = alpha * (1.0 - tau_quantile ** n)
    cap_fnr = beta * (1.0 - (1.0 - tau_quantile) ** n)
    rows = []
    sid = 0
    for n0 in n0_values:
        for delta in delta_values:
            cfg = ExperimentConfig(n=n, n0=n0, delta=delta, rho=0.0, master_seed=master_seed,
                                   iterations=iterations, procedures=specs)
            result = run_experiment(cfg, workers=workers, scenario_id=sid, metrics=("FDR", "FNR"))
            truth = cfg.truth()
            for spec in specs:
                est = spec.build(delta)
                table = est.threshold_table(n)
                tau = est.tau_value()
                if spec.kind.is_fdr:
                    metric = "FDR"
                    bound = two_step_fdr_bound(table, tau, truth)
                    cap = cap_fdr
                else:
                    metric = "FNR"
                    shift = delta if spec.reference == "f1" else 0.0
                    bound = two_step_fnr_bound(table, tau, truth, reference_shift=shift)
                    cap = cap_fnr
                cell = result.estimate(spec.label, metric)
                rows.append(BoundCheckRow(sid, n, n0, delta, 0.0, spec.label, metric,
                                          cell.mean, cell.standard_error, iterations, master_seed,
                                          bound, cap))
            sid += 1
    return tuple(rows)


# ---------------------------------------------------------------------------
# CSV / JSON emission
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def grid_rows(grid: ResultGrid) -> list:
    rows = []
    for sc in grid.scenarios:
        for est in sc.estimates:
            rows.append({
                "scenario_id": sc.scenario_id, "n": sc.n, "n0": sc.n0, "delta": sc.delta,
                "rho": sc.rho, "procedure": est.procedure.label, "metric": est.metric,
                "mean": est.mean, "se": est.standard_error, "iterations": est.iterations,
                "seed": sc.master_seed,
            })
    for foot in grid.footer:
        rows.append({
            "scenario_id": -1, "n": foot.n, "n0": -1, "delta": math.nan, "rho": foot.rho,
            "procedure": foot.procedure_label, "metric": "MAXSE", "mean": foot.value,
            "se": 0.0, "iterations": foot.iterations, "seed": foot.master_seed,
        })
    return rows


def grid_to_csv(grid: ResultGrid) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in grid_rows(grid):
        lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def grid_to_json(grid: ResultGrid) -> str:
    return json.dumps(grid_rows(grid), indent=2, allow_nan=True) + "\n"


def bound_report_to_csv(rows: Sequence[BoundCheckRow]) -> str:
    columns = CSV_COLUMNS + ("bound", "cap")
    lines = [",".join(columns)]
    for row in rows:
        values = (row.scenario_id, row.n, row.n0, row.delta, row.rho, row.procedure, row.metric,
                  row.mean, row.se, row.iterations, row.seed, row.bound, row.cap)
        lines.append(",".join(_fmt(v) for v in values))
    return "\n".join(lines) + "\n"


def bound_report_to_json(rows: Sequence[BoundCheckRow]) -> str:
    columns = CSV_COLUMNS + ("bound", "cap")
    payload = [
        dict(zip(columns, (row.scenario_id, row.n, row.n0, row.delta, row.rho, row.procedure, row.metric,
                           row.mean, row.se, row.iterations, row.seed, row.bound, row.cap)))
        for row in rows
    ]
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"
