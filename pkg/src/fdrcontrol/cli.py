"""Command-line surface: thresholds, exact rates, simulations, mixture analytics.

Exit codes: 0 success, 2 usage error (bad flags, bad config), 3 runtime or
numerical error. Failures print a single machine-parseable line
``error: <message>`` to stderr. Every stochastic subcommand requires an
explicit --seed (directly or through the config file); reruns with the same
seed produce byte-identical output for any worker count.
"""

import argparse
import json
import math
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .distributions import std_normal_cdf
from .exceptions import FdrControlError, ParameterError
from .mixture import MixtureConfig, estimate_pfdr_pfnr, posterior_alt_given_accept, posterior_null_given_exceed, q_value
from .metrics import exact_fdr_independent
from .procedures import ProcedureKind, ProcedureSpec
from .samplers import Seed
from .simulation import (
    ExperimentConfig,
    ResultGrid,
    bound_check_suite,
    bound_report_to_csv,
    bound_report_to_json,
    fnr_suite,
    figure1_suite,
    grid_to_csv,
    grid_to_json,
    run_experiment,
    table2_suite,
)

_CONFIG_KEYS = ("n", "n0", "delta", "rho", "alpha", "beta", "tau_quantile", "iterations", "seed", "procedures")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line machine-parseable usage errors
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _rows_to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _spec_from_name(name: str, alpha: float, beta: float, tau_quantile: float) -> ProcedureSpec:
    reference = "f0"
    base = name
    if name.endswith("_f1"):
        reference = "f1"
        base = name[: -len("_f1")]
    try:
        kind = ProcedureKind(base)
    except ValueError:
        raise ParameterError(f"unknown procedure {name!r}") from None
    level = alpha if kind.is_fdr else beta
    return ProcedureSpec(kind, level, tau_quantile=tau_quantile, reference=reference)


def load_config(path, seed_override=None) -> ExperimentConfig:
    """Strict TOML config: unknown keys are errors, documented defaults fill the rest.

    Defaults: iterations=5000, alpha=0.05, beta=0.05, tau_quantile=0.5,
    procedures = the four FDR procedures.
    """
    p = Path(path)
    if not p.is_file():
        raise ParameterError(f"config file not found: {path}")
    try:
        data = tomllib.loads(p.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"config parse failure in {path}: {exc}") from None
    for key in data:
        if key not in _CONFIG_KEYS:
            raise ParameterError(f"config key {key!r} is not recognized")
    for key in ("n", "n0", "delta", "rho"):
        if key not in data:
            raise ParameterError(f"config key {key!r} is required")
    seed = seed_override if seed_override is not None else data.get("seed")
    if seed is None:
        raise ParameterError("a seed is required: set 'seed' in the config or pass --seed")
    alpha = float(data.get("alpha", 0.05))
    beta = float(data.get("beta", 0.05))
    tau_quantile = float(data.get("tau_quantile", 0.5))
    names = data.get("procedures", [])
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise ParameterError("config key 'procedures' must be a list of procedure names")
    procedures = tuple(_spec_from_name(name, alpha, beta, tau_quantile) for name in names)
    return ExperimentConfig(
        n=int(data["n"]),
        n0=int(data["n0"]),
        delta=float(data["delta"]),
        rho=float(data["rho"]),
        master_seed=int(seed),
        alpha=alpha,
        beta=beta,
        tau_quantile=tau_quantile,
        iterations=int(data.get("iterations", 5000)),
        procedures=procedures,
    )


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

_THRESHOLD_COLUMNS = ("procedure", "n", "level", "tau_quantile", "k", "threshold", "f0_level")


def _cmd_threshold(args) -> int:
    name = args.procedure.replace("-", "_")
    try:
        kind = ProcedureKind(name)
    except ValueError:
        raise ParameterError(f"unknown procedure {args.procedure!r}") from None
    if kind.is_fdr and args.alpha is None:
        raise ParameterError("--alpha is required for FDR procedures")
    if not kind.is_fdr and args.beta is None:
        raise ParameterError("--beta is required for FNR procedures")
    if kind.is_fdr and args.reference_shift:
        raise ParameterError("--reference-shift applies to FNR procedures only")
    level = args.alpha if kind.is_fdr else args.beta
    reference = "f1" if args.reference_shift else "f0"
    spec = ProcedureSpec(kind, level, tau_quantile=args.tau_quantile, reference=reference)
    est = spec.build(args.reference_shift)
    rows = []
    if spec.kind.is_two_step:
        table = est.threshold_table(args.n)
        ks = range(args.n + 1) if args.k is None else [args.k]
        for k in ks:
            if not 0 <= k <= args.n:
                raise ParameterError(f"--k must lie in [0, n], got {k}")
            t = float(table[k])
            rows.append({"procedure": spec.label, "n": args.n, "level": level,
                         "tau_quantile": args.tau_quantile, "k": k, "threshold": t,
                         "f0_level": float(std_normal_cdf(t))})
    else:
        t = est.threshold_value(args.n)
        rows.append({"procedure": spec.label, "n": args.n, "level": level,
                     "tau_quantile": math.nan, "k": -1, "threshold": t,
                     "f0_level": float(std_normal_cdf(t))})
    text = _rows_to_csv(_THRESHOLD_COLUMNS, rows) if args.format == "csv" else json.dumps(rows, indent=2) + "\n"
    _emit(text, args.out)
    return 0


_EXACT_COLUMNS = ("n", "n0", "delta", "t", "fdr", "fnr", "p_any_rejection", "p_any_acceptance")


def _cmd_exact(args) -> int:
    from .samplers import TruthAssignment

    truth = TruthAssignment.trailing_alternatives(args.n, args.n0, args.delta)
    rates = exact_fdr_independent(args.t, truth)
    row = {"n": args.n, "n0": args.n0, "delta": args.delta, "t": args.t,
           "fdr": rates.fdr, "fnr": rates.fnr,
           "p_any_rejection": rates.p_any_rejection, "p_any_acceptance": rates.p_any_acceptance}
    text = _rows_to_csv(_EXACT_COLUMNS, [row]) if args.format == "csv" else json.dumps([row], indent=2) + "\n"
    _emit(text, args.out)
    return 0


def _emit_grid(grid: ResultGrid, args) -> int:
    _emit(grid_to_csv(grid) if args.format == "csv" else grid_to_json(grid), args.out)
    return 0


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    result = run_experiment(cfg, workers=args.workers)
    return _emit_grid(ResultGrid((result,)), args)


def _cmd_table2(args) -> int:
    return _emit_grid(table2_suite(args.seed, iterations=args.iterations, workers=args.workers), args)


def _cmd_figure1(args) -> int:
    return _emit_grid(figure1_suite(args.seed, iterations=args.iterations, workers=args.workers), args)


def _cmd_fnr_suite(args) -> int:
    return _emit_grid(fnr_suite(args.seed, iterations=args.iterations, workers=args.workers, beta=args.beta), args)


def _cmd_bounds(args) -> int:
    rows = bound_check_suite(args.seed, iterations=args.iterations, workers=args.workers, n=args.n)
    _emit(bound_report_to_csv(rows) if args.format == "csv" else bound_report_to_json(rows), args.out)
    return 0


_MIXTURE_COLUMNS = ("quantity", "value", "se", "count", "iterations", "seed")


def _cmd_mixture(args) -> int:
    cfg = MixtureConfig(n=args.n, pi0=args.pi0, delta=args.delta, rho=args.rho, t=args.t)
    pfdr, pfnr = estimate_pfdr_pfnr(cfg, args.iterations, Seed(args.seed))
    rows = [
        {"quantity": "posterior_null_given_exceed", "value": posterior_null_given_exceed(cfg),
         "se": 0.0, "count": 0, "iterations": args.iterations, "seed": args.seed},
        {"quantity": "posterior_alt_given_accept", "value": posterior_alt_given_accept(cfg),
         "se": 0.0, "count": 0, "iterations": args.iterations, "seed": args.seed},
        {"quantity": "q_value", "value": q_value(cfg),
         "se": 0.0, "count": 0, "iterations": args.iterations, "seed": args.seed},
        {"quantity": "pfdr", "value": pfdr.estimate, "se": pfdr.standard_error,
         "count": pfdr.conditioning_count, "iterations": args.iterations, "seed": args.seed},
        {"quantity": "pfnr", "value": pfnr.estimate, "se": pfnr.standard_error,
         "count": pfnr.conditioning_count, "iterations": args.iterations, "seed": args.seed},
    ]
    text = _rows_to_csv(_MIXTURE_COLUMNS, rows) if args.format == "csv" else json.dumps(rows, indent=2) + "\n"
    _emit(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_output_options(sub, workers=True):
    sub.add_argument("--out", default=None, help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    if workers:
        sub.add_argument("--workers", type=int, default=1, help="worker processes; never changes results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdrcontrol", description="Single-step and two-step FDR/FNR procedures, exact analytics, Monte-Carlo studies")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("threshold", help="critical values of the eight procedures")
    sub.add_argument("--procedure", required=True,
                     help="e.g. sidak-fdr, modified-bonferroni-fdr, sidak-fnr (use --reference-shift for the f1 variant)")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--tau-quantile", dest="tau_quantile", type=float, default=0.5)
    sub.add_argument("--k", type=int, default=None, help="two-step rules: below-cut count (default: all k)")
    sub.add_argument("--reference-shift", dest="reference_shift", type=float, default=0.0,
                     help="FNR rules: reference the alternative CDF shifted by this amount")
    _add_output_options(sub, workers=False)
    sub.set_defaults(handler=_cmd_threshold)

    sub = subs.add_parser("exact", help="exact single-step FDR/FNR under independence")
    sub.add_argument("--t", type=float, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--n0", type=int, required=True)
    sub.add_argument("--delta", type=float, required=True)
    _add_output_options(sub, workers=False)
    sub.set_defaults(handler=_cmd_exact)

    sub = subs.add_parser("simulate", help="run one scenario described by a TOML config")
    sub.add_argument("--config", required=True)
    sub.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    _add_output_options(sub)
    sub.set_defaults(handler=_cmd_simulate)

    for name, handler, extra in (
        ("table2", _cmd_table2, ()),
        ("figure1", _cmd_figure1, ()),
        ("fnr-suite", _cmd_fnr_suite, ("beta",)),
        ("bounds", _cmd_bounds, ("n",)),
    ):
        sub = subs.add_parser(name, help=f"benchmark factorial study ({name})")
        sub.add_argument("--seed", type=int, required=True)
        sub.add_argument("--iterations", type=int, default=5000)
        if "beta" in extra:
            sub.add_argument("--beta", type=float, default=0.05)
        if "n" in extra:
            sub.add_argument("--n", type=int, default=100)
        _add_output_options(sub)
        sub.set_defaults(handler=handler)

    sub = subs.add_parser("mixture", help="mixture-model posteriors, q-value and Monte-Carlo pFDR/pFNR")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--pi0", type=float, required=True)
    sub.add_argument("--delta", type=float, required=True)
    sub.add_argument("--t", type=float, required=True)
    sub.add_argument("--rho", type=float, default=0.0)
    sub.add_argument("--iterations", type=int, default=2000)
    sub.add_argument("--seed", type=int, required=True)
    _add_output_options(sub, workers=False)
    sub.set_defaults(handler=_cmd_mixture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FdrControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
