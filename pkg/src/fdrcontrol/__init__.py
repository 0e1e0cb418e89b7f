"""Single-step and adaptive two-step multiple testing procedures for FDR and
FNR control, exact error-rate analytics under independence, mixture-model
pFDR/pFNR tools, and a reproducible Monte-Carlo experiment harness."""

from .distributions import (
    location_cdf,
    location_exceedance,
    poisson_binomial_pmf,
    std_normal_cdf,
    std_normal_quantile,
    std_normal_sf,
)
from .exceptions import (
    FdrControlError,
    InternalConsistencyError,
    ParameterError,
    UndefinedConditionalRateError,
)
from .metrics import (
    ExactErrorRates,
    OutcomeTable,
    exact_error_rates_from_probs,
    exact_fdr_independent,
    exact_fnr_independent,
    exact_rates_for_shifts,
    fdp,
    fnp,
    outcome_table,
    power_from_rates,
    single_step_fdr_supremum,
    single_step_fnr_supremum,
    two_step_fdr_bound,
    two_step_fdr_linear_bound,
    two_step_fnr_bound,
)
from .mixture import (
    ConditionalRate,
    MixtureConfig,
    estimate_pfdr_pfnr,
    mixture_fdr_bound,
    posterior_alt_given_accept,
    posterior_null_given_accept,
    posterior_null_given_exceed,
    q_value,
)
from .procedures import (
    BonferroniFdr,
    BonferroniFnr,
    ModifiedBonferroniFdr,
    ModifiedBonferroniFnr,
    ModifiedSidakFdr,
    ModifiedSidakFnr,
    ProcedureKind,
    ProcedureSpec,
    RejectionSet,
    SidakFdr,
    SidakFnr,
    apply_single_step,
    apply_two_step,
    bonferroni_fdr_threshold,
    bonferroni_fnr_threshold,
    estimated_null_count,
    make_procedure,
    modified_bonferroni_fdr,
    modified_bonferroni_fdr_threshold,
    modified_bonferroni_fnr_threshold,
    modified_sidak_fdr_threshold,
    modified_sidak_fnr_threshold,
    sidak_fdr_threshold,
    sidak_fnr_threshold,
)
from .samplers import MixtureDraw, Seed, TruthAssignment, sample_equicorrelated, sample_mixture
from .simulation import (
    CellEstimate,
    ExperimentConfig,
    ResultGrid,
    ScenarioResult,
    bound_check_suite,
    default_fdr_procedures,
    factorial_suite,
    figure1_suite,
    fnr_procedures,
    fnr_suite,
    grid_to_csv,
    grid_to_json,
    run_experiment,
    table2_suite,
)

__version__ = "0.1.0"
