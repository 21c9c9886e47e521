"""Mendelian randomization with a binary exposure.

Tools for causal estimation when the exposure is binary and possibly a
dichotomization of a continuous risk factor: summarized-data estimators,
the two interpretable scalings (per-percent prevalence and per-doubling),
nonparametric bounds on the average causal effect, a counterfactual-ledger
simulator for principal-strata analysis, analytic power with the
conservatism deficit, and a decision-flow advisor.
"""

from .advisor import Advice, AdviceCode, AdviceInput, advise
from .bounds import (
    BoundsResult,
    ObservedJoint,
    ace_bounds,
    joint_from_counts,
    null_test_consistency,
    response_type_system,
)
from .core import (
    CausalEstimate,
    ExposureScale,
    Method,
    ScaleLabel,
    SummaryDataset,
    VariantAssociation,
    Violation,
    parse_summary_tsv,
    serialize_summary_tsv,
    validate_dataset,
)
from .errors import (
    BinaryMRError,
    DataError,
    DegenerateDesign,
    DuplicateVariantId,
    EmptyDataset,
    EmptyInstrumentGroup,
    EmptyStratum,
    EstimationError,
    NoCompliers,
    NoFirstStage,
    NoGeneticVariation,
    ParseError,
    PreconditionViolated,
    TooFewVariants,
    WeakInstrumentWarning,
    WrongScale,
    ZeroExposureAssociation,
)
from .estimators import (
    IndividualRecord,
    cochran_q,
    individual_wald,
    ivw,
    mr_egger,
    wald_ratio,
    weighted_median,
)
from .power import (
    PATHWAY_BINARY_X,
    PATHWAY_CONTINUOUS_Z,
    PATHWAY_TOTAL,
    ConservatismReport,
    PowerSpec,
    analytic_gy_slope,
    analytic_y_variance,
    conservatism_report,
    power_gy_test,
    prob_exposure_given_g,
    residual_sd,
)
from .scaling import LN2, interpret, per_doubling, per_percent
from .simulator import (
    ADDITIVE012,
    HAPLOID01,
    CounterfactualLedger,
    ExclusionReport,
    SimConfig,
    StrataTally,
    WaldCaceReport,
    analytic_joint,
    binary_outcome_ace,
    binary_outcome_counts,
    classify_strata,
    complier_proportion_estimate,
    exclusion_violation_demo,
    gy_rejection_rate,
    parse_sim_config,
    simulate,
    true_cace,
    wald_vs_cace_experiment,
)

__version__ = "0.1.0"
