"""Multicalibration auditing, sample-complexity bounds and convergence checks."""

from .bounds import (
    ASTRONOMICAL,
    BoundParams,
    Infeasible,
    achievable_epsilon,
    binary_uc_bound,
    chernoff_absolute_tail,
    chernoff_relative_tail,
    finite_class_bound,
    graph_dim_bound,
    lower_bound,
    occupancy_threshold,
    subpopulation_coverage_bound,
)
from .convergence import (
    ConvergenceSetup,
    LowerBoundFixture,
    TrialOutcome,
    build_lower_bound_fixture,
    deviation_trial,
    distinguishing_experiment,
    failure_rate,
    fraction_error_check,
    numerator_denominator_check,
)
from .dataset import Dataset, DatasetError, DomainViolation, RunConfig, export_distribution, load_dataset
from .dimensions import (
    BinaryHypothesis,
    LimitExceeded,
    PairFunction,
    binarize,
    binarize_class,
    check_lemma_graph,
    check_lemma_phi,
    graph_dimension,
    true_positive_class,
    vc_dimension,
)
from .metrics import (
    AuditReport,
    Category,
    CategoryStats,
    audit,
    audit_class,
    category_stats,
    empirical_calibration_error,
    interesting_categories,
    true_calibration_error,
)
from .model import (
    FiniteDistribution,
    Interval,
    IntervalPartition,
    LabeledSample,
    PredictionSpace,
    Predictor,
    PredictorClass,
    SubpopulationCollection,
    ValueNotCovered,
    draw_sample,
    interval_of,
    partition_of,
)

__version__ = "0.1.0"
