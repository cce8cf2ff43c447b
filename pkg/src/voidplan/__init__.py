"""voidplan: seabed sensor placement maximizing the probability of
detecting every Poisson-distributed target arrival.

The pipeline: represent the uncertain arrival-intensity field on a grid
(:mod:`voidplan.field`), model per-sensor detection
(:mod:`voidplan.sensing`), evaluate the void-probability objective and
its two closed-form approximations (:mod:`voidplan.objective`), bound the
approximation errors (:mod:`voidplan.bounds`), and pick sensor locations
greedily (:mod:`voidplan.placement`).  The ``voidplan`` command line
(:mod:`voidplan.cli`) ties the steps together.
"""

from .field import (
    ArrivalRecord,
    GridDomain,
    IntensityField,
    MaternKernel,
    estimate_field_from_arrivals,
    load_arrivals,
    load_field,
    matern_cov,
    sample_log_gaussian_field,
    save_field,
    synthesize_field,
)
from .sensing import SensorModel, SensorNetwork, detection_prob, miss_prob
from .objective import (
    McEstimate,
    MomentPair,
    covariance_exact_variance,
    expected_undetected,
    jensen_lower_bound,
    mc_void_probability,
    undetected_count_samples,
    undetected_moments,
    variance_corrected_approx,
    variance_undetected,
)
from .bounds import (
    DominanceReport,
    GapDiagnostics,
    corrected_gap_bounds,
    dominance_check,
    jensen_gap_upper,
    measure_gaps,
    tail_margin,
    tail_margin_complement,
    tail_margin_derivative,
    taylor_remainder_ratio,
)
from .placement import CandidateSet, PlacementTrace, exhaustive_place, greedy_place

__version__ = "0.1.0"

__all__ = [
    "ArrivalRecord",
    "CandidateSet",
    "DominanceReport",
    "GapDiagnostics",
    "GridDomain",
    "IntensityField",
    "MaternKernel",
    "McEstimate",
    "MomentPair",
    "PlacementTrace",
    "SensorModel",
    "SensorNetwork",
    "corrected_gap_bounds",
    "covariance_exact_variance",
    "detection_prob",
    "dominance_check",
    "estimate_field_from_arrivals",
    "exhaustive_place",
    "expected_undetected",
    "greedy_place",
    "jensen_gap_upper",
    "jensen_lower_bound",
    "load_arrivals",
    "load_field",
    "matern_cov",
    "mc_void_probability",
    "measure_gaps",
    "miss_prob",
    "sample_log_gaussian_field",
    "save_field",
    "synthesize_field",
    "tail_margin",
    "tail_margin_complement",
    "tail_margin_derivative",
    "taylor_remainder_ratio",
    "undetected_count_samples",
    "undetected_moments",
    "variance_corrected_approx",
    "variance_undetected",
    "__version__",
]
