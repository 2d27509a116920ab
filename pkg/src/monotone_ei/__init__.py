"""Ecological inference for two-group means under monotonicity restrictions.

Aggregate data give each neighborhood's population, the share of group 1 and
the overall mean outcome.  The package computes the method-of-bounds interval,
the ecological-regression and neighborhood-model point estimates, sharper
intervals under sign restrictions on the within- and between-group
associations, neighborhood-level analogues driven by a kernel slope estimate,
microdata checks of those signs, and bootstrap confidence intervals.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BootstrapFailure,
    ConfigurationError,
    DegenerateError,
    EIError,
    FeasibilityError,
    InstanceTooLargeError,
    InsufficientDataError,
    NotFoundError,
    UndefinedDerivativeError,
    ValidationError,
)
from .core import (  # noqa: E402
    AggregateData,
    AssumptionSet,
    GroupMeansProfile,
    Interval,
    Moments,
    NeighborhoodRecord,
    OutcomeBounds,
    SignAssumption,
    Status,
    check_feasible,
    deltas_from_profile,
    load_aggregate,
    moments,
    profile_means,
    read_aggregate_csv,
    write_aggregate_csv,
)
from .estimators import PointEstimates, ecological_regression, neighborhood_model  # noqa: E402
from .bounds import (  # noqa: E402
    BoundsReport,
    MobEstimates,
    MultiGroupData,
    all_cells,
    bounds_for,
    bounds_for_d,
    bounds_for_mean,
    method_of_bounds,
    multi_group_bounds,
)
from .local import (  # noqa: E402
    LocalBoundsReport,
    LocalMob,
    cv_bandwidth,
    cv_scores,
    local_derivative,
    local_monotone_bounds,
    neighborhood_mob,
    slope_curve,
    tilde_aggregate,
    tilde_monotone_bounds,
)
from .micro import (  # noqa: E402
    CovarianceEstimate,
    MicroData,
    MicroRecord,
    conditional_covariance,
    estimate_delta_signs,
    read_micro_csv,
    sign_verdict,
)
from .inference import bootstrap, im_critical_value, imbens_manski_ci  # noqa: E402
from .oracle import (  # noqa: E402
    PopulationConfig,
    SyntheticTruth,
    enumerate_feasible,
    sharpness_check,
    synthesize_population,
)
