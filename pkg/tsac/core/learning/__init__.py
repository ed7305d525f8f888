"""Online identification, Thompson sampling and optimistic model search."""

from tsac.core.learning.optimism import (PgdConfig, finite_difference_gradient,
                                         optimistic_search,
                                         project_to_ellipsoid)
from tsac.core.learning.rls import (ConfidenceRadii, RlsState,
                                    confidence_radii, estimation_error,
                                    in_confidence_set, log_det_ratio,
                                    min_eigenvalue_V, rls_new, rls_update,
                                    v_sqrt, weighted_distance)
from tsac.core.learning.sampling import (TsSample, candidate_draw,
                                         estimate_p_opt, is_optimistic,
                                         ts_sample)

__all__: list[str] = [
    # Least squares
    "RlsState",
    "ConfidenceRadii",
    "rls_new",
    "rls_update",
    "log_det_ratio",
    "confidence_radii",
    "weighted_distance",
    "in_confidence_set",
    "min_eigenvalue_V",
    "v_sqrt",
    "estimation_error",
    # Sampling
    "TsSample",
    "candidate_draw",
    "ts_sample",
    "is_optimistic",
    "estimate_p_opt",
    # Optimism
    "PgdConfig",
    "optimistic_search",
    "project_to_ellipsoid",
    "finite_difference_gradient",
]
