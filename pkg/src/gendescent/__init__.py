"""Distributions of generalized descents (d-descents) of permutations."""

__version__ = "0.1.0"

from .errors import CapacityError, InputError, UnsupportedRegimeError  # noqa: E402
from .stats import (  # noqa: E402
    MomentReport,
    PairClass,
    PairClassCounts,
    PairIndex,
    Permutation,
    Uniform,
    Vector,
    classify_pair,
    count_statistic,
    eligible_pair_count,
    exact_moments,
    is_descent_pair,
    mean_closed_form,
    pair_class_counts,
    pair_class_tally,
    published_pair_class_counts,
    published_variance,
    variance_closed_form,
)
from .enumeration import (  # noqa: E402
    DistributionTable,
    exact_distribution,
    log_concavity_report,
    moments_from_table,
    oracle_eulerian,
    oracle_inversions,
    unimodality_check,
)
from .montecarlo import (  # noqa: E402
    NormalityReport,
    SimulationConfig,
    growth_regime_experiment,
    ks_statistic,
    sample_permutation,
    simulate,
    standard_normal_cdf,
)
from .janson import (  # noqa: E402
    Fixed,
    Power,
    build_dependency_graph,
    convergence_table,
    independence_audit,
    janson_bound,
    max_degree,
)
