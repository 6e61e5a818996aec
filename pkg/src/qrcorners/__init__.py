"""Corner statistics and box-norm experiments over finite quasirandom groups."""

from .boxnorm import BoxNormReport, LiftedFunction, box_norm, box_norm_naive, lift, verify_box_control
from .corners import (
    CorrelationSeries,
    FunctionGk,
    SubsetK,
    apply_T,
    apply_T_range,
    corner_config,
    corner_stats,
    count_simplices,
    cov_forward,
    cov_inverse,
    good_fraction,
    hypergraph_edges,
    multicorrelation,
)
from .errors import (
    ConvergenceError,
    DegeneracyError,
    InvalidInputError,
    QRCornersError,
    ResourceCapError,
)
from .groups import (
    Group,
    check_axioms,
    make_alternating,
    make_cyclic,
    make_product,
    make_sl2,
    make_symmetric,
    mul_chain,
    parse_group,
)
from .regularity import (
    Decomposition,
    RankExpansion,
    check_T_range_invariance,
    inverse_lift_k,
    rank_expansion,
    structured_reduction,
    weak_regularity,
)
from .spectral import (
    character_degrees,
    conjugacy_classes,
    quasirandomness_degree,
    verify_mean_ergodic,
)

__version__ = "0.1.0"
