"""Observability analysis and minimum sensor placement for probabilistic Boolean networks."""

__version__ = "0.1.0"

from .analysis import (
    AnalysisReport,
    candidate_sufficient,
    is_observable,
    maximum_invariant_set,
    minimal_anchor_sets,
    minimal_targets,
    one_step_to_diagonal,
    positive_prob_fixed_points,
)
from .augmented import AugmentedSystem, StochasticMatrix, build_augmented, expected_transition, pair_map
from .errors import InfeasibleCoverError, ModelFormatError, PbnError, ResourceLimitError
from .model import (
    BoolExpr,
    PbnModel,
    assemble_network,
    decode_state,
    encode_state,
    parse_bool_expr,
    parse_model,
    parse_model_file,
    render_model,
    structure_matrix,
)
from .partition import (
    Partition,
    StateSet,
    canonicalize,
    diagonal_set,
    mirror_close,
    mirror_index,
    pair_index,
    pair_split,
    partition_states,
)
from .reachability import ReachResult, one_step_robust, robust_reach, robust_reach_oracle
from .sensors import (
    SensorPlan,
    TruthMatrix,
    distinguishable_under,
    extend_output,
    global_min_sensors,
    min_cover,
    single_variable_output,
    truth_matrix,
)
from .simulate import (
    Trajectory,
    estimate_distinguishability,
    exhaustive_distinguishability,
    pairs_distinguishable_within,
    sample_trajectory,
)
from .stp import BooleanMatrix, LogicalMatrix, khatri_rao, kron, logical_compose, stp

__all__ = [
    "AnalysisReport",
    "AugmentedSystem",
    "BoolExpr",
    "BooleanMatrix",
    "InfeasibleCoverError",
    "LogicalMatrix",
    "ModelFormatError",
    "Partition",
    "PbnError",
    "PbnModel",
    "ReachResult",
    "ResourceLimitError",
    "SensorPlan",
    "StateSet",
    "StochasticMatrix",
    "Trajectory",
    "TruthMatrix",
    "assemble_network",
    "build_augmented",
    "candidate_sufficient",
    "canonicalize",
    "decode_state",
    "diagonal_set",
    "distinguishable_under",
    "encode_state",
    "estimate_distinguishability",
    "exhaustive_distinguishability",
    "expected_transition",
    "extend_output",
    "global_min_sensors",
    "is_observable",
    "khatri_rao",
    "kron",
    "logical_compose",
    "maximum_invariant_set",
    "min_cover",
    "minimal_anchor_sets",
    "minimal_targets",
    "mirror_close",
    "mirror_index",
    "one_step_robust",
    "one_step_to_diagonal",
    "pair_index",
    "pair_map",
    "pair_split",
    "pairs_distinguishable_within",
    "parse_bool_expr",
    "parse_model",
    "parse_model_file",
    "partition_states",
    "positive_prob_fixed_points",
    "render_model",
    "robust_reach",
    "robust_reach_oracle",
    "sample_trajectory",
    "single_variable_output",
    "stp",
    "structure_matrix",
    "truth_matrix",
]
