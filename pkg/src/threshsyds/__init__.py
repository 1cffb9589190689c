"""Learning threshold synchronous dynamical systems with unknown graph and thresholds."""

from .bruteforce import brute_force_consistent
from .core import (
    FormatError,
    Graph,
    ThresholdSystem,
    format_system,
    parse_system,
    successor,
    successor_many,
    trajectory,
    validate_system,
)
from .learners import (
    LearnerRefusal,
    PartialInstance,
    RefusalReason,
    UnsupportedInstance,
    compatibility_graph,
    learn_directed_bounded,
    learn_known_graph,
    learn_matching,
    learn_partial,
)
from .observations import (
    BernoulliDistribution,
    EmpiricalDistribution,
    TrainingSet,
    UniformDistribution,
    format_training_set,
    is_consistent,
    parse_training_set,
    sample_training_set,
)

__all__ = [
    "BernoulliDistribution",
    "EmpiricalDistribution",
    "FormatError",
    "Graph",
    "LearnerRefusal",
    "PartialInstance",
    "RefusalReason",
    "ThresholdSystem",
    "TrainingSet",
    "UniformDistribution",
    "UnsupportedInstance",
    "brute_force_consistent",
    "compatibility_graph",
    "format_system",
    "format_training_set",
    "is_consistent",
    "learn_directed_bounded",
    "learn_known_graph",
    "learn_matching",
    "learn_partial",
    "parse_system",
    "parse_training_set",
    "sample_training_set",
    "successor",
    "successor_many",
    "trajectory",
    "validate_system",
]
