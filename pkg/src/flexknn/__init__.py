"""Flexible k-nearest-neighbor classification with rejection.

The flexible classifier labels a query from every training sample within a
fixed radius ``d_max`` and refuses to label it when that neighborhood is
empty (or smaller than ``min_k``). The standard KNN is provided as the
baseline, together with radius calibration, evaluation protocols and
synthetic data.
"""

__version__ = "0.1.0"

from .calibration import DmaxEstimate, estimate_dmax
from .classifiers import (
    FlexKnnConfig,
    KnnConfig,
    VoteTable,
    Voting,
    classify_batch,
    classify_flexknn,
    classify_knn,
    k_nearest_neighbors,
    radius_neighbors,
    tally_votes,
)
from .core import (
    ClassificationOutcome,
    ClassLabel,
    LabeledSample,
    NeighborSet,
    RejectionReason,
    TrainingSet,
    build_training_set,
    training_set_from_arrays,
)
from .dataio import (
    NormalizationParams,
    apply_normalization,
    fit_normalization,
    read_dataset,
    write_dataset,
)
from .evaluation import (
    EvaluationReport,
    HoldoutReport,
    SweepReport,
    evaluate,
    missing_class_experiment,
    parse_grid,
    sweep_dmax,
)
from .metrics import CANBERRA, EUCLIDEAN, MANHATTAN, Metric, distance, minkowski, pairwise_distances
from .synthdata import Scenario, ScenarioSpec, SplitMix64, clusters, generate_scenario
