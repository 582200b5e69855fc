"""Group activity detection toolkit: python surface over the C++ core."""

from gadkit._core import (
    EvalRecord,
    GroupPrediction,
    __version__,
    cross_entropy,
    generate_dataset,
    group_iou,
    group_map,
    hungarian,
    individual_accuracy,
    layer_norm,
    membership_accuracy,
    outlier_miou,
    segment_sample,
    social_accuracy,
    softmax,
)

__all__ = [
    "EvalRecord",
    "GroupPrediction",
    "__version__",
    "cross_entropy",
    "generate_dataset",
    "group_iou",
    "group_map",
    "hungarian",
    "individual_accuracy",
    "layer_norm",
    "membership_accuracy",
    "outlier_miou",
    "segment_sample",
    "social_accuracy",
    "softmax",
]
