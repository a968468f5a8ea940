"""Oriented-box geometry, anchor machinery, losses, and evaluation metrics."""

from .anchors import (
    Anchor,
    AnchorConfig,
    AnchorLabel,
    generate_anchors,
    label_anchors,
    select_top_proposals,
)
from .augment import (
    DEFAULT_ANGLES,
    RasterImage,
    augment_dataset,
    read_raster,
    rotate_annotation,
    rotate_image,
    write_raster,
)
from .coding import (
    LossBreakdown,
    RegressionTarget,
    classification_loss,
    decode,
    encode,
    gradient_check,
    numeric_gradient,
    orpn_loss,
    regression_loss,
    smooth_l1,
    verify_loss_gradients,
)
from .dataio import (
    AnnotatedFingerphoto,
    DatasetSplit,
    FingerAnnotation,
    FingerLabel,
    kfold,
    parse_annotations,
    serialize_annotations,
    split_dataset,
)
from .geometry import (
    ConvexPolygon,
    OrientedBox,
    intersect,
    normalize_angle,
    rotated_iou,
    rotated_nms,
    to_polygon,
)
from .metrics import (
    DistributionSummary,
    MaeReport,
    RocCurve,
    ScoreSet,
    SideErrors,
    eap,
    label_accuracy,
    mae,
    nist_tolerance_check,
    roc,
    side_errors,
    summarize_distribution,
    tar_at_far,
)
from .report import EvaluationReport, evaluate_annotations, evaluate_image

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "AnchorConfig",
    "AnchorLabel",
    "AnnotatedFingerphoto",
    "ConvexPolygon",
    "DEFAULT_ANGLES",
    "DatasetSplit",
    "DistributionSummary",
    "EvaluationReport",
    "FingerAnnotation",
    "FingerLabel",
    "LossBreakdown",
    "MaeReport",
    "OrientedBox",
    "RasterImage",
    "RegressionTarget",
    "RocCurve",
    "ScoreSet",
    "SideErrors",
    "augment_dataset",
    "classification_loss",
    "decode",
    "eap",
    "encode",
    "evaluate_annotations",
    "evaluate_image",
    "generate_anchors",
    "gradient_check",
    "intersect",
    "kfold",
    "label_accuracy",
    "label_anchors",
    "mae",
    "nist_tolerance_check",
    "normalize_angle",
    "numeric_gradient",
    "orpn_loss",
    "parse_annotations",
    "read_raster",
    "regression_loss",
    "roc",
    "rotate_annotation",
    "rotate_image",
    "rotated_iou",
    "rotated_nms",
    "select_top_proposals",
    "serialize_annotations",
    "side_errors",
    "smooth_l1",
    "split_dataset",
    "summarize_distribution",
    "tar_at_far",
    "to_polygon",
    "verify_loss_gradients",
    "write_raster",
]
