"""Graph classification with multi-layer adjacent point merging embeddings."""

from .datasets import TUDataset, dataset_summary, parse_tud, write_tud
from .embedding import (
    APPEmbedding,
    ClassWeights,
    PatternSelector,
    SelectionResult,
    apply_selection,
    compute_loss,
    embed,
    fit_class_weights,
    mean_weight_loss,
    select_top_d,
)
from .graph import AppKey, LabeledGraph, LabelInterner, OutOfVocabularyError, canonical_app_key, validate
from .model_selection import CvConfig, CvReport, nested_cv
from .svm import OneVsOneLinearSVC, SvmModel, predict, train_svm
from .transform import LayerStack, apm_multi_layer, apm_once, line_graph_edge_count

__version__ = "0.1.0"

__all__ = [
    "APPEmbedding",
    "AppKey",
    "ClassWeights",
    "CvConfig",
    "CvReport",
    "LabeledGraph",
    "LabelInterner",
    "LayerStack",
    "OneVsOneLinearSVC",
    "OutOfVocabularyError",
    "PatternSelector",
    "SelectionResult",
    "SvmModel",
    "TUDataset",
    "apm_multi_layer",
    "apm_once",
    "apply_selection",
    "canonical_app_key",
    "compute_loss",
    "dataset_summary",
    "embed",
    "fit_class_weights",
    "line_graph_edge_count",
    "mean_weight_loss",
    "nested_cv",
    "parse_tud",
    "predict",
    "select_top_d",
    "train_svm",
    "validate",
    "write_tud",
]
