"""Pattern-count embeddings and class-discriminative feature selection.

The functions here operate on plain arrays; :class:`APPEmbedding` and
:class:`PatternSelector` wrap them as scikit-learn transformers so the whole
chain can sit in a :class:`sklearn.pipeline.Pipeline`.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from .graph import LabelInterner
from .transform import LayerStack, apm_multi_layer
from .validation import check_count_matrix, check_graphs


class DegenerateDimensionWarning(UserWarning):
    """A dimension or class carries no training signal."""


@dataclass
class ClassWeights:
    """Per-class sums of training embeddings, one row per entry of ``class_ids``."""

    weights: np.ndarray
    class_ids: np.ndarray


@dataclass
class SelectionResult:
    loss: np.ndarray
    selected: np.ndarray
    d_requested: int

    @property
    def d_effective(self) -> int:
        return len(self.selected)


def embed(stack: LayerStack, vocab_size: int) -> np.ndarray:
    """Count top-layer vertices per label; labels past ``vocab_size`` are ignored."""
    labels = np.asarray(stack.top.vertex_labels, dtype=np.int64)
    labels = labels[labels < vocab_size]
    return np.bincount(labels, minlength=vocab_size).astype(np.int64)


def fit_class_weights(
    embeddings, labels, classes: Optional[Sequence[int]] = None
) -> ClassWeights:
    """Sum the embeddings of each class.

    ``classes`` fixes the row order and may name classes with no graphs, which
    then get a zero row and a :class:`DegenerateDimensionWarning`.
    """
    X = np.asarray(embeddings)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("fit_class_weights needs a non-empty 2-D embedding matrix")
    if len(y) != X.shape[0]:
        raise ValueError(f"{len(y)} labels for {X.shape[0]} embeddings")
    class_ids = np.unique(y) if classes is None else np.asarray(classes)
    weights = np.zeros((len(class_ids), X.shape[1]), dtype=np.int64 if X.dtype.kind in "iu" else float)
    for row, c in enumerate(class_ids):
        members = y == c
        if not members.any():
            warnings.warn(f"class {c} has no training graphs", DegenerateDimensionWarning)
            continue
        weights[row] = X[members].sum(axis=0)
    return ClassWeights(weights=weights, class_ids=class_ids)


def compute_loss(weights: ClassWeights) -> np.ndarray:
    """Per-dimension discriminative loss; lower means more useful.

    For each class ``i`` the score is ``-(w_i - sum_{j != i} w_j)**2 / sum_j w_j``
    and the loss is its maximum over classes. Dimensions with zero total weight
    get loss 0.
    """
    W = np.asarray(weights.weights, dtype=np.float64)
    if W.shape[0] < 2:
        raise ValueError("the discriminative loss needs at least two classes")
    total = W.sum(axis=0)
    rest = total[None, :] - W
    numer = (W - rest) ** 2
    empty = total == 0
    if empty.any():
        warnings.warn(
            f"{int(empty.sum())} dimensions have zero weight in every class",
            DegenerateDimensionWarning,
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        per_class = -numer / total[None, :]
    loss = per_class.max(axis=0)
    loss[empty] = 0.0
    return loss


def mean_weight_loss(weights: ClassWeights) -> np.ndarray:
    """Element-wise mean of the class weight rows."""
    W = np.asarray(weights.weights, dtype=np.float64)
    if W.shape[0] < 1:
        raise ValueError("need at least one class")
    return W.mean(axis=0)


def select_top_d(loss, d: int) -> SelectionResult:
    """Keep the ``d`` smallest-loss dimensions; ties go to the lower index."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    loss = np.asarray(loss, dtype=np.float64)
    order = np.argsort(loss, kind="stable")
    selected = np.sort(order[: min(d, len(loss))])
    return SelectionResult(loss=loss, selected=selected, d_requested=d)


def apply_selection(embedding, selection: SelectionResult) -> np.ndarray:
    embedding = np.asarray(embedding)
    if embedding.shape[-1] != len(selection.loss):
        raise ValueError(
            f"embedding has {embedding.shape[-1]} dimensions, "
            f"selection was fit on {len(selection.loss)}"
        )
    return embedding[..., selection.selected]


class APPEmbedding(TransformerMixin, BaseEstimator):
    """Embed labeled graphs as counts of top-layer merged-vertex labels.

    ``fit`` runs ``n_layers`` rounds of adjacent point merging over the
    training graphs, registering every pattern seen into one interner per
    layer, then freezes them. ``transform`` reuses the frozen vocabularies;
    patterns never seen during ``fit`` are dropped.

    Parameters
    ----------
    n_layers : int, default=2
        Number of merging rounds.

    Attributes
    ----------
    interners_ : list of LabelInterner
        Frozen vocabulary of each layer, bottom to top.
    vocab_size_ : int
        Number of distinct top-layer labels; the embedding width.
    """

    def __init__(self, n_layers: int = 2):
        self.n_layers = n_layers

    def _stacks(self, graphs, interners, oov):
        return [apm_multi_layer(g, self.n_layers, interners, oov=oov) for g in graphs]

    def fit(self, X, y=None):
        self.fit_transform(X, y)
        return self

    def fit_transform(self, X, y=None, **fit_params):
        if int(self.n_layers) < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")
        graphs = check_graphs(X)
        interners = [LabelInterner() for _ in range(self.n_layers)]
        stacks = self._stacks(graphs, interners, "raise")
        self.interners_ = [it.freeze() for it in interners]
        self.vocab_size_ = len(interners[-1])
        self.layer_sizes_ = [len(it) for it in interners]
        return np.vstack([embed(s, self.vocab_size_) for s in stacks]) if stacks else np.zeros(
            (0, self.vocab_size_), dtype=np.int64
        )

    def transform(self, X):
        check_is_fitted(self, "interners_")
        graphs = check_graphs(X)
        if not graphs:
            return np.zeros((0, self.vocab_size_), dtype=np.int64)
        stacks = self._stacks(graphs, self.interners_, "skip")
        return np.vstack([embed(s, self.vocab_size_) for s in stacks])


class PatternSelector(SelectorMixin, BaseEstimator):
    """Keep the ``n_features`` most class-discriminative pattern counts.

    Parameters
    ----------
    n_features : int, default=100
        Number of dimensions to keep (capped at the input width).
    selection : {"loss", "mean"}, default="loss"
        ``"loss"`` ranks by the discriminative loss; ``"mean"`` ranks by the
        mean class weight instead.
    mean_order : {"ascending", "descending"}, default="ascending"
        Only used with ``selection="mean"``. ``"ascending"`` keeps the smallest
        mean weights, treating the mean as a drop-in loss; ``"descending"``
        keeps the largest.
    """

    def __init__(self, n_features: int = 100, selection: str = "loss", mean_order: str = "ascending"):
        self.n_features = n_features
        self.selection = selection
        self.mean_order = mean_order

    def fit(self, X, y):
        X = check_count_matrix(X)
        if self.selection not in ("loss", "mean"):
            raise ValueError(f"selection must be 'loss' or 'mean', got {self.selection!r}")
        if self.mean_order not in ("ascending", "descending"):
            raise ValueError(f"mean_order must be 'ascending' or 'descending', got {self.mean_order!r}")
        self.class_weights_ = fit_class_weights(X, y)
        if self.selection == "loss":
            score = compute_loss(self.class_weights_)
        else:
            score = mean_weight_loss(self.class_weights_)
            if self.mean_order == "descending":
                score = -score
        self.selection_ = select_top_d(score, self.n_features)
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "selection_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.selection_.selected] = True
        return mask

    def transform(self, X):
        check_is_fitted(self, "selection_")
        return apply_selection(check_count_matrix(X), self.selection_)


def write_embedding_csv(path, graph_ids, classes, matrix, columns=None) -> None:
    """One row per graph: ``graph_id, class`` followed by the counts."""
    matrix = np.asarray(matrix)
    if columns is None:
        columns = [f"dim_{j}" for j in range(matrix.shape[1])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph_id", "class", *columns])
        for gid, cls, row in zip(graph_ids, classes, matrix):
            writer.writerow([gid, cls, *(int(v) for v in row)])


def write_embedding_sidecar(path, layer_sizes, d_requested, selected, **extra) -> None:
    payload = {
        "vocab_size_per_layer": [int(s) for s in layer_sizes],
        "d_requested": None if d_requested is None else int(d_requested),
        "d_effective": int(len(selected)),
        "selected_indices": [int(i) for i in selected],
        **extra,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

