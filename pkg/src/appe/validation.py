"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np

from .graph import LabeledGraph, validate


def check_graphs(graphs) -> list[LabeledGraph]:
    """Return ``graphs`` as a list after checking every graph's invariants."""
    graphs = list(graphs)
    for idx, g in enumerate(graphs):
        if not isinstance(g, LabeledGraph):
            raise TypeError(f"item {idx} is {type(g).__name__}, expected LabeledGraph")
        problem = validate(g)
        if problem is not None:
            raise ValueError(f"graph {idx}: {problem.kind}: {problem.message}")
    return graphs


def check_count_matrix(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    if X.dtype.kind not in "iuf":
        raise ValueError(f"expected numeric data, got dtype {X.dtype}")
    if X.dtype.kind == "f" and not np.isfinite(X).all():
        raise ValueError("input contains NaN or infinity")
    return X
