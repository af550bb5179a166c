"""Adjacent point merging: the labeled line-graph step and its iteration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import LabeledGraph, LabelInterner, OutOfVocabularyError, canonical_app_key

OOV_POLICIES = ("raise", "skip")


@dataclass
class LayerStack:
    """All merging layers of one graph; ``graphs[0]`` is the input."""

    graphs: list[LabeledGraph]
    interners: list[LabelInterner] = field(default_factory=list)

    @property
    def top(self) -> LabeledGraph:
        return self.graphs[-1]

    @property
    def n_layers(self) -> int:
        return len(self.graphs) - 1


def apm_once(graph: LabeledGraph, interner: LabelInterner, oov: str = "raise") -> LabeledGraph:
    """Merge every pair of adjacent vertices into a single new vertex.

    Each input edge becomes one output vertex labeled by the interned pattern
    of its two endpoint labels and its own edge label. Two output vertices are
    joined when their source edges share an endpoint, and that edge is
    labeled with the shared endpoint's label. Output vertices follow input
    edge order.

    Parameters
    ----------
    graph : LabeledGraph
        A valid simple graph.
    interner : LabelInterner
        Pattern vocabulary for the output layer. Unseen patterns are registered
        unless the interner is frozen.
    oov : {"raise", "skip"}
        What to do with an unseen pattern on a frozen interner. ``"skip"``
        drops the corresponding output vertex together with its edges.

    Returns
    -------
    LabeledGraph
        The merged graph, one layer above ``graph``.
    """
    if oov not in OOV_POLICIES:
        raise ValueError(f"oov must be one of {OOV_POLICIES}, got {oov!r}")
    labels = graph.vertex_labels
    edge_labels = graph.edge_labels
    new_index = [-1] * len(graph.edges)
    new_labels: list[int] = []
    for k, (i, j) in enumerate(graph.edges):
        key = canonical_app_key(
            labels[i], labels[j], edge_labels[k] if edge_labels is not None else None
        )
        try:
            label = interner.intern(key)
        except OutOfVocabularyError:
            if oov == "raise":
                raise
            continue
        new_index[k] = len(new_labels)
        new_labels.append(label)

    incident: list[list[int]] = [[] for _ in range(graph.num_vertices)]
    for k, (i, j) in enumerate(graph.edges):
        if new_index[k] >= 0:
            incident[i].append(k)
            incident[j].append(k)

    new_edges: list[tuple[int, int]] = []
    new_edge_labels: list[int] = []
    for v, around in enumerate(incident):
        shared_label = labels[v]
        for a in range(len(around)):
            ea = graph.edges[around[a]]
            for b in range(a + 1, len(around)):
                eb = graph.edges[around[b]]
                # distinct simple-graph edges meet in at most one vertex
                assert not (ea[0] in eb and ea[1] in eb), f"edges {ea} and {eb} coincide"
                new_edges.append((new_index[around[a]], new_index[around[b]]))
                new_edge_labels.append(shared_label)

    return LabeledGraph(
        num_vertices=len(new_labels),
        vertex_labels=tuple(new_labels),
        edges=tuple(new_edges),
        edge_labels=tuple(new_edge_labels),
        layer=graph.layer + 1,
    )


def apm_multi_layer(
    graph: LabeledGraph,
    k: int,
    interners: Sequence[LabelInterner],
    oov: str = "raise",
) -> LayerStack:
    """Apply :func:`apm_once` ``k`` times, using ``interners[i]`` for layer ``i + 1``."""
    if k < 0:
        raise ValueError(f"layer count must be non-negative, got {k}")
    if len(interners) != k:
        raise ValueError(f"need {k} interners, got {len(interners)}")
    graphs = [graph]
    for interner in interners:
        graphs.append(apm_once(graphs[-1], interner, oov=oov))
    return LayerStack(graphs=graphs, interners=list(interners))


def line_graph_edge_count(graph: LabeledGraph) -> int:
    """Edge count of the merged graph: sum over vertices of C(deg, 2)."""
    return sum(d * (d - 1) // 2 for d in graph.degrees())
