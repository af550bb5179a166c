"""Labeled graphs, adjacent point pattern keys and the label interner."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence


class OutOfVocabularyError(KeyError):
    """Raised when a frozen interner is asked to allocate a label."""


class AppKey(NamedTuple):
    """Canonical adjacent point pattern: unordered label pair plus edge label."""

    label_lo: int
    label_hi: int
    edge_label: Optional[int] = None


def canonical_app_key(la: int, lb: int, le: Optional[int] = None) -> AppKey:
    """Build the order-insensitive pattern key for two adjacent vertex labels.

    Omitting ``le`` gives the vertex-only pattern used for graphs without
    edge labels.
    """
    if la <= lb:
        return AppKey(la, lb, le)
    return AppKey(lb, la, le)


class LabelInterner:
    """Injective map from pattern keys to dense integer labels.

    Labels are handed out as 0, 1, 2, ... in first-seen order. The interner is
    used in two phases: register keys while unfrozen, then :meth:`freeze` it,
    after which unseen keys raise :class:`OutOfVocabularyError`. A frozen
    interner is read-only and can be shared freely across threads.
    """

    def __init__(self) -> None:
        self.forward: dict[AppKey, int] = {}
        self.reverse: list[AppKey] = []
        self.frozen = False
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.reverse)

    def __contains__(self, key) -> bool:
        return key in self.forward

    def intern(self, key: AppKey) -> int:
        label = self.forward.get(key)
        if label is not None:
            return label
        if self.frozen:
            raise OutOfVocabularyError(key)
        with self._lock:
            label = self.forward.get(key)
            if label is None:
                label = len(self.reverse)
                self.forward[key] = label
                self.reverse.append(key)
        return label

    def get(self, key: AppKey) -> Optional[int]:
        return self.forward.get(key)

    def key_of(self, label: int) -> AppKey:
        return self.reverse[label]

    def freeze(self) -> "LabelInterner":
        self.frozen = True
        return self

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"LabelInterner(size={len(self)}, frozen={self.frozen})"


@dataclass(frozen=True)
class LabeledGraph:
    """Undirected simple graph with integer vertex labels.

    ``edges`` holds ``(i, j)`` pairs with ``i < j``. ``edge_labels`` is either
    ``None`` or aligned with ``edges``. ``layer`` counts how many merging
    steps produced the graph (0 for an input graph).

    Use :meth:`from_edges` to build one from raw, possibly duplicated, edge
    listings; the plain constructor stores its arguments as given.
    """

    num_vertices: int
    vertex_labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    edge_labels: Optional[tuple[int, ...]] = None
    layer: int = 0

    @classmethod
    def from_edges(
        cls,
        num_vertices: int,
        vertex_labels: Sequence[int],
        edges: Iterable[tuple[int, int]],
        edge_labels: Optional[Sequence[int]] = None,
        layer: int = 0,
    ) -> "LabeledGraph":
        """Normalize edges to ``i < j`` and drop repeated listings.

        Raises
        ------
        ValueError
            On self-loops, out-of-range indices, misaligned edge labels, or two
            listings of one edge carrying different labels.
        """
        edges = list(edges)
        if edge_labels is not None and len(edge_labels) != len(edges):
            raise ValueError(
                f"{len(edge_labels)} edge labels for {len(edges)} edges"
            )
        seen: dict[tuple[int, int], int] = {}
        out_edges: list[tuple[int, int]] = []
        out_labels: list[int] = []
        for k, (i, j) in enumerate(edges):
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on vertex {i} (edge {k})")
            if not (0 <= i < num_vertices and 0 <= j < num_vertices):
                raise ValueError(f"edge {k} ({i}, {j}) out of range")
            pair = (i, j) if i < j else (j, i)
            if pair in seen:
                if edge_labels is not None and out_labels[seen[pair]] != edge_labels[k]:
                    raise ValueError(
                        f"edge {pair} listed with labels "
                        f"{out_labels[seen[pair]]} and {edge_labels[k]}"
                    )
                continue
            seen[pair] = len(out_edges)
            out_edges.append(pair)
            if edge_labels is not None:
                out_labels.append(int(edge_labels[k]))
        return cls(
            num_vertices=int(num_vertices),
            vertex_labels=tuple(int(v) for v in vertex_labels),
            edges=tuple(out_edges),
            edge_labels=tuple(out_labels) if edge_labels is not None else None,
            layer=layer,
        )

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


@dataclass(frozen=True)
class Violation:
    """First invariant broken by a graph, as reported by :func:`validate`."""

    kind: str
    message: str
    index: Optional[int] = None


def validate(graph: LabeledGraph) -> Optional[Violation]:
    """Return the first broken invariant of ``graph``, or ``None`` if valid."""
    n = graph.num_vertices
    if n < 0:
        return Violation("vertex_count", f"negative vertex count {n}")
    if len(graph.vertex_labels) != n:
        return Violation(
            "vertex_labels",
            f"{len(graph.vertex_labels)} vertex labels for {n} vertices",
        )
    if graph.layer < 0:
        return Violation("layer", f"negative layer {graph.layer}")
    seen = set()
    for k, (i, j) in enumerate(graph.edges):
        if i == j:
            return Violation("self_loop", f"edge {k} is a self-loop on {i}", k)
        if not (0 <= i < n and 0 <= j < n):
            return Violation("vertex_range", f"edge {k} ({i}, {j}) out of range", k)
        pair = (min(i, j), max(i, j))
        if pair in seen:
            return Violation("duplicate_edge", f"edge {k} {pair} repeated", k)
        seen.add(pair)
    if graph.edge_labels is not None and len(graph.edge_labels) != len(graph.edges):
        return Violation(
            "edge_label_alignment",
            f"{len(graph.edge_labels)} edge labels for {len(graph.edges)} edges",
        )
    if graph.layer >= 1 and graph.edge_labels is None:
        return Violation("missing_edge_labels", f"layer {graph.layer} graph has no edge labels")
    return None
