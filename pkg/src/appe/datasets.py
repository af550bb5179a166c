"""Reading and writing graph datasets in the TU flat-file layout.

A dataset ``NAME`` is a directory holding

- ``NAME_A.txt``: one ``i, j`` adjacency line per directed edge, 1-based global node ids
- ``NAME_graph_indicator.txt``: graph id (1-based) of each global node
- ``NAME_graph_labels.txt``: class value of each graph
- ``NAME_node_labels.txt`` (optional): one integer label per node
- ``NAME_edge_labels.txt`` (optional): one integer label per adjacency line

Attribute files are ignored. Label values are densified per dataset in
ascending order of the raw values.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import LabeledGraph

logger = logging.getLogger(__name__)

ATTRIBUTE_SUFFIXES = ("node_attributes", "edge_attributes", "graph_attributes")


class TUFormatError(ValueError):
    """Malformed dataset file; carries the file name and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


@dataclass
class ParseReport:
    self_loops_dropped: int = 0
    duplicate_edges_merged: int = 0
    adjacency_lines: int = 0
    ignored_files: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "self_loops_dropped": self.self_loops_dropped,
            "duplicate_edges_merged": self.duplicate_edges_merged,
            "adjacency_lines": self.adjacency_lines,
            "ignored_files": list(self.ignored_files),
        }


@dataclass
class TUDataset:
    """A parsed dataset of layer-0 graphs with dense class labels ``0..C-1``.

    ``original_class_values[c]`` is the raw value of class ``c``; likewise
    ``node_label_values`` and ``edge_label_values`` map dense labels back to
    the raw file values.
    """

    name: str
    graphs: list[LabeledGraph]
    class_labels: np.ndarray
    original_class_values: list[int]
    has_node_labels: bool
    has_edge_labels: bool
    node_label_values: list[int] = field(default_factory=list)
    edge_label_values: list[int] = field(default_factory=list)
    report: ParseReport = field(default_factory=ParseReport)

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def n_classes(self) -> int:
        return len(self.original_class_values)

    def digest(self) -> str:
        """SHA-256 over the parsed content, independent of file formatting."""
        h = hashlib.sha256()
        h.update(self.name.encode())
        for g, c in zip(self.graphs, self.class_labels):
            h.update(repr((g.num_vertices, g.vertex_labels, g.edges, g.edge_labels, int(c))).encode())
        return h.hexdigest()


def _read_ints(path, width: Optional[int] = None):
    """Parse one comma/whitespace separated integer row per non-blank line.

    Returns a list of ``(line_number, values)``.
    """
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            tokens = [t for t in text.replace(",", " ").split()]
            try:
                values = [int(t) for t in tokens]
            except ValueError:
                try:
                    floats = [float(t) for t in tokens]
                except ValueError:
                    raise TUFormatError(path, lineno, f"non-integer token in {text!r}") from None
                if not all(f.is_integer() for f in floats):
                    raise TUFormatError(path, lineno, f"non-integer token in {text!r}") from None
                values = [int(f) for f in floats]
            if width is not None and len(values) != width:
                raise TUFormatError(path, lineno, f"expected {width} values, got {len(values)}")
            rows.append((lineno, values))
    return rows


def _dense(values):
    """Map raw values to 0..k-1 in ascending order; returns (codes, sorted uniques)."""
    uniques = sorted(set(values))
    lookup = {v: i for i, v in enumerate(uniques)}
    return [lookup[v] for v in values], uniques


def parse_tud(directory, name: str) -> TUDataset:
    """Parse dataset ``name`` from ``directory``.

    Raises
    ------
    FileNotFoundError
        If a mandatory file is missing.
    TUFormatError
        On malformed lines, edges crossing graphs, or contradictory labels on
        the two directions of an edge.
    """
    directory = os.fspath(directory)

    def path(suffix):
        return os.path.join(directory, f"{name}_{suffix}.txt")

    for suffix in ("A", "graph_indicator", "graph_labels"):
        if not os.path.exists(path(suffix)):
            raise FileNotFoundError(f"missing mandatory file {path(suffix)}")

    report = ParseReport()
    report.ignored_files = [
        os.path.basename(path(s)) for s in ATTRIBUTE_SUFFIXES if os.path.exists(path(s))
    ]

    indicator_rows = _read_ints(path("graph_indicator"), width=1)
    indicator = [v[0] for _, v in indicator_rows]
    graph_label_rows = _read_ints(path("graph_labels"), width=1)
    raw_classes = [v[0] for _, v in graph_label_rows]
    n_graphs = len(raw_classes)
    if n_graphs == 0:
        raise TUFormatError(path("graph_labels"), None, "dataset has no graphs")
    n_nodes = len(indicator)
    for (lineno, _), gid in zip(indicator_rows, indicator):
        if not 1 <= gid <= n_graphs:
            raise TUFormatError(path("graph_indicator"), lineno, f"graph id {gid} outside 1..{n_graphs}")

    has_node_labels = os.path.exists(path("node_labels"))
    if has_node_labels:
        node_rows = _read_ints(path("node_labels"))
        if len(node_rows) != n_nodes:
            raise TUFormatError(path("node_labels"), None, f"{len(node_rows)} labels for {n_nodes} nodes")
        raw_node_labels = [v[0] for _, v in node_rows]
    else:
        raw_node_labels = [0] * n_nodes
    node_codes, node_values = _dense(raw_node_labels)

    adjacency = _read_ints(path("A"), width=2)
    report.adjacency_lines = len(adjacency)
    has_edge_labels = os.path.exists(path("edge_labels"))
    if has_edge_labels:
        edge_rows = _read_ints(path("edge_labels"))
        if len(edge_rows) != len(adjacency):
            raise TUFormatError(
                path("edge_labels"), None, f"{len(edge_rows)} labels for {len(adjacency)} adjacency lines"
            )
        edge_codes, edge_values = _dense([v[0] for _, v in edge_rows])
    else:
        edge_codes, edge_values = None, []

    # 0-based local index of every global node within its graph
    local = [0] * n_nodes
    members: list[list[int]] = [[] for _ in range(n_graphs)]
    for node, gid in enumerate(indicator):
        local[node] = len(members[gid - 1])
        members[gid - 1].append(node)

    per_graph_edges: list[dict[tuple[int, int], Optional[int]]] = [{} for _ in range(n_graphs)]
    for k, (lineno, (a, b)) in enumerate(adjacency):
        if not (1 <= a <= n_nodes and 1 <= b <= n_nodes):
            raise TUFormatError(path("A"), lineno, f"node id out of range 1..{n_nodes}")
        ga, gb = indicator[a - 1], indicator[b - 1]
        if ga != gb:
            raise TUFormatError(path("A"), lineno, f"edge ({a}, {b}) joins graphs {ga} and {gb}")
        if a == b:
            report.self_loops_dropped += 1
            logger.warning("%s:%d: dropping self-loop on node %d", path("A"), lineno, a)
            continue
        i, j = local[a - 1], local[b - 1]
        pair = (i, j) if i < j else (j, i)
        label = edge_codes[k] if edge_codes is not None else None
        edges = per_graph_edges[ga - 1]
        if pair in edges:
            if edges[pair] != label:
                raise TUFormatError(
                    path("A"), lineno, f"edge ({a}, {b}) has contradictory labels in its two directions"
                )
            report.duplicate_edges_merged += 1
            continue
        edges[pair] = label

    graphs = []
    for gid in range(n_graphs):
        edges = per_graph_edges[gid]
        nodes = members[gid]
        graphs.append(
            LabeledGraph(
                num_vertices=len(nodes),
                vertex_labels=tuple(node_codes[v] for v in nodes),
                edges=tuple(edges),
                edge_labels=tuple(edges.values()) if has_edge_labels else None,
            )
        )

    class_codes, class_values = _dense(raw_classes)
    if report.self_loops_dropped:
        logger.warning("%s: dropped %d self-loops", name, report.self_loops_dropped)
    return TUDataset(
        name=name,
        graphs=graphs,
        class_labels=np.asarray(class_codes, dtype=np.int64),
        original_class_values=class_values,
        has_node_labels=has_node_labels,
        has_edge_labels=has_edge_labels,
        node_label_values=node_values,
        edge_label_values=edge_values,
        report=report,
    )


def write_tud(ds: TUDataset, directory) -> None:
    """Write ``ds`` in TU layout, listing every undirected edge in both directions."""
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)

    def path(suffix):
        return os.path.join(directory, f"{ds.name}_{suffix}.txt")

    adjacency, edge_labels, indicator, node_labels = [], [], [], []
    offset = 0
    for gid, g in enumerate(ds.graphs, start=1):
        indicator.extend([gid] * g.num_vertices)
        node_labels.extend(ds.node_label_values[v] if ds.node_label_values else v for v in g.vertex_labels)
        for k, (i, j) in enumerate(g.edges):
            for a, b in ((i, j), (j, i)):
                adjacency.append(f"{a + offset + 1}, {b + offset + 1}")
                if ds.has_edge_labels:
                    edge_labels.append(ds.edge_label_values[g.edge_labels[k]])
        offset += g.num_vertices

    def dump(suffix, lines):
        with open(path(suffix), "w") as fh:
            fh.writelines(f"{line}\n" for line in lines)

    dump("A", adjacency)
    dump("graph_indicator", indicator)
    dump("graph_labels", (ds.original_class_values[c] for c in ds.class_labels))
    if ds.has_node_labels:
        dump("node_labels", node_labels)
    if ds.has_edge_labels:
        dump("edge_labels", edge_labels)


def dataset_summary(ds: TUDataset) -> dict:
    """Counts and label statistics for display and JSON export."""
    n_vertices = np.array([g.num_vertices for g in ds.graphs])
    n_edges = np.array([g.num_edges for g in ds.graphs])

    def dist(values):
        if len(values) == 0:
            return {"min": 0, "max": 0, "mean": 0.0}
        return {"min": int(values.min()), "max": int(values.max()), "mean": float(values.mean())}

    hist = Counter(int(c) for c in ds.class_labels)
    return {
        "name": ds.name,
        "graphs": len(ds.graphs),
        "classes": ds.n_classes,
        "class_histogram": {str(ds.original_class_values[c]): hist[c] for c in sorted(hist)},
        "vertices": dist(n_vertices),
        "edges": dist(n_edges),
        "has_node_labels": ds.has_node_labels,
        "has_edge_labels": ds.has_edge_labels,
        "node_label_alphabet": len(ds.node_label_values),
        "edge_label_alphabet": len(ds.edge_label_values),
        "node_label_values": [int(v) for v in ds.node_label_values],
        "edge_label_values": [int(v) for v in ds.edge_label_values],
        "parse_report": ds.report.to_dict(),
    }


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
