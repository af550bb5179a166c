import itertools

import numpy as np
import pytest

from appe.datasets import TUDataset, parse_tud, write_tud
from appe.graph import LabeledGraph

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_graph(rng, n_max=10, p=0.4, n_vertex_labels=3, n_edge_labels=2, edge_labels=True):
    n = int(rng.integers(1, n_max + 1))
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return LabeledGraph.from_edges(
        n,
        rng.integers(0, n_vertex_labels, size=n).tolist(),
        edges,
        rng.integers(0, n_edge_labels, size=len(edges)).tolist() if edge_labels else None,
    )


def random_corpus(seed, count=200, **kw):
    rng = np.random.default_rng(seed)
    return [random_graph(rng, **kw) for _ in range(count)]


def brute_force_line_graph(graph):
    """Edge-index pairs (a, b), a < b, whose edges share an endpoint."""
    out = set()
    for a, b in itertools.combinations(range(graph.num_edges), 2):
        if set(graph.edges[a]) & set(graph.edges[b]):
            out.add((a, b))
    return out


def path_graph(n, labels=None, edge_labels=None):
    return LabeledGraph.from_edges(
        n, labels if labels is not None else [1] * n, [(i, i + 1) for i in range(n - 1)], edge_labels
    )


def star_graph(d, label=1):
    return LabeledGraph.from_edges(d + 1, [label] * (d + 1), [(0, k) for k in range(1, d + 1)])


def triangle(label=1):
    return LabeledGraph.from_edges(3, [label] * 3, [(0, 1), (1, 2), (0, 2)])


def motif_dataset(seed=0, per_class=20, name="MOTIF"):
    """Two classes of random trees; class 1 graphs carry extra label-2 vertices.

    Label 2 never occurs in class 0, so any pattern touching it separates the
    classes perfectly.
    """
    rng = np.random.default_rng(seed)
    graphs, labels = [], []
    for cls in (0, 1):
        for _ in range(per_class):
            n = int(rng.integers(5, 10))
            vlabels = rng.integers(0, 2, size=n).tolist()
            if cls == 1:
                vlabels[int(rng.integers(0, n))] = 2
            edges = [(int(rng.integers(0, k)), k) for k in range(1, n)]
            elabels = rng.integers(0, 2, size=len(edges)).tolist()
            graphs.append(LabeledGraph.from_edges(n, vlabels, edges, elabels))
            labels.append(cls)
    order = rng.permutation(len(graphs))
    return TUDataset(
        name=name,
        graphs=[graphs[i] for i in order],
        class_labels=np.asarray(labels)[order],
        original_class_values=[-1, 1],
        has_node_labels=True,
        has_edge_labels=True,
        node_label_values=[0, 1, 2],
        edge_label_values=[0, 1],
    )


@pytest.fixture
def motif_dir(tmp_path):
    ds = motif_dataset()
    write_tud(ds, tmp_path / ds.name)
    return tmp_path / ds.name


@pytest.fixture
def tiny_dir(tmp_path):
    """The two-node fixture: one graph, labels 3 and 4, edge listed both ways."""
    d = tmp_path / "TINY"
    d.mkdir()
    (d / "TINY_A.txt").write_text("1, 2\n2, 1\n")
    (d / "TINY_graph_indicator.txt").write_text("1\n1\n")
    (d / "TINY_graph_labels.txt").write_text("1\n")
    (d / "TINY_node_labels.txt").write_text("3\n4\n")
    return d


@pytest.fixture
def motif():
    return motif_dataset()


def load(path):
    return parse_tud(path, path.name)
