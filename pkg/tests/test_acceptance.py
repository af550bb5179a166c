"""Acceptance criteria, one reported line each.

Real-data criteria read TU directories from ``$APPE_DATA/<NAME>`` or, when
the variable is unset, from ``data/<NAME>`` at the repository root. A missing
directory is a failure: the criterion was not demonstrated.
"""

import itertools
import json
import os
import time
import warnings
from math import comb
from pathlib import Path

import numpy as np
import pytest

from appe.cli import main
from appe.datasets import parse_tud, write_tud
from appe.embedding import ClassWeights, DegenerateDimensionWarning, compute_loss, embed, fit_class_weights, select_top_d
from appe.graph import LabelInterner, canonical_app_key
from appe.model_selection import CvConfig, nested_cv
from appe.transform import apm_multi_layer, apm_once, line_graph_edge_count

from conftest import ACCEPTANCE_LINES, brute_force_line_graph, motif_dataset, random_corpus

REPO = Path(__file__).resolve().parent.parent
TABLE_DATASETS = ("MUTAG", "BZR", "COX2", "PROTEINS", "Mutagenicity")


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def data_dir(name):
    root = Path(os.environ.get("APPE_DATA", REPO / "data"))
    return root / name


def require(criterion, *names):
    missing = [n for n in names if not (data_dir(n) / f"{n}_A.txt").is_file()]
    if missing:
        where = os.environ.get("APPE_DATA", str(REPO / "data"))
        report(criterion, False, f"not evaluated, dataset(s) {', '.join(missing)} not found under {where}")
        pytest.fail(f"missing TU dataset(s): {missing}")
    return [parse_tud(data_dir(n), n) for n in names]


def acceptance_corpus():
    return random_corpus(2024, 200, n_max=10, p=0.4)


def test_line_graph_oracle():
    name = "line-graph oracle (200 graphs, n<=10, p=0.4)"
    t0 = time.perf_counter()
    passed = 0
    for g in acceptance_corpus():
        h = apm_once(g, LabelInterner())
        # vertex k of the output stands for edge k of the input
        same = h.num_vertices == g.num_edges and set(h.edges) == brute_force_line_graph(g)
        passed += same
    elapsed = time.perf_counter() - t0
    ok = passed == 200 and elapsed < 10
    report(name, ok, f"{passed}/200 equal to brute force in {elapsed:.2f}s (limit 10s)")
    assert ok


def test_growth_formulas():
    name = "growth formulas |V1|=|E0|, |E1|=sum C(deg,2)"
    good = 0
    for g in acceptance_corpus():
        h = apm_once(g, LabelInterner())
        expected = sum(comb(int(d), 2) for d in g.degrees())
        good += h.num_vertices == g.num_edges and h.num_edges == expected == line_graph_edge_count(g)
    report(name, good == 200, f"{good}/200 exact")
    assert good == 200


def test_loss_micro_example():
    name = "discriminative loss squaring example"
    small = compute_loss(ClassWeights(np.array([[1.0], [0.0]]), np.arange(2)))[0]
    large = compute_loss(ClassWeights(np.array([[100.0], [1.0]]), np.arange(2)))[0]
    ok = abs(small + 1.0) <= 1e-9 and abs(large + 9801 / 101) <= 1e-9 and large < small
    report(name, ok, f"loss([100],[1])={large:.6f} < loss([1],[0])={small:.6f}")
    assert ok


def test_property_suites():
    name = "property suites (>=10^4 cases each)"
    n = 10_000
    rng = np.random.default_rng(77)
    t0 = time.perf_counter()
    counts = {}

    # conservation: embedding mass equals the top-layer vertex count
    its = [LabelInterner(), LabelInterner()]
    ok = 0
    for g in random_corpus(78, n, n_max=8, p=0.4):
        s = apm_multi_layer(g, 2, its)
        ok += int(embed(s, len(its[-1])).sum()) == s.top.num_vertices
    counts["conservation"] = ok

    # interner bijectivity: distinct keys get distinct ids and decode back
    it = LabelInterner()
    raw = rng.integers(0, 40, size=(n, 3))
    keys = [canonical_app_key(int(a), int(b), int(e)) for a, b, e in raw]
    ids = [it.intern(k) for k in keys]
    ok = sum(it.key_of(i) == k for i, k in zip(ids, keys))
    ok = ok if len(set(ids)) == len(set(keys)) == len(it) else 0
    counts["interner"] = ok

    # selection is unchanged when every count is scaled by a positive integer
    ok = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateDimensionWarning)
        for _ in range(n):
            X = rng.integers(0, 15, size=(int(rng.integers(4, 12)), int(rng.integers(2, 10))))
            y = np.arange(len(X)) % int(rng.integers(2, 4))
            c = int(rng.integers(2, 9))
            base = compute_loss(fit_class_weights(X, y))
            scaled = compute_loss(fit_class_weights(c * X, y))
            d = int(rng.integers(1, X.shape[1] + 1))
            ok += np.allclose(scaled, c * base, rtol=1e-12, atol=1e-12) and (
                select_top_d(base, d).selected.tolist() == select_top_d(scaled, d).selected.tolist()
            )
    counts["scale"] = ok

    # relabelling the classes leaves the loss untouched
    ok = 0
    for _ in range(n):
        C = int(rng.integers(2, 5))
        W = rng.integers(1, 30, size=(C, int(rng.integers(1, 10))))
        p = rng.permutation(C)
        ok += np.array_equal(compute_loss(ClassWeights(W, np.arange(C))), compute_loss(ClassWeights(W[p], p)))
    counts["class-permutation"] = ok

    elapsed = time.perf_counter() - t0
    good = all(v == n for v in counts.values()) and elapsed < 30
    detail = ", ".join(f"{k} {v}/{n}" for k, v in counts.items())
    report(name, good, f"{detail} in {elapsed:.1f}s (limit 30s)")
    assert good


@pytest.mark.slow
def test_mutag_two_layer():
    name = "MUTAG K=2 D=100 default protocol (target 88.80, band +-8.0, floor 0.80, <10 min)"
    (ds,) = require(name, "MUTAG")
    t0 = time.perf_counter()
    r = nested_cv(ds, CvConfig(n_layers=2, n_features=100))
    elapsed = time.perf_counter() - t0
    ok = r.mean >= 0.80 and abs(100 * r.mean - 88.80) <= 8.0 and elapsed < 600
    report(name, ok, f"{r.cell()} in {elapsed:.0f}s")
    assert ok


@pytest.mark.slow
def test_mutag_one_layer():
    name = "MUTAG K=1 D=100 default protocol (floor 0.79)"
    (ds,) = require(name, "MUTAG")
    r = nested_cv(ds, CvConfig(n_layers=1, n_features=100))
    report(name, r.mean >= 0.79, r.cell())
    assert r.mean >= 0.79


@pytest.mark.slow
def test_bzr_selection_ordering():
    """Soft criterion: the outcome is reported; only a missing dataset fails."""
    name = "BZR K=2 D=10 loss vs mean-weight ordering (soft, >=7 of 10 repeats)"
    (ds,) = require(name, "BZR")
    loss = nested_cv(ds, CvConfig(n_layers=2, n_features=10, selection="loss"))
    wins = {}
    for order in ("ascending", "descending"):
        mean = nested_cv(ds, CvConfig(n_layers=2, n_features=10, selection="mean", mean_order=order))
        wins[order] = (sum(a >= b for a, b in zip(loss.repeat_means, mean.repeat_means)), mean.cell())
        if wins[order][0] >= 7:
            break
    detail = f"loss {loss.cell()}; " + "; ".join(f"mean-{o} {c}, loss wins {w}/10" for o, (w, c) in wins.items())
    report(name, any(w >= 7 for w, _ in wins.values()), detail + " (reported, not gated)")


@pytest.mark.slow
def test_full_protocol_on_all_datasets(tmp_path):
    name = "classify completes on MUTAG, BZR, COX2, PROTEINS, Mutagenicity with K in {1,2}"
    require(name, *TABLE_DATASETS)
    threads = os.cpu_count() or 1
    cells = []
    for ds_name, k in itertools.product(TABLE_DATASETS, (1, 2)):
        out = tmp_path / f"{ds_name}_{k}.json"
        code = main(["classify", str(data_dir(ds_name)), "--layers", str(k), "--threads", str(threads), "--out", str(out)])
        if code != 0 or not out.is_file():
            report(name, False, f"{ds_name} K={k} exited {code}")
            pytest.fail(f"{ds_name} K={k}")
        r = json.loads(out.read_text())
        cells.append(f"{ds_name}/K{k} {100 * r['mean']:.2f}±{100 * r['std']:.2f}")
    report(name, True, "; ".join(cells))


def test_determinism(tmp_path):
    name = "seeded classify runs give byte-identical JSON"
    ds = motif_dataset(seed=21, per_class=25)
    write_tud(ds, tmp_path / ds.name)
    args = ["classify", str(tmp_path / ds.name), "--repeats", "3", "--folds", "5", "--inner-folds", "3", "--seed", "17"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    ok = a.read_bytes() == b.read_bytes()
    report(name, ok, f"{len(a.read_bytes())} bytes, identical={ok}")
    assert ok
