"""Command-line entry point: ``appe inspect | embed | classify``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import TUFormatError, dataset_summary, parse_tud, write_json
from .embedding import APPEmbedding, PatternSelector, write_embedding_csv, write_embedding_sidecar
from .model_selection import CvConfig, nested_cv

logger = logging.getLogger("appe")


def _load(directory, name=None):
    directory = Path(directory)
    return parse_tud(directory, name or directory.name)


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_manifest(command, config, ds, seed=None, outputs=(), timings=None) -> dict:
    """Describe a run; ``digest`` covers everything except wall-clock timings."""
    ident = {
        "command": command,
        "config": config,
        "dataset": {"name": ds.name, "digest": ds.digest()},
        "seed": seed,
        "version": __version__,
    }
    digest = hashlib.sha256(json.dumps(ident, sort_keys=True).encode()).hexdigest()
    return {**ident, "digest": digest, "outputs": list(outputs), "timings": timings or {}}


def cmd_inspect(args) -> int:
    ds = _load(args.dataset, args.name)
    summary = dataset_summary(ds)
    print(f"dataset          {summary['name']}")
    print(f"graphs           {summary['graphs']}")
    print(f"classes          {summary['classes']}  {summary['class_histogram']}")
    v, e = summary["vertices"], summary["edges"]
    print(f"vertices/graph   min {v['min']}  mean {v['mean']:.2f}  max {v['max']}")
    print(f"edges/graph      min {e['min']}  mean {e['mean']:.2f}  max {e['max']}")
    print(f"node labels      {'yes' if ds.has_node_labels else 'no'} ({summary['node_label_alphabet']} symbols)")
    print(f"edge labels      {'yes' if ds.has_edge_labels else 'no'} ({summary['edge_label_alphabet']} symbols)")
    if args.out:
        write_json(summary, args.out)
    return 0


def cmd_embed(args) -> int:
    if args.layers < 1:
        raise SystemExit("--layers must be >= 1")
    if not args.no_select and args.dim < 1:
        raise SystemExit("--dim must be >= 1")
    t0 = time.perf_counter()
    ds = _load(args.dataset, args.name)
    embedder = APPEmbedding(n_layers=args.layers)
    X = embedder.fit_transform(ds.graphs)
    y = ds.class_labels
    if args.no_select:
        selected = np.arange(X.shape[1])
        d_requested = None
    else:
        selector = PatternSelector(n_features=args.dim, selection=args.selection, mean_order=args.mean_order)
        selector.fit(X, y)
        selected = selector.selection_.selected
        d_requested = args.dim
        if args.dim > X.shape[1]:
            logger.warning("--dim %d exceeds vocabulary size %d; keeping all dimensions", args.dim, X.shape[1])
    elapsed = time.perf_counter() - t0

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    sidecar = out.with_suffix(".json")
    manifest_path = out.with_suffix(".manifest.json")
    config = {
        "layers": args.layers,
        "dim": None if args.no_select else args.dim,
        "selection": None if args.no_select else args.selection,
        "mean_order": args.mean_order,
        "vocabulary": "full-dataset (exploratory, not cross-validated)",
    }
    write_embedding_csv(
        out,
        range(len(ds.graphs)),
        [ds.original_class_values[c] for c in y],
        X[:, selected],
        columns=[f"dim_{j}" for j in selected],
    )
    manifest = build_manifest("embed", config, ds, outputs=[{"path": out.name, "sha256": _file_digest(out)}])
    write_embedding_sidecar(
        sidecar,
        embedder.layer_sizes_,
        d_requested,
        selected,
        mode="exploratory: vocabulary and selection fit on the full dataset",
        manifest_digest=manifest["digest"],
    )
    manifest["outputs"].append({"path": sidecar.name, "sha256": _file_digest(sidecar)})
    manifest["timings"] = {"total": elapsed}
    write_json(manifest, manifest_path)
    print(
        f"wrote {len(ds.graphs)} embeddings with {len(selected)} of {X.shape[1]} dimensions to {out} "
        "(exploratory: full-dataset vocabulary)"
    )
    return 0


def cmd_classify(args) -> int:
    overrides = {
        "n_layers": args.layers,
        "n_features": args.dim,
        "repeats": args.repeats,
        "outer_folds": args.folds,
        "inner_folds": args.inner_folds,
        "c_grid": tuple(float(c) for c in args.grid.split(",")) if args.grid else None,
        "seed": args.seed,
        "selection": args.selection,
        "mean_order": args.mean_order,
    }
    if args.config:
        config = CvConfig.from_file(args.config, **overrides)
    else:
        config = CvConfig(**{k: v for k, v in overrides.items() if v is not None})
    ds = _load(args.dataset, args.name)
    report = nested_cv(ds, config, n_jobs=args.threads)

    manifest = build_manifest("classify", config.to_dict(), ds, seed=config.seed, timings=report.timings)
    payload = report.to_dict()
    payload["manifest_digest"] = manifest["digest"]
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    print(f"{'dataset':<16}{'layers':>7}{'D':>6}  {'selection':<10}accuracy")
    sel = config.selection if config.selection == "loss" else f"mean-{config.mean_order[:3]}"
    print(f"{ds.name:<16}{config.n_layers:>7}{config.n_features:>6}  {sel:<10}{report.cell()}")
    print(f"mean {report.mean!r}  std {report.std!r}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if args.csv:
            with open(out.with_suffix(".csv"), "w") as fh:
                fh.write("repeat,fold,accuracy,C,d_effective\n")
                for r, row in enumerate(report.accuracies):
                    for f, a in enumerate(row):
                        fh.write(f"{r},{f},{a!r},{report.chosen_c[r][f]!r},{report.effective_d[r][f]}\n")
        manifest["outputs"] = [{"path": out.name, "sha256": _file_digest(out)}]
        write_json(manifest, out.with_suffix(".manifest.json"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="appe", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def dataset_args(p):
        p.add_argument("dataset", help="directory holding NAME_A.txt, NAME_graph_indicator.txt, ...")
        p.add_argument("--name", help="dataset file prefix (default: directory name)")

    p = sub.add_parser("inspect", help="print dataset statistics")
    dataset_args(p)
    p.add_argument("--out", help="also write the summary as JSON")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("embed", help="write pattern-count embeddings (full-dataset vocabulary)")
    dataset_args(p)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--no-select", action="store_true", help="keep every top-layer dimension")
    p.add_argument("--selection", choices=("loss", "mean"), default="loss")
    p.add_argument("--mean-order", choices=("ascending", "descending"), default="ascending")
    p.add_argument("--out", required=True, help="CSV path; the JSON sidecar and manifest go next to it")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("classify", help="repeated nested cross-validation")
    dataset_args(p)
    p.add_argument("--layers", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--folds", type=int, help="outer folds")
    p.add_argument("--inner-folds", type=int)
    p.add_argument("--grid", help="comma-separated C values")
    p.add_argument("--seed", type=int)
    p.add_argument("--selection", choices=("loss", "mean"))
    p.add_argument("--mean-order", choices=("ascending", "descending"))
    p.add_argument("--config", help="flat key = value file with CvConfig fields")
    p.add_argument("--threads", type=int, default=1, help="parallel folds")
    p.add_argument("--csv", action="store_true", help="also write fold accuracies as CSV")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FileNotFoundError, TUFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
