"""Repeated nested cross-validation of the embedding + selection + SVM pipeline."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import clone
from sklearn.model_selection import GridSearchCV, StratifiedKFold

from .embedding import APPEmbedding, PatternSelector
from .svm import OneVsOneLinearSVC

DEFAULT_C_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)


@dataclass
class CvConfig:
    outer_folds: int = 10
    repeats: int = 10
    inner_folds: int = 10
    c_grid: tuple = DEFAULT_C_GRID
    n_layers: int = 2
    n_features: int = 100
    selection: str = "loss"
    mean_order: str = "ascending"
    seed: int = 0
    tol: float = 1e-6
    max_iter: int = 100_000

    def __post_init__(self):
        self.c_grid = tuple(sorted(float(c) for c in self.c_grid))
        self.validate()

    def validate(self) -> None:
        if self.outer_folds < 2 or self.inner_folds < 2:
            raise ValueError("outer_folds and inner_folds must be >= 2")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.c_grid:
            raise ValueError("c_grid must not be empty")
        if any(c <= 0 for c in self.c_grid):
            raise ValueError("every C in c_grid must be positive")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if self.selection not in ("loss", "mean"):
            raise ValueError(f"selection must be 'loss' or 'mean', got {self.selection!r}")
        if self.mean_order not in ("ascending", "descending"):
            raise ValueError(f"mean_order must be 'ascending' or 'descending', got {self.mean_order!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["c_grid"] = list(self.c_grid)
        return d

    @classmethod
    def from_file(cls, path, **overrides) -> "CvConfig":
        """Read flat ``key = value`` lines (``#`` comments allowed); ``c_grid`` is comma separated."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key = value")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in types:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, value, types[key])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _coerce(key, value, type_name):
    if key == "c_grid":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if type_name == "int":
        return int(value)
    if type_name == "float":
        return float(value)
    return value


@dataclass
class CvReport:
    """Fold accuracies of a nested CV run; ``accuracies[r][f]`` is repeat ``r``, fold ``f``."""

    dataset: str
    config: dict
    accuracies: list
    chosen_c: list
    effective_d: list
    vocab_size: list
    inner_folds_used: list = field(default_factory=list)
    mean: float = 0.0
    std: float = 0.0
    repeat_means: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        flat = np.asarray(self.accuracies, dtype=np.float64).ravel()
        self.mean = float(flat.mean())
        self.std = float(flat.std())
        self.repeat_means = [float(np.mean(r)) for r in self.accuracies]

    def cell(self) -> str:
        """``mean±std`` in percent, two decimals."""
        return f"{100 * self.mean:.2f}±{100 * self.std:.2f}"

    def to_dict(self, include_timings: bool = False) -> dict:
        d = asdict(self)
        if not include_timings:
            d.pop("timings")
        return d

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True) + "\n"


def _split_seeds(seed: int, repeats: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return [int(s) for s in rng.integers(0, 2**31 - 1, size=repeats)]


def _check_stratifiable(y, n_folds, what):
    counts = np.bincount(y)
    counts = counts[counts > 0]
    if len(counts) < 2:
        raise ValueError(f"{what}: need at least two classes")
    if counts.min() < n_folds:
        raise ValueError(
            f"{what}: smallest class has {counts.min()} graphs, fewer than {n_folds} folds"
        )


def run_fold(graphs, y, train, test, config: CvConfig, fold_seed: int) -> dict:
    """Fit the whole pipeline on ``train`` only and score it on ``test``."""
    timings = {}
    t0 = time.perf_counter()
    train_graphs = [graphs[i] for i in train]
    embedder = APPEmbedding(n_layers=config.n_layers)
    X_train = embedder.fit_transform(train_graphs)
    y_train = y[train]
    selector = PatternSelector(
        n_features=config.n_features, selection=config.selection, mean_order=config.mean_order
    )
    Z_train = selector.fit_transform(X_train, y_train)
    timings["embed_fit"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    # shrink the inner split only when a class is too small for the requested folds
    n_inner = min(config.inner_folds, int(np.bincount(y_train)[np.unique(y_train)].min()))
    Z_train = Z_train.astype(np.float64)
    base = OneVsOneLinearSVC(tol=config.tol, max_iter=config.max_iter)
    if n_inner >= 2:
        search = GridSearchCV(
            base,
            {"C": list(config.c_grid)},
            cv=StratifiedKFold(n_inner, shuffle=True, random_state=fold_seed),
            scoring="accuracy",
            refit=True,
        )
        search.fit(Z_train, y_train)
        best_c, model = float(search.best_params_["C"]), search.best_estimator_
    else:
        # a class with one training graph cannot be split; rank C by training accuracy
        fitted = [clone(base).set_params(C=c).fit(Z_train, y_train) for c in config.c_grid]
        scores = [m.score(Z_train, y_train) for m in fitted]
        best = int(np.argmax(scores))
        best_c, model = config.c_grid[best], fitted[best]
    timings["grid_search"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    Z_test = selector.transform(embedder.transform([graphs[i] for i in test]))
    accuracy = float(np.mean(model.predict(Z_test.astype(np.float64)) == y[test]))
    timings["evaluate"] = time.perf_counter() - t0
    return {
        "accuracy": accuracy,
        "C": best_c,
        "inner_folds": n_inner if n_inner >= 2 else 0,
        "d_effective": int(selector.selection_.d_effective),
        "vocab_size": int(embedder.vocab_size_),
        "timings": timings,
    }


def nested_cv(dataset, config: CvConfig, n_jobs: int = 1) -> CvReport:
    """Repeated stratified outer CV with an inner grid search over C.

    Vocabulary, feature selection, scaling and C are all chosen from the
    outer training portion of each fold. Repeat ``r`` shuffles with a seed
    drawn from ``config.seed``, so equal inputs give identical reports.
    """
    config.validate()
    graphs = list(dataset.graphs)
    y = np.asarray(dataset.class_labels, dtype=np.int64)
    if len(graphs) == 0:
        raise ValueError("dataset is empty")
    _check_stratifiable(y, config.outer_folds, "outer split")

    tasks = []
    for r, rseed in enumerate(_split_seeds(config.seed, config.repeats)):
        outer = StratifiedKFold(config.outer_folds, shuffle=True, random_state=rseed)
        for f, (train, test) in enumerate(outer.split(np.zeros(len(y)), y)):
            tasks.append((r, f, train, test, rseed + f + 1))

    t0 = time.perf_counter()
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_fold)(graphs, y, train, test, config, fseed) for _, _, train, test, fseed in tasks
    )
    wall = time.perf_counter() - t0

    def grid(key, cast=float):
        out = [[None] * config.outer_folds for _ in range(config.repeats)]
        for (r, f, *_), res in zip(tasks, results):
            out[r][f] = cast(res[key])
        return out

    phase = {"wall": wall}
    for res in results:
        for k, v in res["timings"].items():
            phase[k] = phase.get(k, 0.0) + v
    return CvReport(
        dataset=dataset.name,
        config=config.to_dict(),
        accuracies=grid("accuracy"),
        chosen_c=grid("C"),
        effective_d=grid("d_effective", int),
        vocab_size=grid("vocab_size", int),
        inner_folds_used=grid("inner_folds", int),
        timings=phase,
    )
