"""One-vs-one linear SVM trained by dual coordinate descent.

Each binary problem minimises

    0.5 * ||w||^2 + 0.5 * b^2 + (C / n) * sum_i max(0, 1 - y_i (w . x_i + b))

over standardized features. The bias is handled as an extra constant feature,
so it is regularized as well. Scaling the hinge term by ``1 / n`` makes the
solution invariant to duplicating the whole training set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


@numba.njit(cache=True, nogil=True)
def _dual_cd(X, y, upper, tol, max_iter, seed):
    """Shrinking dual coordinate descent for the L1-loss SVM.

    ``X`` already carries the constant bias column. Returns ``(w, alpha, n_iter)``.
    """
    n, d = X.shape
    w = np.zeros(d)
    alpha = np.zeros(n)
    qd = np.empty(n)
    for i in range(n):
        qd[i] = np.dot(X[i], X[i])
    index = np.arange(n)
    active = n
    pg_max_old = np.inf
    pg_min_old = -np.inf
    np.random.seed(seed)
    it = 0
    while it < max_iter:
        pg_max = -np.inf
        pg_min = np.inf
        for s in range(active - 1, 0, -1):
            r = np.random.randint(0, s + 1)
            index[s], index[r] = index[r], index[s]
        s = 0
        while s < active:
            i = index[s]
            g = y[i] * np.dot(w, X[i]) - 1.0
            pg = 0.0
            if alpha[i] == 0.0:
                if g > pg_max_old:
                    active -= 1
                    index[s], index[active] = index[active], index[s]
                    continue
                if g < 0.0:
                    pg = g
            elif alpha[i] == upper:
                if g < pg_min_old:
                    active -= 1
                    index[s], index[active] = index[active], index[s]
                    continue
                if g > 0.0:
                    pg = g
            else:
                pg = g
            if pg > pg_max:
                pg_max = pg
            if pg < pg_min:
                pg_min = pg
            if abs(pg) > 1e-12:
                old = alpha[i]
                new = min(max(old - g / qd[i], 0.0), upper)
                alpha[i] = new
                w += (new - old) * y[i] * X[i]
            s += 1
        it += 1
        if pg_max - pg_min <= tol:
            if active == n:
                break
            # re-check the shrunk coordinates before declaring convergence
            active = n
            pg_max_old = np.inf
            pg_min_old = -np.inf
            continue
        pg_max_old = pg_max if pg_max > 0.0 else np.inf
        pg_min_old = pg_min if pg_min < 0.0 else -np.inf
    return w, alpha, it


def fit_binary_svm(X, y, C, tol=1e-6, max_iter=100_000, seed=0):
    """Fit one binary problem on labels in {-1, +1}; returns ``(coef, bias, n_iter)``."""
    X = np.asarray(X, dtype=np.float64)
    Xb = np.hstack([X, np.ones((X.shape[0], 1))])
    y = np.asarray(y, dtype=np.float64)
    w, _, n_iter = _dual_cd(Xb, y, float(C) / X.shape[0], float(tol), int(max_iter), int(seed))
    return w[:-1].copy(), float(w[-1]), int(n_iter)


def hinge_loss(coef, bias, X, y) -> float:
    """Mean hinge loss of a binary model on labels in {-1, +1}."""
    margins = np.asarray(y) * (np.asarray(X) @ coef + bias)
    return float(np.maximum(0.0, 1.0 - margins).mean())


class OneVsOneLinearSVC(ClassifierMixin, BaseEstimator):
    """Linear SVM with one-vs-one voting over standardized features.

    Features are centred and scaled to unit variance using training
    statistics (constant columns are only centred). One binary SVM is trained
    per class pair; prediction is a majority vote with ties going to the
    lowest class.

    Parameters
    ----------
    C : float, default=1.0
        Hinge-loss weight.
    tol : float, default=1e-6
        Stopping tolerance on the projected-gradient spread.
    max_iter : int, default=100000
        Cap on solver epochs per pair.
    """

    def __init__(self, C: float = 1.0, tol: float = 1e-6, max_iter: int = 100_000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise ValueError("need samples from at least two classes")
        self.n_features_in_ = X.shape[1]
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        Z = (X - self.mean_) / self.scale_

        self.pairs_ = list(combinations(range(len(self.classes_)), 2))
        self.coef_ = np.zeros((len(self.pairs_), X.shape[1]))
        self.intercept_ = np.zeros(len(self.pairs_))
        self.n_iter_ = np.zeros(len(self.pairs_), dtype=np.int64)
        for p, (a, b) in enumerate(self.pairs_):
            mask = (y == self.classes_[a]) | (y == self.classes_[b])
            target = np.where(y[mask] == self.classes_[a], 1.0, -1.0)
            coef, bias, n_iter = fit_binary_svm(Z[mask], target, self.C, self.tol, self.max_iter)
            self.coef_[p] = coef
            self.intercept_[p] = bias
            self.n_iter_[p] = n_iter
        return self

    def _scaled(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, model was fit with {self.n_features_in_}"
            )
        return (X - self.mean_) / self.scale_

    def decision_function(self, X):
        """Pairwise decision values, one column per class pair (positive favours the first class)."""
        Z = self._scaled(X)
        return Z @ self.coef_.T + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        votes = np.zeros((scores.shape[0], len(self.classes_)), dtype=np.int64)
        for p, (a, b) in enumerate(self.pairs_):
            wins_a = scores[:, p] > 0
            votes[wins_a, a] += 1
            votes[~wins_a, b] += 1
        return self.classes_[np.argmax(votes, axis=1)]


@dataclass
class SvmModel:
    """Plain view of a fitted one-vs-one model."""

    classes: np.ndarray
    pairs: list
    coef: np.ndarray
    intercept: np.ndarray
    scaler_mean: np.ndarray
    scaler_scale: np.ndarray
    estimator: OneVsOneLinearSVC


def train_svm(features, labels, c: float, tol: float = 1e-6, max_iter: int = 100_000) -> SvmModel:
    est = OneVsOneLinearSVC(C=c, tol=tol, max_iter=max_iter).fit(features, labels)
    return SvmModel(
        classes=est.classes_,
        pairs=est.pairs_,
        coef=est.coef_,
        intercept=est.intercept_,
        scaler_mean=est.mean_,
        scaler_scale=est.scale_,
        estimator=est,
    )


def predict(model: SvmModel, features) -> np.ndarray:
    return model.estimator.predict(features)
