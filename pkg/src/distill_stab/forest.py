"""Self-contained random-forest binary classifier used as the fixed teacher."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .tree import TreeNodes, grow_tree

__all__ = ["Forest", "fit_forest", "predict_label", "save_forest", "load_forest"]


@dataclass(frozen=True)
class Forest:
    trees: tuple[TreeNodes, ...]
    n_trees: int
    max_depth: int
    feature_subsample: int
    seed: int
    n_features: int

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        """Majority vote over trees; exact ties resolve to label 1."""
        if X.ndim != 2:
            raise ValueError("expected a 2-D feature matrix")
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for t in self.trees:
            votes += t.predict_proba(X) >= 0.5
        return (2 * votes >= self.n_trees).astype(np.int64)


def fit_forest(data, n_trees: int, max_depth: int, seed: int) -> Forest:
    """Bootstrap-bagged Gini trees, sqrt(d) features considered per split."""
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    X, y = data.X, data.y
    if X.shape[0] < 2 or len(np.unique(y)) < 2:
        raise ValueError("teacher fit needs >= 2 rows with both labels present")
    d = X.shape[1]
    k = max(1, int(math.isqrt(d)) + (0 if math.isqrt(d) ** 2 == d else 1))
    trees = []
    for i in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        rows = rng.integers(0, X.shape[0], size=X.shape[0])
        trees.append(grow_tree(X[rows], y[rows], max_depth, rng=rng, n_split_features=k))
    return Forest(
        trees=tuple(trees),
        n_trees=n_trees,
        max_depth=max_depth,
        feature_subsample=k,
        seed=seed,
        n_features=d,
    )


def predict_label(forest: Forest, x: np.ndarray) -> int:
    """Binary label for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != forest.n_features:
        raise ValueError(f"feature vector arity mismatch: expected {forest.n_features}")
    return int(forest.predict_matrix(x[None, :])[0])


def save_forest(forest: Forest, path) -> None:
    doc = {
        "n_trees": forest.n_trees,
        "max_depth": forest.max_depth,
        "feature_subsample": forest.feature_subsample,
        "seed": forest.seed,
        "n_features": forest.n_features,
        "trees": [t.to_dict() for t in forest.trees],
    }
    with open(path, "w") as f:
        json.dump(doc, f)


def load_forest(path) -> Forest:
    with open(path) as f:
        doc = json.load(f)
    return Forest(
        trees=tuple(TreeNodes.from_dict(t) for t in doc["trees"]),
        n_trees=doc["n_trees"],
        max_depth=doc["max_depth"],
        feature_subsample=doc["feature_subsample"],
        seed=doc["seed"],
        n_features=doc["n_features"],
    )
