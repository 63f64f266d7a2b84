"""Shared binary classification tree machinery (greedy Gini CART).

Used both by the random-forest teacher and by the decision-tree student.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["TreeNodes", "best_split", "grow_tree"]


@dataclass
class TreeNodes:
    """Flat array representation; feature == -1 marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    prob: list[float] = field(default_factory=list)  # empirical P(y=1) at node

    def add(self, feature: int, threshold: float, prob: float) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.prob.append(prob)
        return len(self.feature) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        def rec(i: int) -> int:
            if self.feature[i] < 0:
                return 0
            return 1 + max(rec(self.left[i]), rec(self.right[i]))

        return rec(0) if self.n_nodes else 0

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        prob = np.asarray(self.prob)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, feature[cur]] <= threshold[cur]
            node[idx] = np.where(go_left, left[cur], right[cur])
            active = feature[node] >= 0
        return prob[node]

    def to_dict(self) -> dict:
        return {
            "feature": list(map(int, self.feature)),
            "threshold": list(map(float, self.threshold)),
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "prob": list(map(float, self.prob)),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNodes":
        return cls(
            feature=list(d["feature"]),
            threshold=list(d["threshold"]),
            left=list(d["left"]),
            right=list(d["right"]),
            prob=list(d["prob"]),
        )


def _weighted_gini_terms(pos: np.ndarray, tot: np.ndarray) -> np.ndarray:
    neg = tot - pos
    return tot - (pos * pos + neg * neg) / tot


def best_split(
    X: np.ndarray, y: np.ndarray, feature_indices: np.ndarray
) -> tuple[float, int, float] | None:
    """Best (weighted Gini, feature, midpoint threshold) over the given features.

    Ties break toward the lower feature index, then the lower threshold.
    Returns None when no split strictly reduces the parent impurity.
    """
    n = y.shape[0]
    pos_total = float(y.sum())
    parent = float(_weighted_gini_terms(np.array([pos_total]), np.array([float(n)]))[0]) / n

    best: tuple[float, int, float] | None = None
    for f in feature_indices:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        sy = y[order].astype(np.float64)
        cut = np.flatnonzero(sv[:-1] != sv[1:]) + 1  # left-block sizes
        if cut.size == 0:
            continue
        cum_pos = np.cumsum(sy)
        n_l = cut.astype(np.float64)
        pos_l = cum_pos[cut - 1]
        n_r = n - n_l
        pos_r = pos_total - pos_l
        imp = (_weighted_gini_terms(pos_l, n_l) + _weighted_gini_terms(pos_r, n_r)) / n
        j = int(np.argmin(imp))  # argmin takes the first minimum: lowest threshold
        if imp[j] < parent and (best is None or imp[j] < best[0]):
            thr = 0.5 * (sv[cut[j] - 1] + sv[cut[j]])
            best = (float(imp[j]), int(f), float(thr))
    return best


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    rng: np.random.Generator | None = None,
    n_split_features: int | None = None,
) -> TreeNodes:
    """Greedy CART; optionally subsample features per split (random forest)."""
    d = X.shape[1]
    nodes = TreeNodes()

    def build(rows: np.ndarray, depth: int) -> int:
        ys = y[rows]
        prob = float(ys.mean())
        node = nodes.add(-1, 0.0, prob)
        if depth >= max_depth or prob in (0.0, 1.0):
            return node
        if n_split_features is not None and n_split_features < d:
            feats = np.sort(rng.choice(d, size=n_split_features, replace=False))
        else:
            feats = np.arange(d)
        split = best_split(X[rows], ys, feats)
        if split is None:
            return node
        _, f, thr = split
        mask = X[rows, f] <= thr
        nodes.feature[node] = f
        nodes.threshold[node] = thr
        nodes.left[node] = build(rows[mask], depth + 1)
        nodes.right[node] = build(rows[~mask], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return nodes
