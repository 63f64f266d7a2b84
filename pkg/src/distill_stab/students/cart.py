"""CART decision trees as distillation students."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from ..sampler import CorpusFactory
from ..tree import TreeNodes, grow_tree
from .base import Candidate

__all__ = ["CartTree", "fit_cart", "cart_candidates", "cart_structure_key", "PROB_EPS"]

PROB_EPS = 1e-6


@dataclass(frozen=True)
class CartTree:
    nodes: TreeNodes

    @property
    def depth(self) -> int:
        return self.nodes.depth()

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Leaf frequency clamped away from {0,1} for cross-entropy."""
        return np.clip(self.nodes.predict_proba(X), PROB_EPS, 1.0 - PROB_EPS)

    def leaf_probs(self, X: np.ndarray) -> np.ndarray:
        """Raw empirical leaf frequencies (unclamped)."""
        return self.nodes.predict_proba(X)


def fit_cart(corpus: Dataset, max_depth: int, seed: int = 0) -> CartTree:
    """Greedy Gini tree; exhaustive (feature, midpoint) search at every node.

    Training is deterministic; the seed is accepted for interface symmetry
    with the stochastic student families and is unused.
    """
    if corpus.n_rows == 0:
        raise ValueError("corpus is empty")
    return CartTree(nodes=grow_tree(corpus.X, corpus.y, max_depth))


def cart_structure_key(tree: CartTree) -> str:
    """Preorder split-feature listing with "L" at leaves, thresholds omitted."""
    nodes = tree.nodes
    out: list[str] = []

    def rec(i: int) -> None:
        if nodes.feature[i] < 0:
            out.append("L")
            return
        out.append(str(nodes.feature[i]))
        rec(nodes.left[i])
        rec(nodes.right[i])

    rec(0)
    return "[" + ", ".join(out) + "]"


def cart_candidates(
    stream: CorpusFactory,
    n: int,
    N: int,
    max_depth: int,
    round_index: int = 0,
) -> list[Candidate]:
    """N trees, each fit on an independent corpus of size n."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    out = []
    for i in range(N):
        corpus = stream.draw(n, (round_index, 1 + i))
        tree = fit_cart(corpus, max_depth)
        out.append(
            Candidate(
                predictor=tree.predict_proba,
                structure_key=cart_structure_key(tree),
                complexity=tree.depth,
                family="DT",
                order=i,
            )
        )
    return out
