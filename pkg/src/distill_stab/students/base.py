"""Common candidate contract, equivalence classes, representative selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..data import Dataset

__all__ = ["Candidate", "EquivalenceClass", "partition", "select_representatives"]

PredictFn = Callable[[np.ndarray], np.ndarray]  # feature matrix -> P(y=1) vector


@dataclass(frozen=True)
class Candidate:
    predictor: PredictFn
    structure_key: str
    complexity: int
    family: str  # "DT" | "FRL" | "SR"
    order: int = 0  # generation index, used for loss tie-breaks


@dataclass
class EquivalenceClass:
    key: str
    members: list[Candidate] = field(default_factory=list)
    representative: Candidate | None = None


def partition(candidates: list[Candidate]) -> list[EquivalenceClass]:
    """Group candidates by structure key; classes ordered lexicographically."""
    if not candidates:
        raise ValueError("candidate list is empty")
    by_key: dict[str, list[Candidate]] = {}
    for c in candidates:
        by_key.setdefault(c.structure_key, []).append(c)
    return [EquivalenceClass(key=k, members=by_key[k]) for k in sorted(by_key)]


def select_representatives(
    classes: list[EquivalenceClass],
    eval_corpus: Dataset,
    loss: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> list[EquivalenceClass]:
    """Pick the loss-minimal member of each class on the evaluation corpus.

    Exact loss ties go to the earliest-generated member (lowest order).
    """
    if eval_corpus.n_rows == 0:
        raise ValueError("evaluation corpus is empty")
    X, y = eval_corpus.X, eval_corpus.y
    for cls in classes:
        best = None
        best_loss = np.inf
        for cand in sorted(cls.members, key=lambda c: c.order):
            avg = float(np.mean(loss(y, cand.predictor(X))))
            if np.isfinite(avg) and avg < best_loss:
                best, best_loss = cand, avg
        if best is None:
            raise ValueError(f"no member of class {cls.key!r} has finite loss")
        cls.representative = best
    return classes
