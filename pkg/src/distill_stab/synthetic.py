"""Synthetic candidate families with known structure gaps, used to exercise
the stabilization loop end to end."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, FeatureSchema
from .students.base import Candidate

__all__ = ["ThresholdPairFactory", "ThresholdPairGenerator", "two_structure_setup"]

_SCHEMA = FeatureSchema(columns=(("x0", "continuous"),))


class ThresholdPairFactory:
    """Corpora with x ~ N(0,1) and labels y = 1[x > 0]."""

    def __init__(self, repetition_seed: int):
        self.repetition_seed = repetition_seed

    def draw(self, n: int, index) -> Dataset:
        key = (index,) if isinstance(index, int) else tuple(index)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.repetition_seed, spawn_key=key)
        )
        x = rng.normal(0.0, 1.0, size=n)
        return Dataset(X=x[:, None], y=(x > 0).astype(np.int64), schema=_SCHEMA)


def _step_predictor(threshold: float, hi: float, lo: float):
    def predict(X: np.ndarray) -> np.ndarray:
        return np.where(X[:, 0] > threshold, hi, lo)

    return predict


@dataclass(frozen=True)
class ThresholdPairGenerator:
    """Two fixed step-function candidates; "A" thresholds at the true boundary,
    "B" at a slight offset, so the loss gap scales with the offset.

    With hi_b/lo_b left at the defaults the per-row loss difference is
    one-sided (B can never beat A on any corpus). Giving B sharper
    probabilities makes the difference two-sided, so the empirically
    selected structure genuinely flips between corpus draws.
    """

    offset: float
    hi: float = 0.73
    lo: float = 0.27
    hi_b: float | None = None
    lo_b: float | None = None

    def generate(self, factory, n, round_index) -> list[Candidate]:
        hi_b = self.hi if self.hi_b is None else self.hi_b
        lo_b = self.lo if self.lo_b is None else self.lo_b
        return [
            Candidate(
                predictor=_step_predictor(0.0, self.hi, self.lo),
                structure_key="A",
                complexity=1,
                family="DT",
                order=0,
            ),
            Candidate(
                predictor=_step_predictor(self.offset, hi_b, lo_b),
                structure_key="B",
                complexity=1,
                family="DT",
                order=1,
            ),
        ]


def two_structure_setup(offset: float, repetition_seed: int):
    """Factory + generator for a two-structure family.

    The standardized gap is S ~= sqrt(phi(0) * offset) for small offsets, so
    offset = 1/(0.3989 n_init) puts sqrt(n_init) * S near 1 (unstable at
    n_init, separable well below typical n_max).
    """
    return ThresholdPairFactory(repetition_seed), ThresholdPairGenerator(offset=offset)
