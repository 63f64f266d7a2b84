"""Synthetic feature corpora labelled by the teacher."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .forest import Forest

__all__ = ["SamplerSpec", "draw_corpus", "CorpusFactory", "corpus_stream"]


@dataclass(frozen=True)
class SamplerSpec:
    """How pseudo-features are generated.

    strategy "kernel-smoother": resample a real row, add N(0, bandwidth^2)
    noise to continuous coordinates. strategy "independent-gaussian": each
    continuous column drawn from its own fitted Gaussian. Binary columns are
    flipped with flip_prob; one-hot groups move to a uniformly random other
    member with group_switch_prob under either strategy.
    """

    strategy: str = "kernel-smoother"
    bandwidth: float = 2.0
    flip_prob: float = 0.1
    group_switch_prob: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("kernel-smoother", "independent-gaussian"):
            raise ValueError(f"unknown sampler strategy {self.strategy!r}")
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be >= 0")
        for p in (self.flip_prob, self.group_switch_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


def draw_corpus(
    real: Dataset,
    teacher: Forest,
    n: int,
    spec: SamplerSpec,
    rng: np.random.Generator | None = None,
) -> Dataset:
    """n pseudo-rows with teacher labels."""
    if n < 1:
        raise ValueError(f"corpus size must be >= 1, got {n}")
    if real.n_rows == 0:
        raise ValueError("real dataset is empty")
    if rng is None:
        rng = np.random.default_rng(spec.seed)

    schema = real.schema
    idx = rng.integers(0, real.n_rows, size=n)
    X = real.X[idx].copy()

    cont = schema.continuous_indices()
    if cont:
        if spec.strategy == "kernel-smoother":
            if spec.bandwidth > 0:
                X[:, cont] += rng.normal(0.0, spec.bandwidth, size=(n, len(cont)))
        else:
            mu = real.X[:, cont].mean(axis=0)
            sd = real.X[:, cont].std(axis=0, ddof=1)
            X[:, cont] = rng.normal(mu, sd, size=(n, len(cont)))

    for j in schema.binary_indices():
        if spec.flip_prob > 0:
            flip = rng.random(n) < spec.flip_prob
            X[flip, j] = 1.0 - X[flip, j]

    for members in schema.onehot_groups().values():
        if spec.group_switch_prob <= 0:
            continue
        g = len(members)
        cur = np.argmax(X[:, members], axis=1)
        switch = rng.random(n) < spec.group_switch_prob
        # uniform over the g-1 other members
        new = (cur + rng.integers(1, g, size=n)) % g
        chosen = np.where(switch, new, cur)
        block = np.zeros((n, g))
        block[np.arange(n), chosen] = 1.0
        X[:, members] = block

    y = teacher.predict_matrix(X)
    return Dataset(X=X, y=y, schema=schema)


class CorpusFactory:
    """Reproducible independent corpora keyed by an integer index tuple."""

    def __init__(self, real: Dataset, teacher: Forest, spec: SamplerSpec, repetition_seed: int):
        self.real = real
        self.teacher = teacher
        self.spec = spec
        self.repetition_seed = repetition_seed

    def draw(self, n: int, index) -> Dataset:
        key = (index,) if isinstance(index, int) else tuple(index)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.repetition_seed, spawn_key=key)
        )
        return draw_corpus(self.real, self.teacher, n, self.spec, rng=rng)


def corpus_stream(
    real: Dataset, teacher: Forest, spec: SamplerSpec, repetition_seed: int
) -> CorpusFactory:
    return CorpusFactory(real, teacher, spec, repetition_seed)
