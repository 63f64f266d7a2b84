"""Loss gaps, p-values, Bonferroni test, sample-size search, and the full
stabilized-distillation loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .data import Dataset
from .sampler import CorpusFactory
from .statkernel import phi, z_quantile
from .students.base import Candidate, EquivalenceClass, partition, select_representatives

__all__ = [
    "PROB_EPS",
    "cross_entropy_loss",
    "ce_loss_rows",
    "GapRow",
    "LossGapTable",
    "StabilityState",
    "EngineConfig",
    "gap_table",
    "bonferroni_pass",
    "required_n",
    "linear_search_n",
    "run_algorithm1",
    "CandidateGenerator",
    "run_single_round",
]

PROB_EPS = 1e-6


def cross_entropy_loss(teacher_label: int, student_prob: float) -> float:
    """Negative log-likelihood of the teacher's label under the student."""
    if not PROB_EPS <= student_prob <= 1.0 - PROB_EPS:
        raise ValueError(f"student probability {student_prob} outside clamp range")
    if teacher_label == 1:
        return -math.log(student_prob)
    return -math.log(1.0 - student_prob)


def ce_loss_rows(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Vectorized per-row cross entropy."""
    if np.any(p < PROB_EPS - 1e-15) or np.any(p > 1.0 - PROB_EPS + 1e-15):
        raise ValueError("student probabilities outside clamp range")
    return -(y * np.log(p) + (1 - y) * np.log(1.0 - p))


@dataclass(frozen=True)
class GapRow:
    competitor_key: str
    d: float
    sigma_hat: float
    p: float
    merged: bool = False  # identical predictions to the best class


@dataclass(frozen=True)
class LossGapTable:
    best_class_key: str
    n: int
    rows: tuple[GapRow, ...]

    def sum_p(self) -> float:
        return float(sum(r.p for r in self.rows))


@dataclass
class StabilityState:
    n: int
    round: int
    alpha: float
    L_rate: float
    n_init: int
    n_max: int
    C: int
    stop_reason: str | None = None


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.05
    n_init: int = 1000
    n_max: int = 100000
    C: int = 3
    L_rate: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 1 <= self.n_init <= self.n_max:
            raise ValueError("need 1 <= n_init <= n_max")
        if self.L_rate <= 0:
            raise ValueError("L_rate must be positive")


def gap_table(classes: list[EquivalenceClass], corpus: Dataset) -> LossGapTable:
    """Per-competitor loss gaps, variances and one-sided p-values.

    The corpus labels are the teacher's predictions. The best class is the
    loss-argmin representative (ties broken lexicographically by key).
    Competitors whose per-row losses match the best exactly (d = 0 and
    sigma = 0) are merged: they carry the same decision operationally.
    """
    if corpus.n_rows == 0:
        raise ValueError("evaluation corpus is empty")
    if not classes:
        raise ValueError("no equivalence classes")
    X, y = corpus.X, corpus.y
    n = corpus.n_rows
    losses = {}
    avg = {}
    for cls in classes:
        rows = ce_loss_rows(y, cls.representative.predictor(X))
        losses[cls.key] = rows
        avg[cls.key] = float(rows.mean())
    best_key = min(avg, key=lambda k: (avg[k], k))

    rows_out: list[GapRow] = []
    for cls in classes:
        if cls.key == best_key:
            continue
        diff = losses[cls.key] - losses[best_key]
        d = float(diff.mean())
        sigma_sq = float(diff.var(ddof=1)) if n > 1 else 0.0
        sigma_hat = math.sqrt(max(sigma_sq, 0.0))
        if sigma_hat == 0.0:
            merged = d == 0.0
            p = 0.0
        else:
            merged = False
            p = 1.0 - phi(math.sqrt(n) * d / math.sqrt(2.0 * sigma_sq))
        rows_out.append(GapRow(cls.key, d, sigma_hat, p, merged))
    return LossGapTable(best_class_key=best_key, n=n, rows=tuple(rows_out))


def bonferroni_pass(table: LossGapTable, alpha: float) -> bool:
    return table.sum_p() <= alpha


def required_n(d: float, sigma_sq: float, alpha: float) -> int:
    """Smallest integer sample size exceeding 2 Z_alpha^2 sigma^2 / d^2."""
    if d <= 0 or sigma_sq <= 0:
        raise ValueError("required_n needs d > 0 and sigma_sq > 0")
    z = z_quantile(alpha)
    return int(math.floor(2.0 * z * z * sigma_sq / (d * d))) + 1


def _sum_p_at(table: LossGapTable, n_new: float) -> float:
    total = 0.0
    for r in table.rows:
        if r.merged or r.sigma_hat == 0.0:
            continue
        total += 1.0 - phi(math.sqrt(n_new) * r.d / (math.sqrt(2.0) * r.sigma_hat))
    return total


def linear_search_n(table: LossGapTable, state: StabilityState) -> int:
    """Smallest n' = (1 + t L) n, t = 1, 2, ..., passing the Bonferroni sum.

    d and sigma are frozen from the current corpus; only the sqrt(n') scaling
    of the test statistic changes. Capped at n_max.
    """
    n = state.n
    t = 1
    while True:
        n_new = (1.0 + t * state.L_rate) * n
        if n_new >= state.n_max:
            return state.n_max
        if _sum_p_at(table, n_new) <= state.alpha:
            return int(math.ceil(n_new - 1e-9))
        t += 1


class CandidateGenerator(Protocol):
    """Family-specific Step-1 candidate production."""

    def generate(self, factory: CorpusFactory, n: int, round_index: int) -> list[Candidate]:
        ...


def run_single_round(
    factory: CorpusFactory,
    generator: CandidateGenerator,
    n: int,
    round_index: int = 0,
) -> tuple[list[EquivalenceClass], LossGapTable]:
    candidates = generator.generate(factory, n, round_index)
    classes = partition(candidates)
    eval_corpus = factory.draw(n, (round_index, 0))
    classes = select_representatives(classes, eval_corpus, ce_loss_rows)
    return classes, gap_table(classes, eval_corpus)


def run_algorithm1(
    factory: CorpusFactory,
    generator: CandidateGenerator,
    cfg: EngineConfig,
) -> tuple[Candidate, StabilityState, list[dict]]:
    """Stabilized distillation loop.

    Each round regenerates candidates at the current corpus size, draws a
    fresh evaluation corpus, tests the Bonferroni sum, and on failure grows
    the corpus by linear search. Stops on a pass, a single surviving class,
    or after one full round has been tested at n_max.
    """
    state = StabilityState(
        n=cfg.n_init,
        round=0,
        alpha=cfg.alpha,
        L_rate=cfg.L_rate,
        n_init=cfg.n_init,
        n_max=cfg.n_max,
        C=cfg.C,
    )
    audit: list[dict] = []
    while True:
        classes, table = run_single_round(factory, generator, state.n, state.round)
        sum_p = table.sum_p()
        audit.append(
            {
                "round": state.round,
                "n": state.n,
                "M": len(classes),
                "sum_p": sum_p,
                "best_key": table.best_class_key,
            }
        )
        winner = next(c.representative for c in classes if c.key == table.best_class_key)
        if len(classes) == 1:
            state.stop_reason = "single-class"
            return winner, state, audit
        if bonferroni_pass(table, cfg.alpha):
            state.stop_reason = "test-passed"
            return winner, state, audit
        if state.n >= cfg.n_max:
            state.stop_reason = "n_max-reached"
            return winner, state, audit
        state.n = min(linear_search_n(table, state), cfg.n_max)
        state.round += 1
