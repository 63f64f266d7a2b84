"""Falling rule lists sampled from a Bayesian posterior (Gibbs-style MH moves).

The posterior is Bernoulli likelihood under logistic risk scores times a
geometric(0.5) prior on list length. Risk scores are deterministic given the
clause sequence: per-segment Laplace-smoothed empirical log-odds, projected
to be nonincreasing by weighted isotonic (PAVA) regression. The chain state
is therefore just the ordered clause sequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from ..sampler import CorpusFactory
from .base import Candidate

__all__ = [
    "RuleList",
    "AntecedentPool",
    "mine_antecedents",
    "sample_frl_trajectory",
    "frl_candidates",
    "frl_structure_key",
    "fit_risk_scores",
    "log_posterior",
]

PROB_EPS = 1e-6


@dataclass(frozen=True)
class RuleList:
    """Ordered clauses (tuples of feature indices, all-ones conjunctions)
    plus monotone nonincreasing risk scores r_0..r_H (r_H = default)."""

    clauses: tuple[tuple[int, ...], ...]
    risk_scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.risk_scores) != len(self.clauses) + 1:
            raise ValueError("need one risk score per clause plus a default")
        rs = self.risk_scores
        if any(rs[h + 1] > rs[h] + 1e-12 for h in range(len(rs) - 1)):
            raise ValueError("risk scores must be nonincreasing")

    @property
    def length(self) -> int:
        return len(self.clauses)

    def segments(self, X: np.ndarray) -> np.ndarray:
        """Index of the first matching clause per row; H when none match."""
        return _segments(X, self.clauses)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        risks = np.asarray(self.risk_scores)[self.segments(X)]
        return np.clip(_sigmoid(risks), PROB_EPS, 1.0 - PROB_EPS)


@dataclass(frozen=True)
class AntecedentPool:
    antecedents: tuple[tuple[int, ...], ...]
    support: tuple[float, ...]
    feature_names: tuple[str, ...]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _segments(X: np.ndarray, clauses: tuple[tuple[int, ...], ...]) -> np.ndarray:
    n = X.shape[0]
    if not clauses:
        return np.zeros(n, dtype=np.int64)
    match = np.ones((n, len(clauses) + 1), dtype=bool)
    for h, clause in enumerate(clauses):
        match[:, h] = np.all(X[:, list(clause)] == 1.0, axis=1)
    return np.argmax(match, axis=1)


def mine_antecedents(
    corpus: Dataset, min_support: float, max_literals: int = 2
) -> AntecedentPool:
    """All conjunctions of <= max_literals positive literals above support."""
    if max_literals < 1:
        raise ValueError("max_literals must be >= 1")
    X = corpus.X
    if not np.isin(X, (0.0, 1.0)).all():
        raise ValueError("antecedent mining requires all-binary features")
    n, d = X.shape
    ants: list[tuple[int, ...]] = []
    sups: list[float] = []
    for k in range(1, max_literals + 1):
        for combo in itertools.combinations(range(d), k):
            sup = float(np.all(X[:, list(combo)] == 1.0, axis=1).mean())
            if sup >= min_support:
                ants.append(combo)
                sups.append(sup)
    if not ants:
        raise ValueError(
            f"no antecedents reach support {min_support}; lower min_support"
        )
    return AntecedentPool(
        antecedents=tuple(ants),
        support=tuple(sups),
        feature_names=tuple(corpus.schema.names),
    )


def _pava_nonincreasing(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted isotonic projection onto nonincreasing sequences."""
    blocks = [[v, w] for v, w in zip(values.tolist(), weights.tolist())]
    sizes = [1] * len(blocks)
    i = 0
    while i < len(blocks) - 1:
        if blocks[i][0] < blocks[i + 1][0]:
            v1, w1 = blocks[i]
            v2, w2 = blocks[i + 1]
            blocks[i] = [(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2]
            sizes[i] += sizes[i + 1]
            del blocks[i + 1], sizes[i + 1]
            if i > 0:
                i -= 1
        else:
            i += 1
    out = []
    for (v, _), s in zip(blocks, sizes):
        out.extend([v] * s)
    return np.asarray(out)


def fit_risk_scores(
    clauses: tuple[tuple[int, ...], ...], X: np.ndarray, y: np.ndarray
) -> np.ndarray:
    """Laplace-smoothed segment log-odds, projected to be nonincreasing."""
    H = len(clauses)
    seg = _segments(X, clauses)
    m = np.bincount(seg, minlength=H + 1).astype(np.float64)
    k = np.bincount(seg, weights=y.astype(np.float64), minlength=H + 1)
    logodds = np.log((k + 1.0) / (m - k + 1.0))
    return _pava_nonincreasing(logodds, m + 2.0)


def log_posterior(
    clauses: tuple[tuple[int, ...], ...], X: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Log posterior (up to a constant) and the fitted risk scores."""
    risks = fit_risk_scores(clauses, X, y)
    seg = _segments(X, clauses)
    p = np.clip(_sigmoid(risks[seg]), PROB_EPS, 1.0 - PROB_EPS)
    ll = float(np.sum(y * np.log(p) + (1 - y) * np.log(1.0 - p)))
    return ll - len(clauses) * math.log(2.0), risks


def _make_candidate(
    clauses: tuple[tuple[int, ...], ...],
    risks: np.ndarray,
    names: tuple[str, ...],
    order: int,
) -> Candidate:
    rl = RuleList(clauses=clauses, risk_scores=tuple(risks.tolist()))
    return Candidate(
        predictor=rl.predict_proba,
        structure_key=frl_structure_key(rl, names),
        complexity=rl.length,
        family="FRL",
        order=order,
    )


def sample_frl_trajectory(
    corpus: Dataset,
    pool: AntecedentPool,
    C: int,
    steps: int,
    seed: int,
    order_offset: int = 0,
) -> list[Candidate]:
    """MH chain over clause sequences; every visited state becomes a candidate.

    Moves: insert, delete, swap adjacent, replace. Inserted antecedents are
    drawn from the pool minus the current list, so lists never repeat a
    clause and the proposal ratios below keep detailed balance exact.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = np.random.default_rng(seed)
    X, y = corpus.X, corpus.y
    A = len(pool.antecedents)
    names = pool.feature_names

    state: tuple[tuple[int, ...], ...] = ()
    lp, risks = log_posterior(state, X, y)
    out: list[Candidate] = []

    for step in range(steps):
        H = len(state)
        move = rng.integers(0, 4)
        proposal = None
        log_qratio = 0.0
        if move == 0 and H < C and H < A:  # insert
            avail = [a for a in pool.antecedents if a not in state]
            ant = avail[rng.integers(0, len(avail))]
            pos = int(rng.integers(0, H + 1))
            proposal = state[:pos] + (ant,) + state[pos:]
            # forward: 1/(H+1) * 1/|avail|; reverse delete: 1/(H+1)
            log_qratio = math.log(len(avail))
        elif move == 1 and H >= 1:  # delete
            pos = int(rng.integers(0, H))
            proposal = state[:pos] + state[pos + 1 :]
            # forward: 1/H; reverse insert: 1/H * 1/(A - H + 1)
            log_qratio = -math.log(A - H + 1)
        elif move == 2 and H >= 2:  # swap adjacent
            pos = int(rng.integers(0, H - 1))
            lst = list(state)
            lst[pos], lst[pos + 1] = lst[pos + 1], lst[pos]
            proposal = tuple(lst)
        elif move == 3 and H >= 1 and A > H:  # replace
            pos = int(rng.integers(0, H))
            avail = [a for a in pool.antecedents if a not in state]
            ant = avail[rng.integers(0, len(avail))]
            proposal = state[:pos] + (ant,) + state[pos + 1 :]

        if proposal is not None:
            lp_new, risks_new = log_posterior(proposal, X, y)
            if math.log(rng.random() + 1e-300) < lp_new - lp + log_qratio:
                state, lp, risks = proposal, lp_new, risks_new
        assert all(
            risks[h + 1] <= risks[h] + 1e-12 for h in range(len(risks) - 1)
        ), "monotone risk invariant violated"
        out.append(_make_candidate(state, risks, names, order_offset + step))
    return out


def frl_candidates(
    stream: CorpusFactory,
    n: int,
    P: int,
    steps: int,
    C: int,
    min_support: float = 0.05,
    round_index: int = 0,
) -> list[Candidate]:
    """Union of P trajectories, each on an independent corpus (multi-start)."""
    if P < 1:
        raise ValueError("P must be >= 1")
    out: list[Candidate] = []
    for j in range(P):
        corpus = stream.draw(n, (round_index, 1 + j))
        pool = mine_antecedents(corpus, min_support=min_support, max_literals=2)
        out.extend(
            sample_frl_trajectory(
                corpus, pool, C=C, steps=steps,
                seed=int(np.random.default_rng(
                    np.random.SeedSequence(entropy=stream.repetition_seed,
                                           spawn_key=(round_index, 1 + j, 7919))
                ).integers(2**62)),
                order_offset=j * steps,
            )
        )
    return out


def frl_structure_key(rule_list: RuleList, feature_names=None) -> str:
    """Ordered clause list, literals sorted by feature index, risks omitted."""

    def name(i: int) -> str:
        return feature_names[i] if feature_names is not None else f"X{i}"

    parts = []
    for clause in rule_list.clauses:
        lits = ", ".join(name(i) for i in sorted(clause))
        parts.append(f"[{lits}]")
    return ",".join(parts) if parts else "[]"
