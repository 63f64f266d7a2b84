"""Genetic-programming symbolic regression over {+, *} with canonical keys.

Expression trees are nested tuples: ("+", l, r), ("*", l, r),
("x", feature_index), ("c", value). Depth of a leaf is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from .base import Candidate

__all__ = [
    "ExprTree",
    "GpConfig",
    "evolve",
    "canonicalize",
    "sr_predict",
    "tree_depth",
    "random_tree",
]

PROB_EPS = 1e-6
_COEFF_ZERO = 1e-12

Node = tuple


@dataclass(frozen=True)
class ExprTree:
    root: Node

    @property
    def depth(self) -> int:
        return tree_depth(self.root)


@dataclass(frozen=True)
class GpConfig:
    population: int = 200
    generations: int = 10
    tournament_size: int = 3
    p_crossover: float = 0.7
    p_mutation: float = 0.2
    max_depth: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.p_crossover + self.p_mutation > 1.0 + 1e-12:
            raise ValueError("p_crossover + p_mutation must be <= 1")


def tree_depth(node: Node) -> int:
    if node[0] in ("x", "c"):
        return 0
    return 1 + max(tree_depth(node[1]), tree_depth(node[2]))


def eval_tree(node: Node, X: np.ndarray) -> np.ndarray:
    op = node[0]
    if op == "x":
        return X[:, node[1]]
    if op == "c":
        return np.full(X.shape[0], float(node[1]))
    a = eval_tree(node[1], X)
    b = eval_tree(node[2], X)
    return a + b if op == "+" else a * b


def sr_predict(tree: ExprTree, X: np.ndarray) -> np.ndarray:
    """Logistic squashing of the raw tree value, clamped into (0, 1)."""
    z = eval_tree(tree.root, X)
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, PROB_EPS, 1.0 - PROB_EPS)


# --- canonicalization -------------------------------------------------------

def _expand(node: Node) -> dict[tuple[int, ...], float]:
    """Polynomial form: monomial (sorted var-index tuple) -> coefficient."""
    op = node[0]
    if op == "x":
        return {(node[1],): 1.0}
    if op == "c":
        return {(): float(node[1])}
    a = _expand(node[1])
    b = _expand(node[2])
    if op == "+":
        out = dict(a)
        for mono, coef in b.items():
            out[mono] = out.get(mono, 0.0) + coef
        return out
    out: dict[tuple[int, ...], float] = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = tuple(sorted(m1 + m2))
            out[mono] = out.get(mono, 0.0) + c1 * c2
    return out


def canonicalize(tree: ExprTree) -> str:
    """Structure key: expanded monomials with coefficients dropped.

    Variables inside a monomial sort by index (powers appear as repeated
    factors); monomials sort lexicographically; any surviving constant term
    collapses to a trailing "1". A vanishing polynomial keys as "0".
    """
    poly = _expand(tree.root)
    monos = sorted(m for m, c in poly.items() if m and abs(c) > _COEFF_ZERO)
    parts = ["*".join(f"X{i}" for i in m) for m in monos]
    if abs(poly.get((), 0.0)) > _COEFF_ZERO:
        parts.append("1")
    return " + ".join(parts) if parts else "0"


# --- genetic programming ----------------------------------------------------

def random_tree(rng: np.random.Generator, d: int, max_depth: int) -> Node:
    if max_depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.8:
            return ("x", int(rng.integers(0, d)))
        return ("c", float(rng.uniform(0.0, 2.0)))
    op = "+" if rng.random() < 0.5 else "*"
    return (op, random_tree(rng, d, max_depth - 1), random_tree(rng, d, max_depth - 1))


def _paths(node: Node, prefix=()) -> list[tuple]:
    out = [prefix]
    if node[0] in ("+", "*"):
        out += _paths(node[1], prefix + (1,))
        out += _paths(node[2], prefix + (2,))
    return out


def _subtree(node: Node, path: tuple) -> Node:
    for step in path:
        node = node[step]
    return node


def _replace(node: Node, path: tuple, new: Node) -> Node:
    if not path:
        return new
    lst = list(node)
    lst[path[0]] = _replace(node[path[0]], path[1:], new)
    return tuple(lst)


def _crossover(rng, a: Node, b: Node) -> Node:
    pa = _paths(a)
    pb = _paths(b)
    return _replace(a, pa[rng.integers(0, len(pa))], _subtree(b, pb[rng.integers(0, len(pb))]))


def _mutate(rng, node: Node, d: int, max_depth: int) -> Node:
    paths = _paths(node)
    path = paths[rng.integers(0, len(paths))]
    target = _subtree(node, path)
    if rng.random() < 0.5:  # point mutation
        if target[0] in ("+", "*"):
            new: Node = ("*" if target[0] == "+" else "+", target[1], target[2])
        elif target[0] == "x":
            new = ("x", int(rng.integers(0, d)))
        else:
            new = ("c", float(rng.uniform(0.0, 2.0)))
    else:  # subtree mutation
        new = random_tree(rng, d, max(0, max_depth - len(path)))
    return _replace(node, path, new)


def _fitness(node: Node, X: np.ndarray, y: np.ndarray) -> float:
    p = sr_predict(ExprTree(node), X)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1.0 - p)))


def evolve(corpus: Dataset, cfg: GpConfig) -> list[Candidate]:
    """Tournament GP with subtree crossover, point/subtree mutation, elitism.

    Returns the final-generation population as candidates.
    """
    if cfg.population < 2:
        raise ValueError("population must be >= 2")
    rng = np.random.default_rng(cfg.seed)
    X, y = corpus.X, corpus.y
    d = X.shape[1]

    pop = [random_tree(rng, d, cfg.max_depth) for _ in range(cfg.population)]
    fits = [_fitness(t, X, y) for t in pop]

    def tournament() -> Node:
        idx = rng.integers(0, len(pop), size=cfg.tournament_size)
        return pop[int(min(idx, key=lambda i: fits[i]))]

    for _ in range(cfg.generations):
        best = int(np.argmin(fits))
        children = [pop[best]]  # elitism keeps best fitness non-increasing
        while len(children) < cfg.population:
            r = rng.random()
            if r < cfg.p_crossover:
                child = _crossover(rng, tournament(), tournament())
            elif r < cfg.p_crossover + cfg.p_mutation:
                child = _mutate(rng, tournament(), d, cfg.max_depth)
            else:
                child = tournament()
            if tree_depth(child) <= cfg.max_depth:  # reject oversized children
                children.append(child)
        pop = children
        fits = [_fitness(t, X, y) for t in pop]

    out = []
    for i, node in enumerate(pop):
        tree = ExprTree(node)
        out.append(
            Candidate(
                predictor=lambda M, _t=tree: sr_predict(_t, M),
                structure_key=canonicalize(tree),
                complexity=tree.depth,
                family="SR",
                order=i,
            )
        )
    return out
