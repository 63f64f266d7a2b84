"""Batch harness: repeated distillation runs, proportion tables, sweeps."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, load_breast_cancer, load_mammographic, quantile_discretize
from .engine import EngineConfig, run_algorithm1, run_single_round
from .forest import Forest, fit_forest, load_forest, save_forest
from .sampler import CorpusFactory, SamplerSpec, corpus_stream
from .statkernel import entropy
from .students.cart import cart_candidates
from .students.frl import frl_candidates
from .students.sr import GpConfig, evolve

__all__ = [
    "ExperimentConfig",
    "ProportionTable",
    "DtGenerator",
    "FrlGenerator",
    "SrGenerator",
    "load_dataset",
    "get_teacher",
    "make_generator",
    "run_experiment",
    "sensitivity_sweep",
    "entropy_grid",
    "write_proportions_csv",
    "write_audit_jsonl",
    "write_entropy_grid_csv",
]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "mammographic"  # or "breast-cancer"
    family: str = "dt"  # "dt" | "frl" | "sr"
    repetitions: int = 20
    alpha: float = 0.05
    n_init: int = 1000
    n_max: int = 20000
    C: int = 3
    N: int = 30  # DT candidate budget (paper scale: 100)
    P: int = 4  # FRL trajectories (paper scale: 10)
    steps: int = 200  # FRL chain length (paper scale: 1000)
    population: int = 2000  # SR population (paper scale: 10000)
    generations: int = 10
    L_rate: float = 0.1
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    seed: int = 0
    stabilize: bool = True
    min_support: float = 0.05
    discretize_bins: int = 3  # FRL on continuous data
    teacher_trees: int = 100
    teacher_depth: int = 8

    def paper_scale(self) -> "ExperimentConfig":
        """Restore the published experiment budgets."""
        return replace(
            self,
            repetitions=100,
            n_init=1000,
            n_max=100000,
            N=100,
            P=10,
            steps=1000,
            population=10000,
        )

    def engine(self) -> EngineConfig:
        return EngineConfig(
            alpha=self.alpha,
            n_init=self.n_init,
            n_max=self.n_max,
            C=self.C,
            L_rate=self.L_rate,
        )


@dataclass(frozen=True)
class ProportionTable:
    rows: tuple[tuple[str, int, float], ...]  # (structure_key, count, proportion)
    entropy_bits: float

    @classmethod
    def from_keys(cls, keys: list[str]) -> "ProportionTable":
        counts: dict[str, int] = {}
        for k in keys:
            counts[k] = counts.get(k, 0) + 1
        total = len(keys)
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        rows = tuple((k, c, c / total) for k, c in ordered)
        return cls(rows=rows, entropy_bits=entropy([c / total for _, c in ordered]))

    def top_proportion(self) -> float:
        return self.rows[0][2] if self.rows else 0.0


@dataclass(frozen=True)
class DtGenerator:
    N: int
    max_depth: int

    def generate(self, factory, n, round_index):
        return cart_candidates(factory, n, self.N, self.max_depth, round_index)


@dataclass(frozen=True)
class FrlGenerator:
    P: int
    steps: int
    C: int
    min_support: float = 0.05

    def generate(self, factory, n, round_index):
        return frl_candidates(
            factory, n, self.P, self.steps, self.C,
            min_support=self.min_support, round_index=round_index,
        )


@dataclass(frozen=True)
class SrGenerator:
    population: int
    generations: int
    C: int

    def generate(self, factory, n, round_index):
        corpus = factory.draw(n, (round_index, 1))
        seed = int(
            np.random.default_rng(
                np.random.SeedSequence(
                    entropy=factory.repetition_seed, spawn_key=(round_index, 104729)
                )
            ).integers(2**62)
        )
        cfg = GpConfig(
            population=self.population,
            generations=self.generations,
            max_depth=self.C,
            seed=seed,
        )
        return evolve(corpus, cfg)


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.dataset == "mammographic":
        return load_mammographic()
    if cfg.dataset == "breast-cancer":
        data = load_breast_cancer()
        if cfg.family == "frl":
            # rule lists need binary features; bin the last ten columns only
            last10 = data.schema.names[-10:]
            keep = data.schema.names[:-10]
            binned = quantile_discretize(data, last10, bins=cfg.discretize_bins)
            drop = [binned.schema.index(n) for n in keep]
            cols = [i for i in range(len(binned.schema.columns)) if i not in drop]
            from .data import FeatureSchema

            schema = FeatureSchema(columns=tuple(binned.schema.columns[i] for i in cols))
            return Dataset(X=binned.X[:, cols], y=binned.y, schema=schema)
        return data
    raise ValueError(f"unknown dataset {cfg.dataset!r}")


def get_teacher(cfg: ExperimentConfig, real: Dataset, cache_dir=None) -> Forest:
    """Train once per dataset and persist, so all repetitions share one teacher."""
    suffix = "-frl" if (cfg.dataset == "breast-cancer" and cfg.family == "frl") else ""
    if cache_dir is not None:
        path = os.path.join(cache_dir, f"teacher-{cfg.dataset}{suffix}.json")
        if os.path.exists(path):
            return load_forest(path)
    teacher = fit_forest(real, cfg.teacher_trees, cfg.teacher_depth, seed=cfg.seed)
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        save_forest(teacher, path)
    return teacher


def make_generator(cfg: ExperimentConfig):
    if cfg.family == "dt":
        return DtGenerator(N=cfg.N, max_depth=cfg.C)
    if cfg.family == "frl":
        return FrlGenerator(P=cfg.P, steps=cfg.steps, C=cfg.C, min_support=cfg.min_support)
    if cfg.family == "sr":
        return SrGenerator(population=cfg.population, generations=cfg.generations, C=cfg.C)
    raise ValueError(f"unknown family {cfg.family!r}")


def run_repetition(cfg: ExperimentConfig, real: Dataset, teacher: Forest, rep: int):
    """One repetition; returns (winning structure key, audit records)."""
    factory = corpus_stream(real, teacher, cfg.sampler, repetition_seed=cfg.seed ^ rep)
    generator = make_generator(cfg)
    if cfg.stabilize:
        winner, state, audit = run_algorithm1(factory, generator, cfg.engine())
        records = [dict(rep=rep, stop_reason=None, **a) for a in audit]
        records[-1]["stop_reason"] = state.stop_reason
        return winner.structure_key, records
    classes, table = run_single_round(factory, generator, cfg.n_init, round_index=0)
    record = dict(
        rep=rep,
        stop_reason="unstabilized",
        round=0,
        n=cfg.n_init,
        M=len(classes),
        sum_p=table.sum_p(),
        best_key=table.best_class_key,
    )
    return table.best_class_key, [record]


def run_experiment(
    cfg: ExperimentConfig,
    real: Dataset | None = None,
    teacher: Forest | None = None,
    cache_dir=None,
) -> tuple[ProportionTable, list[dict]]:
    if real is None:
        real = load_dataset(cfg)
    if teacher is None:
        teacher = get_teacher(cfg, real, cache_dir=cache_dir)
    keys: list[str] = []
    audit: list[dict] = []
    for rep in range(cfg.repetitions):
        key, records = run_repetition(cfg, real, teacher, rep)
        keys.append(key)
        audit.extend(records)
    return ProportionTable.from_keys(keys), audit


_AXES = {"N", "C", "n_max", "sampler"}


def sensitivity_sweep(cfg: ExperimentConfig, axis: str, values: list, cache_dir=None):
    """One proportion table per axis value."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {sorted(_AXES)}")
    if not values:
        raise ValueError("empty value list")
    real = load_dataset(cfg)
    teacher = get_teacher(cfg, real, cache_dir=cache_dir)
    out = {}
    for v in values:
        if axis == "sampler":
            strategy = "kernel-smoother" if v in ("kernel", "kernel-smoother") else "independent-gaussian"
            sub = replace(cfg, sampler=replace(cfg.sampler, strategy=strategy))
        elif axis == "n_max":
            sub = replace(cfg, n_max=int(v), n_init=min(cfg.n_init, int(v)))
        else:
            sub = replace(cfg, **{axis: int(v)})
        table, _ = run_experiment(sub, real=real, teacher=teacher)
        out[v] = table
    return out


def entropy_grid(cfg: ExperimentConfig, c_values: list[int], n_max_values: list[int], cache_dir=None):
    """Entropy of the structure proportions over a (C, n_max) grid."""
    real = load_dataset(cfg)
    teacher = get_teacher(cfg, real, cache_dir=cache_dir)
    grid = np.zeros((len(c_values), len(n_max_values)))
    for i, c in enumerate(c_values):
        for j, nm in enumerate(n_max_values):
            sub = replace(cfg, C=c, n_max=nm, n_init=min(cfg.n_init, nm))
            table, _ = run_experiment(sub, real=real, teacher=teacher)
            grid[i, j] = table.entropy_bits
    return grid


def write_proportions_csv(table: ProportionTable, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["structure_key", "count", "proportion"])
        for key, count, prop in table.rows:
            w.writerow([key, count, f"{prop:.6f}"])


def write_audit_jsonl(audit: list[dict], path) -> None:
    with open(path, "w") as f:
        for rec in audit:
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def write_entropy_grid_csv(grid: np.ndarray, c_values, n_max_values, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["C"] + [str(v) for v in n_max_values])
        for c, row in zip(c_values, grid):
            w.writerow([c] + [f"{v:.6f}" for v in row])
