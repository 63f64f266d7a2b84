"""Stable model distillation: interpretable students (decision trees, falling
rule lists, symbolic regression) whose selected structure is stability-tested
against regeneration of the teacher-labelled pseudo-data corpus."""

from .data import Dataset, FeatureSchema, load_breast_cancer, load_mammographic
from .engine import (
    EngineConfig,
    LossGapTable,
    StabilityState,
    bonferroni_pass,
    cross_entropy_loss,
    gap_table,
    linear_search_n,
    required_n,
    run_algorithm1,
)
from .experiment import ExperimentConfig, ProportionTable, run_experiment
from .forest import Forest, fit_forest, load_forest, predict_label, save_forest
from .sampler import SamplerSpec, corpus_stream, draw_corpus
from .statkernel import entropy, mean_var, phi, z_quantile
from .students.base import Candidate, EquivalenceClass, partition, select_representatives

__all__ = [
    "Dataset",
    "FeatureSchema",
    "load_breast_cancer",
    "load_mammographic",
    "EngineConfig",
    "LossGapTable",
    "StabilityState",
    "bonferroni_pass",
    "cross_entropy_loss",
    "gap_table",
    "linear_search_n",
    "required_n",
    "run_algorithm1",
    "ExperimentConfig",
    "ProportionTable",
    "run_experiment",
    "Forest",
    "fit_forest",
    "load_forest",
    "predict_label",
    "save_forest",
    "SamplerSpec",
    "corpus_stream",
    "draw_corpus",
    "entropy",
    "mean_var",
    "phi",
    "z_quantile",
    "Candidate",
    "EquivalenceClass",
    "partition",
    "select_representatives",
]
