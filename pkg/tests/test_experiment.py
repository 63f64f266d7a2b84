import numpy as np
import pytest

from distill_stab.experiment import (
    ExperimentConfig,
    ProportionTable,
    entropy_grid,
    load_dataset,
    make_generator,
    run_experiment,
    sensitivity_sweep,
    write_audit_jsonl,
    write_entropy_grid_csv,
    write_proportions_csv,
)


def test_proportion_table_ordering_and_entropy():
    table = ProportionTable.from_keys(["b", "a", "a", "a", "c", "b"])
    assert table.rows[0] == ("a", 3, 0.5)
    assert [r[0] for r in table.rows] == ["a", "b", "c"]
    assert table.top_proportion() == 0.5
    assert table.entropy_bits == pytest.approx(1.4591, abs=1e-3)


def test_proportion_table_single_key_entropy_zero():
    table = ProportionTable.from_keys(["k"] * 5)
    assert table.entropy_bits == 0.0
    assert table.top_proportion() == 1.0


def _tiny_cfg(**over):
    base = dict(
        dataset="mammographic",
        family="dt",
        repetitions=2,
        n_init=200,
        n_max=400,
        C=2,
        N=4,
        teacher_trees=10,
        teacher_depth=4,
        seed=0,
    )
    base.update(over)
    return ExperimentConfig(**base)


def test_run_experiment_deterministic_outputs(tmp_path):
    cfg = _tiny_cfg()
    paths = []
    for tag in ("a", "b"):
        table, audit = run_experiment(cfg)
        p_csv = tmp_path / f"prop_{tag}.csv"
        p_jsonl = tmp_path / f"audit_{tag}.jsonl"
        write_proportions_csv(table, p_csv)
        write_audit_jsonl(audit, p_jsonl)
        paths.append((p_csv, p_jsonl))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_unstabilized_has_single_round_audit():
    table, audit = run_experiment(_tiny_cfg(stabilize=False))
    assert all(rec["stop_reason"] == "unstabilized" for rec in audit)
    assert len(audit) == 2  # one record per repetition


def test_make_generator_families():
    assert make_generator(_tiny_cfg(family="dt")).N == 4
    assert make_generator(_tiny_cfg(family="frl")).P == 4
    assert make_generator(_tiny_cfg(family="sr")).population == 2000
    with pytest.raises(ValueError):
        make_generator(_tiny_cfg(family="nn"))


def test_load_dataset_frl_breast_cancer_is_binary():
    data = load_dataset(_tiny_cfg(dataset="breast-cancer", family="frl"))
    assert all(k == "binary" for k in data.schema.kinds)
    assert np.isin(data.X, (0.0, 1.0)).all()
    with pytest.raises(ValueError):
        load_dataset(_tiny_cfg(dataset="unknown"))


def test_paper_scale_budgets():
    cfg = _tiny_cfg().paper_scale()
    assert cfg.repetitions == 100
    assert cfg.n_max == 100000
    assert cfg.N == 100 and cfg.P == 10 and cfg.steps == 1000
    assert cfg.population == 10000


def test_sweep_validation():
    with pytest.raises(ValueError):
        sensitivity_sweep(_tiny_cfg(), "depth", [1, 2])
    with pytest.raises(ValueError):
        sensitivity_sweep(_tiny_cfg(), "N", [])


def test_sweep_and_entropy_grid(tmp_path):
    cfg = _tiny_cfg()
    tables = sensitivity_sweep(cfg, "N", [2, 4])
    assert set(tables) == {2, 4}
    grid = entropy_grid(cfg, c_values=[1, 2], n_max_values=[300, 400])
    assert grid.shape == (2, 2) and np.all(grid >= 0)
    out = tmp_path / "grid.csv"
    write_entropy_grid_csv(grid, [1, 2], [300, 400], out)
    lines = out.read_text().splitlines()
    assert lines[0] == "C,300,400" and len(lines) == 3


def test_sweep_n_max_clamps_n_init():
    # n_max below the configured n_init must not crash
    tables = sensitivity_sweep(_tiny_cfg(), "n_max", [100])
    assert 100 in tables
