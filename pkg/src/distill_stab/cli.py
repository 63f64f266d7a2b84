"""Command-line entry point: distill-stab {run, sweep, theory}."""

from __future__ import annotations

import argparse
import json
import os
from dataclasses import replace

from .experiment import (
    ExperimentConfig,
    entropy_grid,
    run_experiment,
    sensitivity_sweep,
    write_audit_jsonl,
    write_entropy_grid_csv,
    write_proportions_csv,
)
from .sampler import SamplerSpec
from .theory import theory_grid_csv


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", choices=["mammographic", "breast-cancer"], default="mammographic")
    p.add_argument("--family", choices=["dt", "frl", "sr"], default="dt")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-init", type=int, default=1000)
    p.add_argument("--n-max", type=int, default=20000)
    p.add_argument("--complexity", "-C", type=int, default=3, dest="complexity")
    p.add_argument("--candidates", "-N", type=int, default=30, help="DT candidate budget")
    p.add_argument("--trajectories", "-P", type=int, default=4, help="FRL trajectories")
    p.add_argument("--steps", type=int, default=200, help="FRL chain length")
    p.add_argument("--population", type=int, default=2000, help="SR population")
    p.add_argument("--generations", type=int, default=10)
    p.add_argument("--l-rate", type=float, default=0.1)
    p.add_argument("--sampler", choices=["kernel", "independent"], default="kernel")
    p.add_argument("--bandwidth", type=float, default=2.0)
    p.add_argument("--flip-prob", type=float, default=0.1)
    p.add_argument("--group-switch-prob", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paper-scale", action="store_true", help="restore published budgets")
    p.add_argument("--config", type=str, default=None, help="JSON file overriding flags")
    p.add_argument("--out", type=str, default="results")


def _config_from_args(args) -> ExperimentConfig:
    sampler = SamplerSpec(
        strategy="kernel-smoother" if args.sampler == "kernel" else "independent-gaussian",
        bandwidth=args.bandwidth,
        flip_prob=args.flip_prob,
        group_switch_prob=args.group_switch_prob,
        seed=args.seed,
    )
    cfg = ExperimentConfig(
        dataset=args.dataset,
        family=args.family,
        repetitions=args.reps,
        alpha=args.alpha,
        n_init=args.n_init,
        n_max=args.n_max,
        C=args.complexity,
        N=args.candidates,
        P=args.trajectories,
        steps=args.steps,
        population=args.population,
        generations=args.generations,
        L_rate=args.l_rate,
        sampler=sampler,
        seed=args.seed,
        stabilize=getattr(args, "stabilize", True),
    )
    if args.config:
        with open(args.config) as f:
            overrides = json.load(f)
        sampler_over = overrides.pop("sampler", None)
        if sampler_over:
            cfg = replace(cfg, sampler=replace(cfg.sampler, **sampler_over))
        cfg = replace(cfg, **overrides)
    if args.paper_scale:
        cfg = cfg.paper_scale()
    return cfg


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    table, audit = run_experiment(cfg, cache_dir=args.out)
    write_proportions_csv(table, os.path.join(args.out, "proportions.csv"))
    write_audit_jsonl(audit, os.path.join(args.out, "audit.jsonl"))
    print(f"top structure: {table.rows[0][0]}  ({table.rows[0][2]:.0%})")
    print(f"entropy: {table.entropy_bits:.4f} bits")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    if args.axis == "grid":
        cs = [int(v) for v in args.c_values.split(",")]
        nms = [int(v) for v in args.n_max_values.split(",")]
        grid = entropy_grid(cfg, cs, nms, cache_dir=args.out)
        write_entropy_grid_csv(grid, cs, nms, os.path.join(args.out, "entropy_grid.csv"))
        print(f"wrote {len(cs)}x{len(nms)} entropy grid")
        return 0
    axis = {"n": "N", "c": "C", "n-max": "n_max", "sampler": "sampler"}[args.axis]
    values = args.values.split(",") if axis == "sampler" else [int(v) for v in args.values.split(",")]
    tables = sensitivity_sweep(cfg, axis, values, cache_dir=args.out)
    for v, table in tables.items():
        name = f"proportions_{args.axis}_{v}.csv"
        write_proportions_csv(table, os.path.join(args.out, name))
        print(f"{args.axis}={v}: entropy {table.entropy_bits:.4f} bits -> {name}")
    return 0


def _cmd_theory(args) -> int:
    with open(args.grid) as f:
        grid = json.load(f)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    theory_grid_csv(grid, args.out, trials=args.trials, seed=args.seed)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="distill-stab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="repeated distillation, proportions + audit")
    _add_common(p_run)
    g = p_run.add_mutually_exclusive_group()
    g.add_argument("--stabilize", dest="stabilize", action="store_true", default=True)
    g.add_argument("--no-stabilize", dest="stabilize", action="store_false")

    p_sweep = sub.add_parser("sweep", help="sensitivity sweeps and entropy grids")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=["n", "c", "n-max", "sampler", "grid"], required=True)
    p_sweep.add_argument("--values", type=str, default="")
    p_sweep.add_argument("--c-values", type=str, default="1,3")
    p_sweep.add_argument("--n-max-values", type=str, default="2000,20000")

    p_theory = sub.add_parser("theory", help="Markov-process grid CSV")
    p_theory.add_argument("--grid", type=str, required=True, help="JSON grid spec")
    p_theory.add_argument("--out", type=str, default="theory_grid.csv")
    p_theory.add_argument("--trials", type=int, default=100000)
    p_theory.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    return _cmd_theory(args)


if __name__ == "__main__":
    raise SystemExit(main())
