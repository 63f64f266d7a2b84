#!/usr/bin/env python3
"""Render experiment CSVs into figures.

Consumes only the documented CSV contracts of the distill-stab CLI:

  proportions.csv   structure_key,count,proportion   -> barplot
  entropy_grid.csv  C,<n_max>,<n_max>,...            -> heatmap

Usage:
  python figures/render.py --kind barplot --in proportions.csv --out fig.png
  python figures/render.py --kind heatmap --in entropy_grid.csv --out fig.png
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class CsvSchemaError(ValueError):
    pass


def read_proportions(path: str) -> list[tuple[str, float]]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["structure_key", "count", "proportion"]:
        raise CsvSchemaError(
            f"{path}: expected header structure_key,count,proportion"
        )
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise CsvSchemaError(f"{path}:{lineno}: expected 3 fields")
        try:
            out.append((row[0], float(row[2])))
        except ValueError:
            raise CsvSchemaError(f"{path}:{lineno}: bad proportion {row[2]!r}") from None
    if not out:
        raise CsvSchemaError(f"{path}: no data rows")
    return out


def read_entropy_grid(path: str) -> tuple[list[str], list[str], np.ndarray]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0][:1] != ["C"] or len(rows[0]) < 2:
        raise CsvSchemaError(f"{path}: expected header C,<n_max>,...")
    n_max_labels = rows[0][1:]
    c_labels = []
    grid = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(rows[0]):
            raise CsvSchemaError(f"{path}:{lineno}: ragged row")
        c_labels.append(row[0])
        try:
            grid.append([float(v) for v in row[1:]])
        except ValueError:
            raise CsvSchemaError(f"{path}:{lineno}: non-numeric entropy") from None
    if not grid:
        raise CsvSchemaError(f"{path}: no data rows")
    return c_labels, n_max_labels, np.asarray(grid)


def render_barplot(in_path: str, out_path: str) -> int:
    """One black bar per unique structure, sorted by descending proportion."""
    rows = sorted(read_proportions(in_path), key=lambda r: (-r[1], r[0]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(rows)), [p for _, p in rows], color="black", width=0.7)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([str(i + 1) for i in range(len(rows))])
    ax.set_xlabel("structure (rank)")
    ax.set_ylabel("proportion")
    ax.set_ylim(0.0, 1.0)
    fig.tight_layout()
    fig.savefig(out_path, dpi=100)
    plt.close(fig)
    return len(rows)


def render_heatmap(in_path: str, out_path: str) -> tuple[int, int]:
    c_labels, n_max_labels, grid = read_entropy_grid(in_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(grid, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(n_max_labels)))
    ax.set_xticklabels(n_max_labels)
    ax.set_yticks(range(len(c_labels)))
    ax.set_yticklabels(c_labels)
    ax.set_xlabel("n_max")
    ax.set_ylabel("C")
    fig.colorbar(im, ax=ax, label="entropy (bits)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=100)
    plt.close(fig)
    return grid.shape


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=["barplot", "heatmap"], required=True)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    try:
        if args.kind == "barplot":
            n = render_barplot(args.in_path, args.out_path)
            print(f"wrote {args.out_path} ({n} bars)")
        else:
            shape = render_heatmap(args.in_path, args.out_path)
            print(f"wrote {args.out_path} ({shape[0]}x{shape[1]} cells)")
    except CsvSchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
