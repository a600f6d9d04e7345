"""
Plot experiment artifacts written by ``python -m ssmsep run``.

Usage (from project root):

    python plot.py trace --input results/copy32/trace_seed_0.csv
    python plot.py sweep --input results/quantize/summary.json
"""

from __future__ import annotations

import argparse
import csv
import json
from typing import Dict, List, Tuple

import matplotlib.pyplot as plt


def load_trace(path: str) -> Dict[str, List[float]]:
    columns: Dict[str, List[float]] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            for key, value in row.items():
                try:
                    columns.setdefault(key, []).append(float(value))
                except (TypeError, ValueError):
                    continue
    return columns


def load_sweep(path: str) -> Tuple[List[float], List[float], List[float]]:
    """(q, mean empirical robustness, mean ceiling) rows from a quantize summary."""
    with open(path) as f:
        summary = json.load(f)
    robustness: Dict[float, float] = {}
    ceiling: Dict[float, float] = {}
    for metric in summary.get("metrics", []):
        label = metric.get("label", "")
        if not label.startswith("q="):
            continue
        q = float(label[2:])
        if metric["metric"] == "empirical_robustness":
            robustness[q] = metric["mean"]
        elif metric["metric"] == "theoretical_ceiling":
            ceiling[q] = metric["mean"]
    qs = sorted(robustness)
    return qs, [robustness[q] for q in qs], [ceiling.get(q, float("nan")) for q in qs]


def plot_trace(path: str) -> None:
    columns = load_trace(path)
    steps = columns.get("step", [])
    if not steps:
        print("No trace data found in input file.")
        return

    plt.figure(figsize=(10, 4))
    plt.subplot(1, 2, 1)
    plt.plot(steps, columns["loss"], label="loss")
    plt.plot(steps, columns["norm_err_l1"], label="normalized l1 error")
    plt.yscale("log")
    plt.xlabel("Step")
    plt.title("Training error")
    plt.legend()

    # Parameter growth
    plt.subplot(1, 2, 2)
    plt.plot(steps, columns["max_abs_b"], label="max |B|")
    plt.plot(steps, columns["max_abs_c"], label="max |C|")
    plt.plot(steps, columns["max_abs_a"], label="max |A|")
    plt.yscale("log")
    plt.xlabel("Step")
    plt.title("Parameter magnitudes")
    plt.legend()

    plt.grid(True, which="both", linestyle="--", alpha=0.4)
    plt.tight_layout()
    plt.show()


def plot_sweep(path: str) -> None:
    qs, robustness, ceiling = load_sweep(path)
    if not qs:
        print("No q-sweep rows found in input file.")
        return

    plt.figure(figsize=(8, 5))
    plt.plot(qs, robustness, marker="o", label="empirical")
    plt.plot(qs, ceiling, marker="o", linestyle="--", label="ceiling")
    plt.xscale("log")
    plt.xlabel("Perturbation scale q (log scale)")
    plt.ylabel("Probability of staying within epsilon")
    plt.title("Quantization robustness vs q")
    plt.grid(True, which="both", linestyle="--", alpha=0.4)
    plt.legend()
    plt.tight_layout()
    plt.show()


def main() -> None:
    parser = argparse.ArgumentParser(description="Plot training traces or quantization sweeps.")
    parser.add_argument("kind", choices=["trace", "sweep"], help="Which artifact to plot")
    parser.add_argument(
        "--input",
        type=str,
        required=True,
        help="trace_seed_<s>.csv for 'trace', summary.json of a quantize job for 'sweep'",
    )

    args = parser.parse_args()
    if args.kind == "trace":
        plot_trace(args.input)
    else:
        plot_sweep(args.input)


if __name__ == "__main__":
    main()
