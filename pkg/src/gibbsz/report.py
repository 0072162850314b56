"""Plot-data export for finished runs.

Two CSV series per run (partial sums by order, error budget by stage)
and a rendered PNG for each, written next to the JSON output.  The
figures use the Agg backend so headless batch jobs work.
"""

from __future__ import annotations

import csv
import math
import os
from typing import List

from .pipeline import LogZResult


def _out_base(json_path: str) -> str:
    base, ext = os.path.splitext(json_path)
    return base if ext else json_path


def write_report(result: LogZResult, json_path: str) -> List[str]:
    """Write CSV series and figures beside the JSON document.

    Returns the list of file paths written.
    """
    base = _out_base(json_path)
    paths = []

    orders = [c.k for c in result.coefficients]
    lam = result.activity
    partial = []
    running = 0.0
    for c in result.coefficients:
        running += lam ** c.k / math.factorial(c.k) * c.value
        partial.append(running)

    ps_csv = f"{base}.partial-sums.csv"
    with open(ps_csv, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["order", "coefficient", "error_bound", "mesh_width",
                    "mode", "plain_partial_sum", "composed_value"])
        for c, s in zip(result.coefficients, partial):
            w.writerow([c.k, repr(c.value), repr(c.error_bound),
                        repr(c.delta_used), c.mode, repr(s), repr(result.value)])
    paths.append(ps_csv)

    stages = [
        ("requested", result.eps),
        ("truncation", result.truncation_error),
        ("propagation", result.propagation_error),
        ("rounding", result.rounding_error),
        ("total", result.error_total),
    ]
    eb_csv = f"{base}.error-budget.csv"
    with open(eb_csv, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["stage", "error"])
        for name, v in stages:
            w.writerow([name, repr(v)])
    paths.append(eb_csv)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(orders, partial, marker="o", label="plain series partial sum")
    ax.axhline(result.value, color="tab:red", linestyle="--",
               label="composed value")
    ax.set_xlabel("order")
    ax.set_ylabel("log Z per volume")
    ax.set_title(f"partial sums, activity {lam:g}")
    ax.legend()
    fig.tight_layout()
    ps_png = f"{base}.partial-sums.png"
    fig.savefig(ps_png, dpi=120, metadata={"Software": "gibbsz"})
    plt.close(fig)
    paths.append(ps_png)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    names = [s[0] for s in stages]
    vals = [s[1] for s in stages]
    ax.bar(names, vals, color=["#888888", "#4c72b0", "#dd8452", "#55a868",
                               "#c44e52"])
    ax.set_yscale("log")
    ax.set_ylabel("additive error on log Z")
    ax.set_title("error budget by stage")
    fig.tight_layout()
    eb_png = f"{base}.error-budget.png"
    fig.savefig(eb_png, dpi=120, metadata={"Software": "gibbsz"})
    plt.close(fig)
    paths.append(eb_png)

    return paths
