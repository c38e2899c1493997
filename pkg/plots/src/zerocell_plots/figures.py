"""Figure builders for the three supported kinds.

No mathematics is recomputed here: every reference line or asymptote is
drawn from the CSV's ``reference`` column as-is.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .reader import ResultRow

KINDS = ("erosionRatio", "inclusionVsN", "momentOverlay")


def render(kind: str, rows: list[ResultRow], out_dir: str) -> list[str]:
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; expected one of {KINDS}")
    builder = {
        "erosionRatio": _erosion_ratio,
        "inclusionVsN": _inclusion_vs_n,
        "momentOverlay": _moment_overlay,
    }[kind]
    fig = builder(rows)
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    for ext in ("svg", "png"):
        path = os.path.join(out_dir, f"{kind}.{ext}")
        fig.savefig(path, bbox_inches="tight", dpi=150)
        outputs.append(path)
    plt.close(fig)
    return outputs


def _erosion_ratio(rows: list[ResultRow]):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel("log2 scale")
    ax.set_ylabel("shell mass / scale")
    ax.set_title("Erosion shell mass against the limiting exponent")
    pts = sorted((r for r in rows if r.sweep_value > 0), key=lambda r: r.sweep_value)
    if pts:
        xs = [math.log2(r.sweep_value) for r in pts]
        ys = [r.estimate for r in pts]
        errs = [r.stderr for r in pts]
        ax.errorbar(xs, ys, yerr=errs, fmt="o-", capsize=3, label="estimate")
        ax.plot(xs, [r.reference for r in pts], "k--", label="reference")
        ax.legend()
    return fig


def _inclusion_vs_n(rows: list[ResultRow]):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel("sample size n")
    ax.set_ylabel("inclusion probability")
    ax.set_xscale("log")
    ax.set_title("Inclusion probability: empirical and product formula")
    groups: dict[str, list[ResultRow]] = {}
    for r in rows:
        groups.setdefault(r.experiment, []).append(r)
    asymptote = None
    for label, series in sorted(groups.items()):
        series.sort(key=lambda r: r.sweep_value)
        xs = [r.sweep_value for r in series]
        ys = [r.estimate for r in series]
        short = label.split("/")[-1]
        if short == "empirical":
            lo = [r.estimate - 1.96 * r.stderr for r in series]
            hi = [r.estimate + 1.96 * r.stderr for r in series]
            ax.plot(xs, ys, "o-", label="empirical")
            ax.fill_between(xs, lo, hi, alpha=0.25, label="95% band")
        else:
            ax.plot(xs, ys, "s--", label=short)
        if short == "closedForm":
            asymptote = series[-1].reference
    if asymptote is None and rows:
        asymptote = rows[-1].reference
    if asymptote is not None:
        ax.axhline(asymptote, color="k", linestyle=":", label="limit")
    if rows:
        ax.legend()
    return fig


def _moment_overlay(rows: list[ResultRow]):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel("moment order m")
    ax.set_ylabel("windowed volume moment")
    ax.set_title("Volume moments: intersection body vs zero cell")
    pts = sorted(rows, key=lambda r: r.sweep_value)
    if pts:
        xs = [r.sweep_value for r in pts]
        width = 0.35
        ax.bar([x - width / 2 for x in xs], [r.estimate for r in pts], width, yerr=[r.stderr for r in pts], capsize=4, label="finite-n body")
        ax.bar([x + width / 2 for x in xs], [r.reference for r in pts], width, alpha=0.7, label="zero cell")
        ax.set_xticks(xs)
        ax.legend()
    return fig
