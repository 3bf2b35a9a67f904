"""PNG rendering for CLI reports, written next to the delimited files.

Figures are a convenience view of the same data the CSV/JSON carry;
nothing downstream parses them.  The Agg backend is forced so rendering
works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import PhaseField

__all__ = ["field_png", "scan_png", "series_png", "eigenvalue_png",
           "suite_png", "timeline_png", "battery_png"]

_DPI = 130


def field_png(field: PhaseField, path, title: str = "") -> None:
    """Phase-space heatmap, diverging scale centered on zero."""
    grid = field.grid
    peak = float(np.abs(field.values).max()) or 1.0
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    img = ax.imshow(field.values.T, origin="lower", aspect="auto",
                    extent=[grid.x[0], grid.x[-1], grid.p[0], grid.p[-1]],
                    cmap="RdBu_r", vmin=-peak, vmax=peak,
                    interpolation="nearest")
    fig.colorbar(img, ax=ax, label="W")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def scan_png(report, path) -> None:
    """Functional versus E* with the detection threshold and witness."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(report.e_star_grid, report.functional_values,
            lw=1.0, marker=".", ms=3)
    ax.axhline(report.tau_det, color="crimson", lw=0.8, ls="--",
               label=f"tau_det = {report.tau_det:g}")
    if report.witness_e_star is not None:
        ax.axvline(report.witness_e_star, color="gray", lw=0.8, ls=":",
                   label=f"witness E* = {report.witness_e_star:.5g}")
    ax.set_xlabel("E*")
    ax.set_ylabel("functional")
    ax.set_title(f"{report.label} scan (verdict: {report.verdict})")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def series_png(rows, path, tau_det: float = None) -> None:
    """Barrier probability series from an evolve run."""
    data = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(data[:, 0], data[:, 1], label="P(0 <= x < l)", color="firebrick")
    ax.plot(data[:, 0], data[:, 2], label="P(E > V0)", color="navy")
    if tau_det is not None:
        crossing = data[:, 1] > data[:, 2] + tau_det
        if crossing.any():
            ax.fill_between(data[:, 0], 0, data[:, 1].max(),
                            where=crossing, color="gold", alpha=0.25,
                            label="tunnelling mask")
    ax.set_xlabel("t")
    ax.set_ylabel("probability")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def eigenvalue_png(eigenvalues, path, title: str = "") -> None:
    """Reconstruction spectrum, largest magnitudes first."""
    ev = np.asarray(eigenvalues, dtype=float)
    order = np.argsort(-np.abs(ev))
    shown = ev[order][:40]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.stem(np.arange(shown.size), shown, basefmt=" ")
    ax.set_xlabel("rank by |eigenvalue|")
    ax.set_ylabel("eigenvalue")
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def timeline_png(times, violations, tau_det, path) -> None:
    """Per-snapshot scan violation against the detection threshold."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(times, violations, marker=".", ms=4, lw=1.0, color="navy")
    ax.axhline(tau_det, color="crimson", lw=0.8, ls="--",
               label=f"tau_det = {tau_det:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("max violation")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def battery_png(values, threshold, path, ylabel) -> None:
    """Worst per-draw certificate value; everything must sit below the bar."""
    vals = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.plot(np.arange(vals.size), vals, ls="none", marker=".", ms=4,
            color="seagreen")
    ax.axhline(threshold, color="crimson", lw=0.8, ls="--",
               label=f"threshold = {threshold:g}")
    ax.set_xlabel("draw")
    ax.set_ylabel(ylabel)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def suite_png(names, passed, path) -> None:
    """Pass/fail bar for the appendix battery."""
    fig, ax = plt.subplots(figsize=(6.0, 2.8))
    colors = ["seagreen" if ok else "crimson" for ok in passed]
    ax.barh(np.arange(len(names)), [1] * len(names), color=colors)
    ax.set_yticks(np.arange(len(names)), labels=names, fontsize=8)
    ax.set_xticks([])
    for i, ok in enumerate(passed):
        ax.text(0.5, i, "pass" if ok else "FAIL", ha="center",
                va="center", fontsize=8, color="white")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
