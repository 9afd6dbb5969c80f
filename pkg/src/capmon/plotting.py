"""Figures written next to the CLI's delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .files import atomic_savefig  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "svg.hashsalt": "capmon",
}

# acceptable estimation bands around 1 p.u.
BANDS = {"c": 0.01, "esr": 0.10}


def prediction_figure(window, v_hat, path):
    """Measured vs predicted voltage (top) and their instantaneous difference."""
    t_ms = window.t * 1e3
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 4.5))
        ax1.plot(t_ms, window.v_sm, lw=1.0, label="measured")
        ax1.plot(t_ms, v_hat, "--", lw=1.0, label="predicted")
        ax1.set_ylabel("v_SM [V]")
        ax1.legend(loc="best")
        ax2.plot(t_ms, window.v_sm - v_hat, lw=0.8, color="C3")
        ax2.set_ylabel("error [V]")
        ax2.set_xlabel("t [ms]")
        fig.tight_layout()
        atomic_savefig(fig, path)
        plt.close(fig)


def boxplot_figure(labels, samples, path, quantity="c", per_unit=False, ylabel=None):
    """One box per label; in per-unit mode the acceptable band around 1 is shaded."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.5 * len(labels) + 2.0), 3.2))
        ax.boxplot([np.asarray(s) for s in samples], whis=1.5)
        ax.set_xticks(range(1, len(labels) + 1))
        ax.set_xticklabels(labels, rotation=45 if len(labels) > 6 else 0, ha="right" if len(labels) > 6 else "center")
        if per_unit:
            band = BANDS.get(quantity)
            if band:
                ax.axhspan(1 - band, 1 + band, color="0.9", zorder=0)
            ax.axhline(1.0, color="C2", lw=0.8, ls="--")
        ax.set_ylabel(ylabel or (f"{quantity} [p.u.]" if per_unit else quantity))
        fig.tight_layout()
        atomic_savefig(fig, path)
        plt.close(fig)


def sweep_figure(param, values, c_samples, esr_samples, path, c_label="C", esr_label="ESR"):
    """Side-by-side boxplots of the C and ESR estimates for each swept value."""
    labels = [f"{v:g}" for v in values]
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.0, 3.2))
        for ax, samples, label in ((ax1, c_samples, c_label), (ax2, esr_samples, esr_label)):
            ax.boxplot([np.asarray(s) for s in samples], whis=1.5)
            ax.set_xticks(range(1, len(labels) + 1))
            ax.set_xticklabels(labels)
            ax.set_xlabel(param)
            ax.set_ylabel(label)
        fig.tight_layout()
        atomic_savefig(fig, path)
        plt.close(fig)
