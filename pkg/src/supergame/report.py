"""Figure rendering for Monte Carlo reports.

Writes PNG files next to the delimited output of the `mc` command: a
histogram comparing the sampling distributions of the scenario-based and
naive-probit estimates of the strategic parameter, with the population value
marked.
"""

from __future__ import annotations

import os

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_mc_figures(summary, outdir: str, stem: str = "mc") -> list[str]:
    """Histogram of the replication estimates; returns the written paths."""
    plt = _pyplot()
    ok = [r for r in summary.replications if r.error is None]
    if not ok:
        return []
    deltas = np.array([r.delta_hat for r in ok])
    probits = np.array([r.delta_probit for r in ok])
    true_delta = summary.design.delta

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    lo = min(deltas.min(), probits.min(), true_delta)
    hi = max(deltas.max(), probits.max(), true_delta)
    pad = 0.08 * (hi - lo + 1e-9)
    bins = np.linspace(lo - pad, hi + pad, 31)
    ax.hist(deltas, bins=bins, alpha=0.55, color="tab:blue", label="scenario SML")
    ax.hist(probits, bins=bins, alpha=0.55, color="tab:green", label="naive probit")
    ax.axvline(true_delta, color="tab:red", lw=1.5, label="population value")
    ax.axvline(deltas.mean(), color="tab:blue", lw=1.2, ls="--")
    ax.axvline(probits.mean(), color="tab:green", lw=1.2, ls="--")
    ax.set_xlabel("estimate of the strategic parameter")
    ax.set_ylabel("replications")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, f"{stem}_delta_distribution.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
