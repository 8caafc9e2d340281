"""Figure rendering for the CLI report paths.

Every renderer writes a single PNG next to the delimited output; the Agg
backend keeps this headless-safe.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _state_labels(states) -> list[str]:
    return ["".join(map(str, s)) for s in states]


def distribution_figure(states, probs, path, empirical=None) -> None:
    """Bar chart of outcome probabilities, optionally overlaid with
    empirical frequencies."""
    labels = _state_labels(states)
    pos = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(labels)), 4))
    width = 0.4 if empirical is not None else 0.7
    ax.bar(pos - (width / 2 if empirical is not None else 0), probs,
           width=width, label="exact")
    if empirical is not None:
        ax.bar(pos + width / 2, empirical, width=width, label="sampled")
        ax.legend()
    ax.set_xticks(pos)
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_xlabel("occupation pattern")
    ax.set_ylabel("probability")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def collision_figure(result, step_formula: float, pair_exact: float, path) -> None:
    """Empirical collision rate with its 1-sigma bar against the exact values."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar([0], [result.rate], yerr=[result.stderr], fmt="o", capsize=4,
                label="empirical")
    ax.axhline(pair_exact, color="tab:green", ls="--", label="exact pair count")
    ax.axhline(step_formula, color="tab:red", ls=":", label="per-step formula")
    ax.set_xticks([0])
    ax.set_xticklabels([f"n={result.n}, l={result.l}, {result.trials} trials"])
    ax.set_ylabel("collision probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def swap_overlap_figure(overlaps, probabilities, path) -> None:
    """Measured acceptance probability against (1 + |<psi|phi>|^2)/2."""
    overlaps = np.asarray(overlaps)
    fig, ax = plt.subplots(figsize=(5, 4))
    grid = np.linspace(0, 1, 200)
    ax.plot(grid, (1 + grid) / 2, "-", color="gray", label="(1 + |<psi|phi>|^2)/2")
    ax.plot(overlaps, probabilities, "o", ms=4, label="circuit")
    ax.set_xlabel("|<psi|phi>|^2")
    ax.set_ylabel("acceptance probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
