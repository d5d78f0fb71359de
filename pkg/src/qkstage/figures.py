"""Figure rendering for evaluation reports. File output only (Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import ConfusionMatrix, row_percent


def render_confusion_heatmap(cm: ConfusionMatrix, path, title: str = "Confusion matrix") -> None:
    """Row-normalized heatmap with percent annotations, written as PNG.

    Output bytes are deterministic for fixed inputs: no timestamp metadata
    is embedded.
    """
    pct = row_percent(cm)
    k = len(cm.class_names)
    fig, ax = plt.subplots(figsize=(1.1 * k + 2.2, 1.1 * k + 1.2))
    im = ax.imshow(pct, cmap="Blues", vmin=0.0, vmax=100.0)
    ax.set_xticks(np.arange(k), labels=cm.class_names, rotation=45, ha="right")
    ax.set_yticks(np.arange(k), labels=cm.class_names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    for t in range(k):
        for p in range(k):
            color = "white" if pct[t, p] > 50.0 else "black"
            ax.text(p, t, f"{pct[t, p]:.1f}", ha="center", va="center", color=color)
    fig.colorbar(im, ax=ax, label="% of true class")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": "qkstage"})
    plt.close(fig)
