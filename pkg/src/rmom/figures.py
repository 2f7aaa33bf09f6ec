"""Matplotlib rendering of the moment-region and sector-length plots.

Only the ``figure`` CLI command imports this module. It forces the Agg
backend so rendering works headless.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 3.4
params = {
    "axes.labelsize": 9,
    "font.size": 8,
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": [fig_width, fig_width * golden_mean * 1.2],
    "figure.dpi": 200,
    "lines.linewidth": 1,
    "lines.markersize": 4,
    "savefig.bbox": "tight",
}

MARKERS = "os^Dvp<>"


def plot_region(curve, points, path):
    """Separable band, general lower bound, optional PPT curve and labelled states.

    ``points`` is a list of ``(label, s2, s4)`` tuples.
    """
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        s2 = np.array(curve.s2_grid)
        ax.fill_between(s2, curve.sep_min, curve.sep_max, color="#a6cee3", lw=0, label="separable")
        ax.plot(s2, curve.gen_min, "k--", label="all states (min)")
        if curve.ppt_min is not None:
            ax.plot(s2, curve.ppt_min, color="#e31a1c", lw=0.8, label="PPT (numeric min)")
        for k, (label, x, y) in enumerate(points):
            ax.plot([x], [y], MARKERS[k % len(MARKERS)], ls="none", label=label)
        ax.set_xlabel(r"$S^{(2)}$")
        ax.set_ylabel(r"$S^{(4)}$")
        ax.set_title(f"d = {curve.d}")
        ax.legend(frameon=False)
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)


def plot_sector_scan(rows, path):
    """Biseparability and legacy verdicts over the noisy GHZ-W triangle.

    ``rows`` are dicts with keys ``g``, ``w``, ``bisep_violated`` and
    ``legacy_bisep_violated``.
    """
    g = np.array([r["g"] for r in rows])
    w = np.array([r["w"] for r in rows])
    new = np.array([r["bisep_violated"] for r in rows], dtype=bool)
    old = np.array([r["legacy_bisep_violated"] for r in rows], dtype=bool)
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        ax.scatter(g[~new], w[~new], s=4, c="#bdbdbd", label="no violation")
        ax.scatter(g[new & ~old], w[new & ~old], s=4, c="#e31a1c", label="new criterion only")
        ax.scatter(g[old], w[old], s=4, c="#ffd92f", label="both criteria")
        ax.set_xlabel("g (GHZ weight)")
        ax.set_ylabel("w (W weight)")
        ax.set_aspect("equal")
        ax.legend(frameon=False, loc="upper right")
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
