"""Matplotlib renderers for the CLI report path.

File output only (Agg backend); each function writes one PNG next to the
delimited data it illustrates. Metadata is stripped so identical runs
produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE = {"dpi": 130, "metadata": {"Software": None}}


def save_bell_scan(path, phis_deg: np.ndarray, margin: np.ndarray, best: dict) -> None:
    """Heat map of the inequality margin over (phi_b, phi_c) at phi_a = 0."""
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    extent = [phis_deg[0], phis_deg[-1], phis_deg[0], phis_deg[-1]]
    im = ax.imshow(
        margin.T, origin="lower", extent=extent, aspect="equal", cmap="RdBu_r",
        vmin=-float(np.max(np.abs(margin))), vmax=float(np.max(np.abs(margin))),
    )
    ax.plot([best["phi_b_deg"]], [best["phi_c_deg"]], marker="*", markersize=12,
            color="k", linestyle="none")
    ax.set_xlabel("phi_b (deg)")
    ax.set_ylabel("phi_c (deg)")
    ax.set_title("inequality margin lhs - rhs (phi_a = 0)")
    fig.colorbar(im, ax=ax, label="margin")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def save_trajectory(path, times: np.ndarray, positions: np.ndarray,
                    centers_up: np.ndarray, centers_dn: np.ndarray) -> None:
    """Trajectory over the moving packet centers."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(times, centers_up, color="0.7", linestyle="--", label="packet centers")
    ax.plot(times, centers_dn, color="0.7", linestyle="--")
    ax.plot(times, positions, color="C0", label="trajectory")
    ax.axhline(0.0, color="0.85", linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("z")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def save_ensemble(path, endpoints: np.ndarray, zgrid: np.ndarray,
                  density: np.ndarray, tv_distance: float) -> None:
    """Endpoint histogram against the analytic final density."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(endpoints, bins=60, density=True, alpha=0.55, color="C0",
            label="trajectory endpoints")
    ax.plot(zgrid, density, color="C3", label="|psi(T)|^2")
    ax.set_xlabel("z(T)")
    ax.set_ylabel("density")
    ax.set_title(f"total-variation distance {tv_distance:.4f}")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
