"""Deterministic SVG rendering of variance traces.

The SVG backend is pinned (fixed hash salt, no timestamps, fixed fonts) so
that identical inputs produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "svg.hashsalt": "cantimol",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "path.simplify": False,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_variance_plot(
    u,
    noisy,
    noiseless,
    threshold: float,
    path: Path | str,
    ylabel: str = "variance",
    title: str = "",
) -> Path:
    """Noisy curve solid, noiseless dashed, threshold as a dotted guide."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(u, noisy, "-", color="C0", label="with phase noise")
        ax.plot(u, noiseless, "--", color="C1", label="noiseless")
        ax.axhline(threshold, linestyle=":", color="0.4", label=f"threshold {threshold:g}")
        ax.set_xlabel("squeezing parameter u")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.set_yscale("log")
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, Path(path))


def render_dispersion_plot(k_eff, omega_numeric, k_band, omega_sine, omega_infinite,
                           path: Path | str, title: str = "") -> Path:
    """Numerical mode frequencies as points over the analytic dispersion curves."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(k_band, omega_sine, "--", color="C1", label="nearest-neighbor sine band")
        ax.plot(k_band, omega_infinite, "-", color="C2", label="all-neighbor chain")
        ax.plot(k_eff, omega_numeric, "o", color="C0", ms=3, label="finite chain modes")
        ax.set_xlabel("effective wavenumber k (rad/m)")
        ax.set_ylabel("mode frequency (rad/s)")
        if title:
            ax.set_title(title)
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, Path(path))
