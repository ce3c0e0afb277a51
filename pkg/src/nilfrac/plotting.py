"""SVG and CSV output for orbits and sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import InputError  # noqa: E402
from .sweep import SweepResult, Unfolding, saddle_node_curve  # noqa: E402
from .unitmap import Orbit  # noqa: E402

FORMATS = ("svg", "csv")


def _orbit_svg(orbit: Orbit, path: Path, curve=None, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    if curve is not None and len(curve):
        c = np.asarray(curve)
        ax.plot(c[:, 0], c[:, 1], "-", lw=0.8, color="tab:orange", label="separatrix")
    ax.plot(orbit.x, orbit.y, ".", ms=1.5, color="tab:blue", label=f"orbit ({len(orbit)} points)")
    ax.plot([0], [0], "k+", ms=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _sweep_svg(res: SweepResult, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4.5))
    cells = res.grid
    b1 = np.array([c.b1 for c in cells])
    b2 = np.array([c.b2 for c in cells])
    n = np.array([c.n_sing for c in cells])
    sc = ax.scatter(b1, b2, c=n, s=6, cmap="viridis", vmin=0, vmax=max(3, n.max(initial=0)))
    fig.colorbar(sc, ax=ax, label="singular points")
    t = np.linspace(min(b2.min(), -1), max(b2.max(), 1), 200)
    ax.plot([saddle_node_curve(res.unfolding, v) for v in t], t, "r-", lw=0.8, label="T")
    if res.unfolding is Unfolding.BT:
        ax.plot([0, 0], [t.min(), 0], "m--", lw=0.8, label="H")
    else:
        ax.plot([t.min(), 0], [0, 0], "m--", lw=0.8, label="H")
    for c in res.curve_points:
        dims = [s.dim.value for s in c.singularities if s.dim is not None]
        if dims:
            ax.annotate(f"{dims[0]:.2f}", (c.b1, c.b2), fontsize=6)
    ax.set_xlabel("b1")
    ax.set_ylabel("b2")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_plot(data, fmt: str, path, curve=None, title: str = "") -> Path:
    """Write an orbit or a sweep to ``path`` as SVG or CSV."""
    if fmt not in FORMATS:
        raise InputError(f"format must be one of {FORMATS}")
    path = Path(path)
    if isinstance(data, SweepResult):
        if not data.grid:
            raise InputError("sweep has no cells")
        if fmt == "csv":
            path.write_text(data.to_csv())
        else:
            _sweep_svg(data, path)
        return path
    if not isinstance(data, Orbit):
        raise InputError("emit_plot takes an Orbit or a SweepResult")
    if len(data) == 0:
        raise InputError("orbit is empty")
    if fmt == "csv":
        path.write_text(data.to_csv())
    else:
        _orbit_svg(data, path, curve, title)
    return path
