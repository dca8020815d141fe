"""Static figures from simulator CSVs: 3-D phase portraits of 3-player
trajectories and normalized-TSW-vs-temperature sweeps."""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .io import read_trajectory, read_welfare  # noqa: E402

KINDS = ("trajectory3d", "tsw_sweep")


class PlotDataError(ValueError):
    """Input data cannot be rendered by the requested plot kind."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input CSVs, plot kind, output image path, and an
    optional title plus per-input annotation values (e.g. TSW) shown in
    the title."""

    inputs: tuple
    kind: str
    output: str
    title: str = None
    annotations: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "annotations", tuple(self.annotations))


def _title_with_values(base, label, values):
    if not values:
        return base
    joined = ", ".join(f"{v:.3g}" for v in values)
    return f"{base}  ({label} = {joined})"


def _trajectory_figure(spec):
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    for path in spec.inputs:
        _, blocks = read_trajectory(path)
        if len(blocks) != 3:
            raise PlotDataError(
                f"trajectory3d requires a 3-player trajectory; "
                f"{path} has {len(blocks)} players")
        x, y, z = (b[:, 0] for b in blocks)
        ax.plot(x, y, z, lw=1.0)
        ax.scatter([x[0]], [y[0]], [z[0]], color="red", s=25,
                   depthshade=False)
        ax.scatter([x[-1]], [y[-1]], [z[-1]], color="black", s=25,
                   depthshade=False)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_zlim(0, 1)
    ax.set_xlabel("player 0, action 0")
    ax.set_ylabel("player 1, action 0")
    ax.set_zlabel("player 2, action 0")
    ax.set_title(_title_with_values(
        spec.title or "first-action probabilities", "TSW", spec.annotations))
    return fig


def _sweep_figure(spec):
    groups = []  # (game_id, T array, mean_tsw array) in first-seen order
    for path in spec.inputs:
        ids, temps, means, _ = read_welfare(path)
        index = {}
        for gid, T, m in zip(ids, temps, means):
            if gid not in index:
                index[gid] = len(groups)
                groups.append((gid, [], []))
            entry = groups[index[gid]]
            entry[1].append(T)
            entry[2].append(m)

    fig, ax = plt.subplots(figsize=(6, 4))
    by_temp = {}
    for _, temps, means in groups:
        order = np.argsort(temps)
        T = np.asarray(temps)[order]
        m = np.asarray(means)[order]
        ax.plot(T, m, color="steelblue", alpha=0.25, lw=1.0)
        for Ti, mi in zip(T, m):
            by_temp.setdefault(Ti, []).append(mi)
    grid = sorted(by_temp)
    mean_line = [float(np.mean(by_temp[T])) for T in grid]
    ax.plot(grid, mean_line, color="red", lw=2.0, label="mean")
    if min(grid) > 0 and len(grid) > 1:
        ax.set_xscale("log")
    ax.set_ylim(-1.0, 1.0)
    ax.set_xlabel("T")
    ax.set_ylabel("normalized TSW")
    ax.legend(loc="best")
    ax.set_title(spec.title or
                 f"time-averaged social welfare, {len(groups)} game(s)")
    return fig


def plot_trajectory3d(spec):
    """Render 3-player trajectories as curves in the unit cube of
    first-action probabilities (start markers red, end markers black)."""
    fig = _trajectory_figure(spec)
    try:
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return spec.output


def plot_tsw_sweep(spec):
    """Render one translucent TSW-vs-T series per game plus the
    highlighted ensemble mean; the y-axis is clipped to [-1, 1]."""
    fig = _sweep_figure(spec)
    try:
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return spec.output
