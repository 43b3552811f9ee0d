"""Line-chart emission for battery reports and training curves.

Figures render to self-contained SVG files through the Agg-free SVG
backend with a pinned hash salt and no embedded timestamp, so a rerun
with the same data produces byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence, Union

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import ParameterError  # noqa: E402

_SVG_SALT = "gradnoise"


@dataclass(frozen=True)
class FigureSpec:
    """One aggregate chart: named series over a shared x grid.

    Every series must match the x grid in length and stay within [0, 1];
    the aggregates plotted here (mean p-values, acceptance fractions)
    are probabilities by construction.
    """

    x: tuple
    series: Mapping[str, tuple]
    x_label: str
    y_label: str
    path: Union[str, Path]
    title: str = ""

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if not x:
            raise ParameterError("figure needs at least one x value")
        series = {}
        for name, ys in dict(self.series).items():
            ys = tuple(float(v) for v in ys)
            if len(ys) != len(x):
                raise ParameterError(
                    f"series {name!r} has {len(ys)} points for {len(x)} x values"
                )
            bad = [v for v in ys if not 0.0 <= v <= 1.0]
            if bad:
                raise ParameterError(f"series {name!r} leaves [0, 1]: {bad[0]!r}")
            series[name] = ys
        if not series:
            raise ParameterError("figure needs at least one series")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "series", series)


def _new_axes():
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_figure(spec: FigureSpec) -> None:
    """Write the aggregate chart described by ``spec`` as an SVG file."""
    fig, ax = _new_axes()
    for name, ys in spec.series.items():
        ax.plot(spec.x, ys, marker="o", markersize=3.5, label=name)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_ylim(-0.02, 1.02)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="best", fontsize=9)
    _save(fig, spec.path)


def render_training_curves(
    path: Union[str, Path],
    iterations: Sequence[int],
    losses: Sequence[float],
    accuracies: Sequence[float],
) -> None:
    """Write loss (left axis, unbounded) and accuracy (right axis) vs iteration."""
    if not (len(iterations) == len(losses) == len(accuracies)):
        raise ParameterError(
            f"length mismatch: {len(iterations)} iterations, "
            f"{len(losses)} losses, {len(accuracies)} accuracies"
        )
    if not iterations:
        raise ParameterError("training curves need at least one checkpoint")
    fig, ax = _new_axes()
    ax.plot(iterations, losses, marker="o", markersize=3.5, color="tab:red", label="loss")
    ax.set_xlabel("iteration")
    ax.set_ylabel("full-batch loss", color="tab:red")
    ax.tick_params(axis="y", labelcolor="tab:red")
    ax2 = ax.twinx()
    ax2.plot(
        iterations, accuracies, marker="s", markersize=3.5, color="tab:blue", label="accuracy"
    )
    ax2.set_ylabel("training accuracy", color="tab:blue")
    ax2.set_ylim(-0.02, 1.02)
    ax2.tick_params(axis="y", labelcolor="tab:blue")
    _save(fig, path)
