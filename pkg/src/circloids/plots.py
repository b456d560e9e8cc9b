"""Matplotlib figures for the report path of the CLI.

All figures render to files with the Agg backend; nothing here opens a
window.  Functions return the path they wrote.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_raster(raster, path, title="", overlay=None):
    """Occupancy image of a raster window; optional second raster drawn on
    top in a contrasting colour."""
    spec = raster.spec
    extent = (0.0, float(spec.x_period), spec.y_min, spec.y_max)
    fig, ax = plt.subplots(figsize=(8, 8 * spec.ny / spec.nx + 1))
    ax.imshow(raster.cells, origin="lower", extent=extent, cmap="Greys",
              interpolation="nearest", aspect="equal")
    if overlay is not None:
        shown = np.ma.masked_where(~overlay.cells, overlay.cells)
        ax.imshow(shown, origin="lower", extent=extent, cmap="autumn",
                  interpolation="nearest", aspect="equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_rotation_estimate(estimate, path, title="rotation set estimate"):
    """Displacement averages as a scatter with the convex hull outlined."""
    fig, ax = plt.subplots(figsize=(6, 6))
    av = np.asarray(estimate.averages)
    ax.scatter(av[:, 0], av[:, 1], s=8, alpha=0.6, label="seed averages")
    hull = np.asarray(estimate.hull)
    if len(hull) > 1:
        closed = np.vstack([hull, hull[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "r-", lw=1.2, label="hull")
    ax.set_xlabel("mean x displacement")
    ax.set_ylabel("mean y displacement")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_lift_profile(lift, path, x_range, y_value=0.5, n=600,
                      title="semiconjugacy lift along a line"):
    """H sampled along a horizontal line of the cover."""
    xs = np.linspace(x_range[0], x_range[1], n)
    z = np.stack([xs, np.full(n, y_value)], axis=-1)
    vals = lift.evaluate(z)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, vals, lw=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel("H")
    ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_orbit(points, path, title="orbit scatter"):
    """Scatter of a (k, 2) orbit segment."""
    pts = np.asarray(points)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(pts[:, 0], pts[:, 1], s=4, alpha=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
