"""Shared fixtures and oracles for the test suite.

Property tests use seeded numpy generators in explicit loops so every run is
reproducible and failures name their seed.
"""

from collections import deque

import numpy as np
import pytest

from circloids.grid import GridSpec, RasterSet

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def bfs_components(mask, wrap_x, adjacency):
    """Naive flood-fill labeling, the ground-truth oracle for the library's
    component labeling.  Returns an int array with labels 1..k (0 outside)."""
    ny, nx = mask.shape
    labels = np.zeros((ny, nx), dtype=int)
    if adjacency == 8:
        steps = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)
                 if (di, dj) != (0, 0)]
    else:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    nxt = 0
    for i0 in range(ny):
        for j0 in range(nx):
            if not mask[i0, j0] or labels[i0, j0]:
                continue
            nxt += 1
            q = deque([(i0, j0)])
            labels[i0, j0] = nxt
            while q:
                i, j = q.popleft()
                for di, dj in steps:
                    ii, jj = i + di, j + dj
                    if wrap_x:
                        jj %= nx
                    if 0 <= ii < ny and 0 <= jj < nx \
                            and mask[ii, jj] and not labels[ii, jj]:
                        labels[ii, jj] = nxt
                        q.append((ii, jj))
    return labels, nxt


def same_partition(a, b):
    """Two labelings describe the same partition of the same support."""
    if not np.array_equal(a > 0, b > 0):
        return False
    pairs = set(zip(a[a > 0].ravel(), b[b > 0].ravel()))
    return len(pairs) == len({p[0] for p in pairs}) == len({p[1] for p in pairs})


def random_blob(rng, spec, center, n_steps=60):
    """A small connected random-walk blob raster around `center` (in cells),
    kept away from the window margins."""
    ny, nx = spec.ny, spec.nx
    mask = np.zeros((ny, nx), dtype=bool)
    i, j = center
    for _ in range(n_steps):
        mask[i, j] = True
        di, dj = rng.integers(-1, 2, size=2)
        i = int(np.clip(i + di, 3, ny - 4))
        j = int(np.clip(j + dj, 3, nx - 4))
    return mask


def wavy_row_mask(rng, spec, thickness=1):
    """An essential annular continuum: the graph of a random low-frequency
    trigonometric polynomial, thickened to `thickness` cells, on a wrapping
    window."""
    xs = spec.x_centers()
    mid = 0.5 * (spec.y_min + spec.y_max)
    # slopes stay below ~0.5 cell per column, so the rasterized graph is
    # genuinely thin (no stacked vertical runs)
    ys = mid + 0.06 * rng.uniform(-1, 1) * np.sin(2 * np.pi * xs) \
        + 0.01 * rng.uniform(-1, 1) * np.cos(4 * np.pi * xs)
    mask = np.zeros((spec.ny, spec.nx), dtype=bool)
    rows = np.floor((ys - spec.y_min) * spec.resolution).astype(int)
    for j, i in enumerate(rows):
        lo = max(0, i - thickness // 2)
        mask[lo:lo + thickness, j] = True
        # keep the graph 8-connected across column steps
        if j:
            a, b = sorted((rows[j - 1], i))
            mask[a:b + 1, j] = True
    if spec.wrap_x:
        a, b = sorted((rows[-1], rows[0]))
        mask[a:b + 1, 0] = True
    return mask


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
