"""Lifted torus/annulus maps and rotation-set estimation.

All estimates are finite-horizon inner approximations: displacement
averages of seed orbits at a single horizon.  The reported hull can only
grow with more seeds and the averages carry the usual O(1/n) horizon error,
so nothing here certifies points outside the hull.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from .errors import ValidationError, NonFinite


@dataclass
class LiftedPlaneMap:
    """A lift to the plane of a map of the annulus or torus, acting on
    (..., 2) arrays.  forward must commute with x |-> x+1 (and with
    y |-> y+1 when torus=True); checked on fixed pseudo-random samples."""
    forward: callable
    inverse: callable = None
    torus: bool = False
    name: str = ""

    def __post_init__(self):
        rng = np.random.default_rng(1234)
        z = rng.uniform(-2.0, 3.0, size=(64, 2))
        fz = self.forward(z)
        shifts = [np.array([1.0, 0.0])]
        if self.torus:
            shifts.append(np.array([0.0, 1.0]))
        for s in shifts:
            err = np.max(np.abs(self.forward(z + s) - (fz + s)))
            if err > 1e-9:
                raise ValidationError(f"lift does not commute with translation {s}: {err}")
        if self.inverse is not None:
            err = np.max(np.abs(self.inverse(fz) - z))
            if err > 1e-8:
                raise ValidationError(f"inverse is not an inverse: {err}")

    def orbit(self, z0, n):
        """(n+1, k, 2) orbit array for seeds z0 of shape (k, 2)."""
        z0 = np.atleast_2d(np.asarray(z0, dtype=float))
        out = np.empty((n + 1,) + z0.shape)
        out[0] = z0
        z = z0
        for i in range(n):
            z = self.forward(z)
            out[i + 1] = z
        if not np.isfinite(out[-1]).all():
            raise NonFinite("orbit left finite floats")
        return out


def displacement_average(fmap, z0, n):
    """(F^n(z)-z)/n per seed; shape (k, 2)."""
    if n < 1:
        raise ValidationError("horizon must be positive")
    z0 = np.atleast_2d(np.asarray(z0, dtype=float))
    z = z0.copy()
    for _ in range(n):
        z = fmap.forward(z)
    if not np.isfinite(z).all():
        raise NonFinite("orbit left finite floats")
    return (z - z0) / n


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _hull_2d(points):
    """Monotone-chain convex hull, robust to degenerate (collinear) input.
    Returns hull vertices in counterclockwise order."""
    pts = np.unique(np.round(points, 15), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(iterable):
        h = []
        for p in iterable:
            while len(h) >= 2 and _cross2(h[-1] - h[-2], p - h[-2]) <= 0:
                h.pop()
            h.append(p)
        return h

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


@dataclass
class RotationEstimate:
    horizon: int
    averages: np.ndarray          # (k, 2)
    hull: np.ndarray              # hull vertices
    hull_x: tuple                 # (min, max) of first coordinates
    spread: float                 # max pairwise distance of averages

    def to_json(self):
        return json.dumps({
            "horizon": self.horizon,
            "averages": [[float(a), float(b)] for a, b in self.averages],
            "hull": [[float(a), float(b)] for a, b in self.hull],
            "hull_x": [float(self.hull_x[0]), float(self.hull_x[1])],
            "spread": float(self.spread),
        }, sort_keys=True)


def rotation_set_estimate(fmap, seeds, horizon):
    avgs = displacement_average(fmap, seeds, horizon)
    hull = _hull_2d(avgs)
    hull_x = (float(avgs[:, 0].min()), float(avgs[:, 0].max()))
    d = avgs[:, None, :] - avgs[None, :, :]
    spread = float(np.sqrt((d ** 2).sum(-1)).max())
    return RotationEstimate(int(horizon), avgs, hull, hull_x, spread)


def orbit_spread(fmap, seeds, n):
    """max over 1 <= k <= n of the spread (max - min over seeds) of the
    first-coordinate displacements pi1(F^k z - z)."""
    z0 = np.atleast_2d(np.asarray(seeds, dtype=float))
    z = z0.copy()
    worst = 0.0
    for _ in range(n):
        z = fmap.forward(z)
        d = z[:, 0] - z0[:, 0]
        worst = max(worst, float(d.max() - d.min()))
    if not np.isfinite(z).all():
        raise NonFinite("orbit left finite floats")
    return worst


def uniform_convergence_probe(fmap, seeds, horizons):
    """For each horizon n, sup over seeds of |avg_n - avg_2n| per coordinate.
    Returns a list of dicts (horizon, dev_x, dev_y)."""
    horizons = sorted(int(h) for h in horizons)
    if not horizons or horizons[0] < 1:
        raise ValidationError("horizons must be positive")
    z0 = np.atleast_2d(np.asarray(seeds, dtype=float))
    z = z0.copy()
    snap = {}
    targets = set(horizons) | {2 * h for h in horizons}
    for k in range(1, 2 * horizons[-1] + 1):
        z = fmap.forward(z)
        if k in targets:
            snap[k] = (z - z0) / k
    if not np.isfinite(z).all():
        raise NonFinite("orbit left finite floats")
    out = []
    for h in horizons:
        dev = np.abs(snap[h] - snap[2 * h]).max(axis=0)
        out.append({"horizon": h, "dev_x": float(dev[0]), "dev_y": float(dev[1])})
    return out


def _sign_change(vals):
    return (vals.min() <= 0.0) and (vals.max() >= 0.0)


def fixed_point_search(fmap, region, tol=1e-6):
    """Search the raster region for a fixed point of the lift.

    Scan: a cell qualifies when, over the 3x3 block of cell centers around
    it, both displacement coordinates change sign (zeros count).  The first
    qualifying cell is refined by shrinking squares until the displacement
    norm at the best sample is below tol.  Returns the point as shape-(2,)
    array, or None.
    """
    spec = region.spec
    rows, cols = np.nonzero(region.cells)
    if rows.size == 0:
        return None
    xs = spec.x_centers()
    ys = spec.y_centers()
    X, Y = np.meshgrid(xs, ys)
    Z = np.stack([X, Y], axis=-1)
    D = fmap.forward(Z) - Z
    dx, dy = D[..., 0], D[..., 1]
    ny, nx = region.cells.shape
    for i, j in zip(rows, cols):
        i0, i1 = max(0, i - 1), min(ny, i + 2)
        j0, j1 = max(0, j - 1), min(nx, j + 2)
        bx = dx[i0:i1, j0:j1]
        by = dy[i0:i1, j0:j1]
        if _sign_change(bx) and _sign_change(by):
            center = np.array([xs[j], ys[i]])
            pt = _refine_fixed_point(fmap, center, 1.5 * spec.cell, tol)
            if pt is not None:
                return pt
    return None


def _refine_fixed_point(fmap, center, radius, tol, max_iter=80):
    c = np.asarray(center, dtype=float)
    r = float(radius)
    for _ in range(max_iter):
        g = np.linspace(-r, r, 5)
        GX, GY = np.meshgrid(c[0] + g, c[1] + g)
        Z = np.stack([GX, GY], axis=-1)
        D = fmap.forward(Z) - Z
        norms = np.sqrt((D ** 2).sum(-1))
        i, j = np.unravel_index(np.argmin(norms), norms.shape)
        c = np.array([GX[i, j], GY[i, j]])
        if norms[i, j] <= tol:
            return c
        r *= 0.5
        if r < 1e-14:
            break
    d = fmap.forward(c) - c
    return c if float(np.sqrt((d ** 2).sum())) <= tol else None
