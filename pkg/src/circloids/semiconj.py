"""Semiconjugacies onto irrational circle rotations.

Given a wandering family of essential continua C_{n,m} = T^m(F^n(C_00))
whose circular order matches the order of {n*rho + m mod 1}, the lift

    H(z) = sup { n*rho + m : z in U+(C_{n,m}) }

(truncated to a finite horizon) descends to a semiconjugacy onto the rigid
rotation by rho.  The truncation error is exactly the mesh of the sampled
rotation orbit, reported as epsilon so callers can budget tolerances.

Internal orientation: continua wind in x (the grid's periodic axis) and are
stacked along y, with the deck translation T = (0, 1).  Families given with
the roles of the axes swapped (vertical circles stacked along x, as in the
classical Poincare picture of a Denjoy map) are normalized on entry via the
axis adaptor.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (ValidationError, WindowTooSmall, Overlap,
                     OrderViolation, NonFinite)
from .grid import GridSpec, RasterSet
from .topology import upper_component, lower_component


def _swap_map(fn):
    if fn is None:
        return None

    def swapped(z):
        z = np.asarray(z, dtype=float)
        out = np.asarray(fn(z[..., ::-1]), dtype=float)
        return out[..., ::-1]

    return swapped


def rotation_mesh(rho, n_lo, n_hi):
    """Max gap of {frac(n*rho)} for n in [n_lo, n_hi] on the circle."""
    pts = np.sort(np.mod(np.arange(n_lo, n_hi + 1) * rho, 1.0))
    gaps = np.diff(np.concatenate([pts, [pts[0] + 1.0]]))
    return float(gaps.max())


@dataclass
class _Layer:
    """One dynamical index n of the family, normalized to the base window."""
    shift: int            # integer s_n with C_{n,0} = mask + (0, s_n)
    upper: np.ndarray     # U+(mask) cell mask
    lower: np.ndarray     # U-(mask) cell mask
    y_lo: float           # real y extent of mask
    y_hi: float


class CircloidOrbitFamily:
    """The rasters C_{n,m} = T^m(F^n(base)), with T = one period along the
    stacking axis.  `angular_axis` names the axis the continua wind around:
    "x" (already in internal orientation) or "y" (vertical circles, swapped
    on entry).  Layers are built lazily and memoized; evaluation afterwards
    is pure.
    """

    def __init__(self, base, fmap, rho, n_range, m_range=1, angular_axis="x",
                 subsample=3):
        if angular_axis not in ("x", "y"):
            raise ValidationError("angular_axis must be 'x' or 'y'")
        self.native_axis = angular_axis
        self.rho = float(rho)
        self.n_range = (int(n_range[0]), int(n_range[1])) \
            if not np.isscalar(n_range) else (-int(n_range), int(n_range))
        self.m_range = int(m_range)
        if self.n_range[0] > 0 or self.n_range[1] < 0:
            raise ValidationError("n_range must contain 0")
        self.subsample = int(subsample)
        if angular_axis == "y":
            if abs(base.spec.y_min) > 1e-12:
                raise ValidationError(
                    "vertical families need a y window starting at 0 (the "
                    "axis adaptor swaps coordinates without an offset)")
            base = base.swapped_axes()
            self._fwd = _swap_map(fmap.forward)
            self._inv = _swap_map(fmap.inverse)
        else:
            self._fwd = fmap.forward
            self._inv = fmap.inverse
        if not base.spec.wrap_x:
            raise ValidationError(
                "family rasters must live on a one-period (wrapping) window")
        self.base = base
        self.fmap = fmap
        self._layers = {}

    # -- raster generation ------------------------------------------

    def _seed_points(self):
        """Cell centers of the base, refined subsample x subsample per cell."""
        s = self.subsample
        spec = self.base.spec
        rows, cols = np.nonzero(self.base.cells)
        offs = (np.arange(s) + 0.5) / s
        ox, oy = np.meshgrid(offs, offs)
        x = (cols[:, None] + ox.ravel()[None, :]) * spec.cell
        y = spec.y_min + (rows[:, None] + oy.ravel()[None, :]) * spec.cell
        return np.stack([x.ravel(), y.ravel()], axis=-1)

    def _layer(self, n):
        if n in self._layers:
            return self._layers[n]
        spec = self.base.spec
        pts = self._seed_points()
        if n >= 0:
            for _ in range(n):
                pts = self._fwd(pts)
        else:
            if self._inv is None:
                raise ValidationError("negative indices need an inverse map")
            for _ in range(-n):
                pts = self._inv(pts)
        if not np.all(np.isfinite(pts)):
            raise NonFinite(f"family iterate {n} produced non-finite points")
        shift = int(np.floor(np.median(pts[:, 1]) - np.median(
            self.base.occupied_centers()[:, 1]) + 0.5))
        rs = RasterSet.from_points(spec, pts[:, 0], pts[:, 1] - shift,
                                   clip_y=False)
        y_lo, y_hi = rs.y_extent()
        layer = _Layer(shift=shift,
                       upper=upper_component(rs).cells,
                       lower=lower_component(rs).cells,
                       y_lo=y_lo, y_hi=y_hi)
        self._layers[n] = layer
        return layer

    def raster(self, n, m=0):
        """C_{n,m} translated by -layer_shift(n) so it sits in the base
        window; small |m| translates are honoured when they still fit."""
        layer = self._layer(n)
        spec = self.base.spec
        mask = ~(layer.upper | layer.lower)
        if m != 0:
            dr = m * spec.resolution
            rows = np.nonzero(mask.any(axis=1))[0]
            if rows[0] + dr < 2 or rows[-1] + dr > spec.ny - 3:
                raise WindowTooSmall(f"translate m={m} leaves the window")
            out = np.zeros_like(mask)
            if dr > 0:
                out[dr:, :] = mask[:-dr, :]
            else:
                out[:dr, :] = mask[-dr:, :]
            mask = out
        return RasterSet(spec, mask)

    def layer_shift(self, n):
        return self._layer(n).shift

    def indices(self):
        return range(self.n_range[0], self.n_range[1] + 1)


def check_irrational_combinatorics(family):
    """Verify the cyclic order of the projected continua matches the cyclic
    order of {frac(n*rho)}.  The stacking intervals [y_lo, y_hi] + s_n must
    project to pairwise disjoint arcs mod 1 (translates by m land on the
    same arc, so the check ranges over the dynamical index only)."""
    rho = family.rho
    ns = list(family.indices())
    arcs = []
    for n in ns:
        layer = family._layer(n)
        lo = layer.y_lo + layer.shift
        hi = layer.y_hi + layer.shift
        if hi - lo >= 1.0:
            raise Overlap(f"iterate {n} spans a full period")
        arcs.append((np.mod(lo, 1.0), hi - lo, n))
    arcs.sort()
    for (a, w, na), (b, _, nb) in zip(arcs, arcs[1:] + [(arcs[0][0] + 1.0,
                                                         arcs[0][1],
                                                         arcs[0][2])]):
        if a + w > b:
            raise Overlap(f"iterates {na} and {nb} overlap mod 1")
    # cyclic order: sorting by arc position must equal sorting by frac(n rho)
    order_geo = [t[2] for t in arcs]
    order_rho = [n for _, n in sorted((np.mod(n * rho, 1.0), n) for n in ns)]
    i0g = order_geo.index(0)
    i0r = order_rho.index(0)
    cyc_geo = order_geo[i0g:] + order_geo[:i0g]
    cyc_rho = order_rho[i0r:] + order_rho[:i0r]
    if cyc_geo != cyc_rho:
        for i in range(len(ns)):
            if cyc_geo[i] != cyc_rho[i]:
                witness = (cyc_geo[max(0, i - 1)], cyc_geo[i], cyc_rho[i])
                raise OrderViolation(
                    f"cyclic order mismatch at position {i}", witness=witness)
    return {"ok": True, "rho_fit": rho}


@dataclass
class SemiconjugacyLift:
    """Evaluation rule for the truncated lift H, with its error budget.

    `evaluate` maps an (k, 2) array of cover points to H values; `co_evaluate`
    (when present) is the symmetric lower lift used for fibre extraction.
    """
    evaluate: callable
    rho: float
    epsilon: float
    horizon: tuple
    co_evaluate: callable = None
    grid: GridSpec = None
    native_axis: str = "x"

    def __call__(self, z):
        return self.evaluate(z)

    def to_csv(self, samples, path):
        vals = self.evaluate(samples)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "H"])
            for (x, y), h in zip(np.atleast_2d(samples), vals):
                w.writerow([f"{x:.12g}", f"{y:.12g}", f"{h:.12g}"])


def build_semiconjugacy(family):
    """The truncated lift H(z) = max {n*rho + m : z in U+(C_{n,m})} over the
    family's horizon, plus the symmetric lower lift.  Requires the family to
    pass the circular-order check first."""
    check_irrational_combinatorics(family)
    rho = family.rho
    spec = family.base.spec
    layers = {n: family._layer(n) for n in family.indices()}
    swap = family.native_axis == "y"

    def _prep(z):
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if swap:
            z = z[:, ::-1]
        return z

    def _best_k(layer, x, y, want_upper):
        """Largest k with (x, y-k) in U+ (or smallest k with it in U-)."""
        mask = layer.upper if want_upper else layer.lower
        cols = np.mod(np.floor(x * spec.resolution).astype(int), spec.nx)
        span = int(np.ceil(layer.y_hi - layer.y_lo)) + 2
        out = np.empty(len(x), dtype=float)
        done = np.zeros(len(x), dtype=bool)
        if want_upper:
            # largest k with (x, y-k) in U+: start at the lowest candidate
            # inside the band (below the band is a definite no) and move the
            # test point up until membership holds; above the band is a
            # definite yes, so at most `span` candidates need checking
            k0 = np.floor(y - layer.y_lo)
        else:
            # smallest k with (x, y-k) in U-: mirror image
            k0 = np.ceil(y - layer.y_hi)
        step = -1 if want_upper else 1
        for j in range(span + 1):
            k = k0 + step * j
            yy = y - k
            if want_upper:
                definite = yy > layer.y_hi
            else:
                definite = yy < layer.y_lo
            rows = np.clip(np.floor((yy - spec.y_min) * spec.resolution)
                           .astype(int), 0, spec.ny - 1)
            in_band = (yy >= layer.y_lo) & (yy <= layer.y_hi)
            hit = ~done & (definite | (in_band & mask[rows, cols]))
            out[hit] = k[hit]
            done |= hit
            if done.all():
                break
        if not done.all():
            raise NonFinite("membership scan failed to terminate")
        return out

    def evaluate(z):
        z = _prep(z)
        x, y = z[:, 0], z[:, 1]
        best = np.full(len(z), -np.inf)
        for n, layer in layers.items():
            k = _best_k(layer, x, y, want_upper=True)
            best = np.maximum(best, n * rho + (k - layer.shift))
        return best

    def co_evaluate(z):
        z = _prep(z)
        x, y = z[:, 0], z[:, 1]
        best = np.full(len(z), np.inf)
        for n, layer in layers.items():
            k = _best_k(layer, x, y, want_upper=False)
            best = np.minimum(best, n * rho + (k - layer.shift))
        return best

    eps = rotation_mesh(rho, family.n_range[0], family.n_range[1])
    return SemiconjugacyLift(evaluate=evaluate, rho=rho, epsilon=eps,
                             horizon=(family.n_range, family.m_range),
                             co_evaluate=co_evaluate, grid=spec,
                             native_axis=family.native_axis)


def check_semiconjugacy(lift, fmap, rho, samples):
    """max over samples of |H(F(z)) - H(z) - rho|."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    before = lift.evaluate(samples)
    after = lift.evaluate(fmap.forward(samples))
    return float(np.max(np.abs(after - before - rho)))


def defect_report(lift, fmap, samples, path=None):
    rep = {"max_defect": check_semiconjugacy(lift, fmap, lift.rho, samples),
           "epsilon": lift.epsilon,
           "samples": int(np.atleast_2d(samples).shape[0])}
    if path is not None:
        with open(path, "w") as fh:
            json.dump(rep, fh, sort_keys=True)
            fh.write("\n")
    return rep


def modulo_rotation_distance(h1, h2, samples, scan_steps=4096):
    """inf over rigid offsets c of sup over samples of the circle distance
    between h1 and h2 + c."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d = np.mod(np.asarray(h1(samples)) - np.asarray(h2(samples)), 1.0)
    cs = np.arange(scan_steps) / scan_steps
    diff = np.abs(np.mod(d[None, :] - cs[:, None] + 0.5, 1.0) - 0.5)
    return float(diff.max(axis=1).min())


def fibre_raster(lift, xi, grid=None):
    """The fibre band {H <= xi} intersect {lower lift >= xi} as a raster on
    the family grid (in the family's native orientation)."""
    if lift.co_evaluate is None:
        raise ValidationError("fibre extraction needs the lower lift")
    spec = grid or lift.grid
    xs = spec.x_centers()
    ys = spec.y_centers()
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    if lift.native_axis == "y":
        pts = pts[:, ::-1]
    hi = lift.evaluate(pts).reshape(spec.ny, spec.nx)
    lo = lift.co_evaluate(pts).reshape(spec.ny, spec.nx)
    return RasterSet(spec, (hi <= xi) & (lo >= xi))
