"""Constructors for the explicit example objects.

Product and skew-product maps over irrational rotations, the hyperbola-spike
and spiral-generator continua, and the four-zone family f built from a
Denjoy circle map and a rigid translation speed alpha.

Raster realizations of accumulation: two distinct points of a continuum
closer than one cell are 8-adjacent, so where a curve accumulates on another
set the truncated raster attaches to it by adjacency.  The hyperbola branch
is truncated at y_cut = sqrt(2/res) (below which neighbouring turns are
raster-indistinguishable) and joined to the core row by a one-cell drop;
the spiral's two curve ends attach to their accumulation points on the
vertical bars.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (ValidationError, WindowTooSmall, ZoneDiscontinuity,
                     InjectivityViolation)
from .grid import GridSpec, RasterSet
from .circle import CircleLift
from .torus import LiftedPlaneMap
from .strips import StripRaster
from . import semiconj


# -- product and skew families ------------------------------------------


def product_example(rho1, alpha_profile=None):
    """Rigid horizontal translation (x+rho1, y) together with its sheared
    semiconjugacy h(x,y) = x + alpha(y) (alpha a 1-periodic real lift of a
    circle-valued profile; None means alpha = 0, the angular projection)."""
    alpha = alpha_profile or (lambda y: np.zeros_like(np.asarray(y, dtype=float)))

    def fwd(z):
        z = np.asarray(z, dtype=float)
        return np.stack([z[..., 0] + rho1, z[..., 1]], axis=-1)

    def inv(z):
        z = np.asarray(z, dtype=float)
        return np.stack([z[..., 0] - rho1, z[..., 1]], axis=-1)

    fmap = LiftedPlaneMap(fwd, inv, torus=True, name="product")

    def evaluate(z):
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return z[:, 0] + np.asarray(alpha(z[:, 1]), dtype=float)

    h = semiconj.SemiconjugacyLift(evaluate=evaluate, rho=rho1, epsilon=0.0,
                                   horizon=(0, 0))
    return fmap, h


def skew_product(rho, q):
    """F(x,y) = (x + rho, y + q(x)) with q a 1-periodic observable."""

    def fwd(z):
        z = np.asarray(z, dtype=float)
        return np.stack([z[..., 0] + rho, z[..., 1] + q(z[..., 0])], axis=-1)

    def inv(z):
        z = np.asarray(z, dtype=float)
        x = z[..., 0] - rho
        return np.stack([x, z[..., 1] - q(x)], axis=-1)

    return LiftedPlaneMap(fwd, inv, torus=True, name="skew")


# -- raster curve helper -------------------------------------------------


def _mark_polyline(mask, spec, pts):
    """Mark all cells along a polyline (dense sub-cell sampling)."""
    pts = np.asarray(pts, dtype=float)
    step = 0.25 * spec.cell
    for a, b in zip(pts[:-1], pts[1:]):
        n = max(2, int(np.ceil(np.hypot(*(b - a)) / step)) + 1)
        xs = np.linspace(a[0], b[0], n)
        ys = np.linspace(a[1], b[1], n)
        rows, cols = spec.index_of(xs, ys)
        ok = (rows >= 0) & (xs >= 0) & (xs < spec.x_period)
        mask[rows[ok], cols[ok]] = True


def _row_mask(spec, y=0.0):
    mask = np.zeros((spec.ny, spec.nx), dtype=bool)
    i = int(round((y - spec.y_min) * spec.resolution))
    mask[i, :] = True
    return mask


# -- hyperbola-spike continuum -------------------------------------------


def hyperbola_truncation_height(spec):
    """Sheets are cut where the vertical gap between consecutive turns
    (~y^2) shrinks to 3 cells; below that the raster would falsely fuse
    disjoint turns and seal the complement away from the line."""
    return np.sqrt(3.0 / spec.resolution)


def hyperbola_spike_continuum(spec):
    """The line y = 0 plus all integer translates of the hyperbola branch
    {(x, 1/x) : x >= 1}, clipped to the window.

    Each branch sheet is drawn down to the truncation height.  The raster is
    deliberately left disconnected: the branch joins the line only through
    x -> +infinity, outside every finite window, and that absence of any
    local connection is exactly what the generator analysis must see.  With
    the 3-cell truncation rule the complement still weaves down between the
    turns at every column, so the core formula recovers the line.
    """
    if spec.y_min > -0.2 + 1e-9 or spec.y_max < 1.2 - 1e-9:
        raise WindowTooSmall("window must contain y in [-0.2, 1.2]")
    y_cut = hyperbola_truncation_height(spec)
    x_reach = 1.0 / y_cut
    # the complement reaches below the turns only by following the channel
    # between two consecutive turns out to its truncation end -- a run of
    # ~1/y_cut; a shorter window keeps the region above the line sealed
    need = max(3, int(np.ceil(x_reach)) + 2)
    if spec.x_period < need:
        raise WindowTooSmall(
            f"resolution {spec.resolution} needs x_period >= {need} here")
    mask = _row_mask(spec, 0.0)
    for n in range(-int(np.ceil(x_reach)) - 1, spec.x_period):
        # sheet n: y = 1/(x-n) for x in [n+1, n+x_reach]
        xs = np.arange(n + 1.0, n + x_reach, 0.25 * spec.cell)
        ys = 1.0 / (xs - n)
        keep = (xs >= 0) & (xs < spec.x_period)
        rows, cols = spec.index_of(xs[keep], ys[keep])
        mask[rows, cols] = True
    return StripRaster(RasterSet(spec, mask))


def hyperbola_sheet_count(spec):
    """Independent geometric oracle: number of branch sheets whose drawn
    segment (x in [n+1, n+1/y_cut]) meets the window."""
    x_reach = 1.0 / hyperbola_truncation_height(spec)
    count = 0
    for n in range(-int(np.ceil(x_reach)) - 1, spec.x_period):
        lo, hi = n + 1.0, n + x_reach
        if hi > 0 and lo < spec.x_period:
            count += 1
    return count


# -- spiral generator continuum ------------------------------------------

_WALL_TOP = 0.92
_JOG_Y = 0.85
_D1 = 0.35


def _spiral_insets(spec, n_turns):
    """Inset schedule d_k ~ d1/k, capped so consecutive coils stay >= 2.5
    cells apart at this resolution; an odd number of passes >= 3."""
    h_min = 2.5 * spec.cell
    d = [_D1]
    while len(d) < n_turns:
        k = len(d) + 1
        nxt = _D1 / k
        if d[-1] - nxt < h_min:
            break
        d.append(nxt)
    if len(d) % 2 == 0:
        d.pop()
    if len(d) < 3:
        # resolution too coarse for the harmonic schedule; fall back to the
        # tightest admissible 3-pass nest
        d = [_D1, _D1 - max(h_min, _D1 / 3), _D1 - 2 * max(h_min, _D1 / 3)]
    return d


def _spiral_polyline(spec, n_turns):
    """gamma for the fundamental domain [0,1], as a single polyline in local
    coordinates.  Alternating U-passes at decreasing insets, joined by short
    jogs at height _JOG_Y; the free ends extend to one cell from the walls
    x=0 (outer end, accumulation point x0) and x=1 (inner end, x1)."""
    d = _spiral_insets(spec, n_turns)
    eps = 1.5 * spec.cell
    pts = [(eps, _JOG_Y)]  # adjacent to the left wall: outer attachment
    direction = +1  # +1: left-to-right pass
    for k, dk in enumerate(d):
        if direction > 0:
            pts += [(dk, _JOG_Y), (dk, dk), (1 - dk, dk), (1 - dk, _JOG_Y)]
        else:
            pts += [(1 - dk, _JOG_Y), (1 - dk, dk), (dk, dk), (dk, _JOG_Y)]
        direction = -direction
    # odd number of passes ends at the right top; extend to the right wall
    pts.append((1 - eps, _JOG_Y))
    return np.asarray(pts, dtype=float)


def spiral_generator_continuum(spec, n_turns=5):
    """Union over integer translates of K u gamma: K = two unit vertical
    bars J, T(J) joined by the base segment I, and gamma a truncated spiral
    nested inside the bars, approaching K within ~1/k on its k-th pass, its
    ends attached (by 1-cell adjacency) at the accumulation points on J and
    on T(J)."""
    if spec.x_period < 3:
        raise ValidationError("need at least 3 fundamental domains")
    if spec.y_min > -0.2 + 1e-9 or spec.y_max < 1.1 - 1e-9:
        raise WindowTooSmall("window must contain y in [-0.2, 1.1]")
    if n_turns < 3:
        raise ValidationError("n_turns must be at least 3")
    mask = _row_mask(spec, 0.0)
    gamma = _spiral_polyline(spec, n_turns)
    for p in range(-1, spec.x_period + 1):
        _mark_polyline(mask, spec, [(p, 0.0), (p, _WALL_TOP)])
        _mark_polyline(mask, spec, gamma + np.array([p, 0.0]))
    return StripRaster(RasterSet(spec, mask))


def spiral_kernel_diameter(spec, n_turns=5):
    """diam(K u gamma_truncated) for one fundamental domain (oracle for the
    generator-diameter check)."""
    gamma = _spiral_polyline(spec, n_turns)
    pts = np.vstack([gamma,
                     [[0, 0], [1, 0], [0, _WALL_TOP], [1, _WALL_TOP]]])
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


# -- the four-zone family ------------------------------------------------


@dataclass
class LeafChart:
    """Leaves L_p = {(x, 1/(x-p)) : x > p} foliating the upper half plane."""
    p: float

    def y_of_x(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 / (x - self.p)

    @staticmethod
    def parameter(x, y):
        """p(x, y) = x - 1/y, the leaf through (x, y), y > 0."""
        return np.asarray(x, dtype=float) - 1.0 / np.asarray(y, dtype=float)


def _linear_s(y0):
    def s(y):
        return (2.0 / 3.0 - np.asarray(y, dtype=float)) / (2.0 / 3.0 - y0)
    return s


def _steep_s(y0):
    def s(y):
        t = (2.0 / 3.0 - np.asarray(y, dtype=float)) / (2.0 / 3.0 - y0)
        return t ** 2
    return s


@dataclass
class FgAlphaParams:
    g: CircleLift
    alpha: float
    y0: float = None
    s: callable = None
    gaps: object = None  # GapSystem of g, used to raster the leaves over
    #                      the nonwandering set and to seed leaf orbits

    def __post_init__(self):
        vmin, vmax = self.g.displacement_range()
        if self.y0 is None:
            # image of the y0 line under the closed-form lower-zone map must
            # stay in (0, 1/3]:  1/y0 >= 3 + max(0, v - alpha)
            self.y0 = min(0.2, 1.0 / (3.0 + max(0.0, vmax - self.alpha)))
        if not 0 < self.y0 <= 1.0 / 3.0:
            raise ValidationError("y0 must lie in (0, 1/3]")
        if self.s is None:
            self.s = _linear_s(self.y0)
        sv = self.s(np.array([self.y0, 2.0 / 3.0]))
        if abs(sv[0] - 1.0) > 1e-9 or abs(sv[1]) > 1e-9:
            raise ValidationError("profile must satisfy s(y0)=1, s(2/3)=0")
        ys = np.linspace(self.y0, 2.0 / 3.0, 100)
        if np.any(np.diff(self.s(ys)) >= 0):
            raise ValidationError("profile must be strictly decreasing")
        # y0 invariant, verified numerically
        xs = np.linspace(0.0, 1.0, 1000, endpoint=False)
        p = LeafChart.parameter(xs, self.y0)
        y_img = 1.0 / ((xs + self.alpha) - self.g(p))
        if np.any(y_img <= 0) or np.any(y_img > 1.0 / 3.0 + 1e-12):
            raise ValidationError("F2 image of the y0 line leaves (0, 1/3]")


@dataclass
class FgAlphaReport:
    retried_s: bool = False


def _fga_forward(params):
    g, alpha, y0, s = params.g, params.alpha, params.y0, params.s

    def fwd(z):
        z = np.asarray(z, dtype=float)
        x, y = z[..., 0], z[..., 1]
        out_x = np.empty_like(x)
        out_y = np.empty_like(y)
        # rigid zone y <= 0
        low = y <= 0
        out_x[low] = x[low] + alpha
        out_y[low] = y[low]
        pos = ~low
        if pos.any():
            xp, yp = x[pos], y[pos]
            p = xp - 1.0 / yp
            gp = np.asarray(g(p), dtype=float)
            v = gp - p
            top = yp >= 2.0 / 3.0
            mid = (yp >= y0) & ~top
            bot = ~top & ~mid
            ox = np.empty_like(xp)
            oy = np.empty_like(yp)
            # F1: slide along the horizontal, leaf p -> leaf G(p)
            ox[top] = xp[top] + v[top]
            oy[top] = yp[top]
            # W: on leaf L_{G(p)} at interpolated horizontal coordinate
            sv = np.asarray(s(yp[mid]), dtype=float)
            X = xp[mid] + v[mid] + sv * (alpha - v[mid])
            denom = X - gp[mid]
            ox[mid] = X
            oy[mid] = 1.0 / denom
            # F2 closed form
            denom2 = (xp[bot] + alpha) - gp[bot]
            if np.any(denom2 <= 0):
                raise ValidationError("closed-form lower zone needs x+alpha > G(p)")
            ox[bot] = xp[bot] + alpha
            oy[bot] = 1.0 / denom2
            out_x[pos] = ox
            out_y[pos] = oy
        return np.stack([out_x, out_y], axis=-1)

    return fwd


def _zone_defect(fwd, y0, n=1000):
    """Worst mismatch of the zone formulas on their shared boundaries."""
    xs = np.linspace(0.0, 3.0, n)
    worst = 0.0
    for yb in (2.0 / 3.0, y0):
        below = fwd(np.stack([xs, np.full(n, yb - 1e-9)], axis=-1))
        above = fwd(np.stack([xs, np.full(n, yb + 1e-9)], axis=-1))
        worst = max(worst, float(np.max(np.abs(below - above))))
    # toward y -> 0+ the first coordinate must glue to the rigid zone
    tiny = fwd(np.stack([xs, np.full(n, 1e-9)], axis=-1))
    rigid = fwd(np.stack([xs, np.full(n, -1e-9)], axis=-1))
    worst = max(worst, float(np.max(np.abs(tiny[:, 0] - rigid[:, 0]))))
    return worst


def _check_leaf_monotone(params, fwd, n_leaves=100):
    """y -> pi2(W) must be strictly monotone along each leaf in the glue zone."""
    ys = np.linspace(params.y0, 2.0 / 3.0, 200)
    for p in np.linspace(0.0, 1.0, n_leaves, endpoint=False):
        xs = p + 1.0 / ys
        img = fwd(np.stack([xs, ys], axis=-1))
        if np.any(np.diff(img[:, 1]) <= 0):
            return False
    return True


def fga_raster(params, spec):
    """A = row R0 union the leaves over the nonwandering set Omega(g),
    clipped to y <= 1.  Closed-cell rasterization: a cell is occupied when
    the leaf bundle over Omega(g) meets its rectangle (near y = 0 the bundle
    is denser than a cell, so the raster attaches to the row there)."""
    gaps = params.gaps
    glo = np.sort(gaps.lefts)
    ghi = gaps.rights[np.argsort(gaps.lefts)]
    mask = _row_mask(spec, 0.0)
    cell = spec.cell
    ys = spec.y_centers()
    xs = spec.x_centers()
    for i, y in enumerate(ys):
        y_lo, y_hi = y - cell / 2, y + cell / 2
        if y_hi <= 0 or y_lo >= 1.0:
            continue
        y_lo = max(y_lo, cell / 4)
        # p across the cell: increasing in both x and y
        p_lo = (xs - cell / 2) - 1.0 / y_lo
        p_hi = (xs + cell / 2) - 1.0 / min(y_hi, 1.0)
        width = p_hi - p_lo
        # interval misses Omega iff it sits inside a single gap
        a = np.mod(p_lo, 1.0)
        k = np.searchsorted(glo, a) - 1
        inside = np.zeros(len(xs), dtype=bool)
        valid = k >= 0
        kk = np.clip(k, 0, len(glo) - 1)
        inside[valid] = (a[valid] > glo[kk[valid]]) & \
                        (a[valid] + width[valid] < ghi[kk[valid]])
        mask[i, :] |= ~inside & (width < 1.0) | (width >= 1.0)
    return StripRaster(RasterSet(spec, mask))


def fga_seeds(params, spec=None, n_row=50, n_leaf=150, rng=None):
    """Seed points on A: row points plus points on leaves over Omega(g)."""
    rng = rng or np.random.default_rng(7)
    gaps = params.gaps
    xs_row = np.linspace(0.05, 2.95, n_row)
    row = np.stack([xs_row, np.zeros(n_row)], axis=-1)
    # leaf parameters: gap endpoints lie in Omega(g)
    ps = np.concatenate([gaps.lefts, gaps.rights])
    ps = rng.choice(ps, size=n_leaf, replace=True)
    ys = rng.uniform(0.15, 1.0, n_leaf)
    leaf = np.stack([ps + 1.0 / ys, ys], axis=-1)
    return np.vstack([row, leaf])


def f_g_alpha(params, grid=None):
    """Assemble the four-zone map, its invariant continuum raster A and the
    core row.  Returns (LiftedPlaneMap, A: StripRaster, core: StripRaster);
    the retry report is attached as map.report."""
    if params.gaps is None:
        raise ValidationError(
            "params.gaps (the GapSystem of g) is required to build the raster")
    fwd = _fga_forward(params)
    defect = _zone_defect(fwd, params.y0)
    if defect > 1e-6:
        raise ZoneDiscontinuity(f"zone formulas mismatch by {defect}")
    report = FgAlphaReport()
    if not _check_leaf_monotone(params, fwd):
        report.retried_s = True
        params = FgAlphaParams(params.g, params.alpha, params.y0,
                               _steep_s(params.y0), params.gaps)
        fwd = _fga_forward(params)
        if not _check_leaf_monotone(params, fwd):
            raise InjectivityViolation("glue zone not monotone along leaves")
    fmap = LiftedPlaneMap(fwd, None, torus=False, name="fga")
    fmap.report = report
    grid = grid or GridSpec(128, 3, -0.5, 1.5)
    A = fga_raster(params, grid)
    core = StripRaster(RasterSet(grid, _row_mask(grid, 0.0)))
    return fmap, A, core
