"""Circle homeomorphism lifts, rotation numbers and Denjoy counterexamples.

Lifts are piecewise linear, given by breakpoints in [0,1) and their values;
G(x+1) = G(x)+1 by construction.  The Denjoy construction inserts wandering
gaps along the orbit of an irrational rotation and transports them affinely,
producing a homeomorphism without periodic points whose nonwandering set
misses every gap interior.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, RationalRho, TooManyGaps, NonFinite
from .grid import GridSpec, RasterSet


@dataclass
class CircleLift:
    """Monotone degree-one piecewise-linear lift."""
    breakpoints: np.ndarray     # sorted, in [0, 1)
    values: np.ndarray          # G(breakpoints), strictly increasing

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.shape != v.shape or b.size < 1:
            raise ValidationError("breakpoints/values must be matching 1-d arrays")
        if b[0] < 0 or b[-1] >= 1 or np.any(np.diff(b) <= 0):
            raise ValidationError("breakpoints must be strictly increasing in [0,1)")
        if np.any(np.diff(v) <= 0):
            raise ValidationError("lift values must be strictly increasing")
        if v[-1] >= v[0] + 1:
            raise ValidationError("lift values must increase by less than 1 over one period")
        self.breakpoints = b
        self.values = v
        self._bx = np.concatenate([b, [b[0] + 1.0]])
        self._bv = np.concatenate([v, [v[0] + 1.0]])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.floor(x - self.breakpoints[0])
        xr = x - k  # in [b0, b0+1)
        out = np.interp(xr, self._bx, self._bv) + k
        return out if out.ndim else float(out)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        k = np.floor(y - self.values[0])
        # land in [v0, v0+1) up to float fuzz, then clamp into the table
        yr = np.clip(y - k, self._bv[0], self._bv[-1])
        out = np.interp(yr, self._bv, self._bx) + k
        return out if out.ndim else float(out)

    @classmethod
    def rigid(cls, rho):
        return cls(np.array([0.0, 0.5]), np.array([rho, 0.5 + rho]))

    @classmethod
    def from_function(cls, fn, n_breakpoints=2048):
        """Sample a lift formula on an even grid.  fn must be a strictly
        monotone degree-one lift; sampling preserves values at grid points."""
        b = np.arange(n_breakpoints) / n_breakpoints
        v = np.asarray(fn(b), dtype=float)
        return cls(b, v)

    def displacement_range(self, n_samples=4096):
        x = np.arange(n_samples) / n_samples
        d = self(x) - x
        return float(d.min()), float(d.max())


@dataclass
class Estimate:
    value: float
    error_bound: float


def rotation_number(lift, x0=0.0, n=100_000):
    """(G^n(x0) - x0)/n with the a-priori error bound 1/n."""
    if n < 1:
        raise ValidationError("need at least one iterate")
    x = float(x0)
    bx, bv, b0 = lift._bx, lift._bv, lift.breakpoints[0]
    for _ in range(n):
        k = np.floor(x - b0)
        x = np.interp(x - k, bx, bv) + k
    if not np.isfinite(x):
        raise NonFinite("orbit left finite floats")
    return Estimate((x - x0) / n, 1.0 / n)


@dataclass
class GapSystem:
    """Wandering gaps of a Denjoy map, in circle coordinates.

    Gap n (|n| <= n_gaps) is the open interval (left[n], right[n]) inserted at
    the rotation orbit point frac(n*rho).  The constructed lift maps gap n
    affinely onto gap n+1 whenever both exist.
    """
    rho: float
    indices: np.ndarray
    lefts: np.ndarray
    rights: np.ndarray

    def gap(self, n):
        i = int(np.searchsorted(self.indices, n))
        if i >= len(self.indices) or self.indices[i] != n:
            raise ValidationError(f"no gap with index {n}")
        return float(self.lefts[i]), float(self.rights[i])

    @property
    def total_mass(self):
        return float(np.sum(self.rights - self.lefts))

    def locate(self, x):
        """Index of the gap containing circle point x, or None."""
        xf = x % 1.0
        order = np.argsort(self.lefts)
        lo = self.lefts[order]
        hi = self.rights[order]
        i = np.searchsorted(lo, xf) - 1
        if i >= 0 and lo[i] < xf < hi[i]:
            return int(self.indices[order][i])
        return None

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("n,left,right\n")
            for n, a, b in zip(self.indices, self.lefts, self.rights):
                fh.write(f"{n},{float(a)!r},{float(b)!r}\n")

    @classmethod
    def from_csv(cls, path, rho):
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(rho, rows[:, 0].astype(int), rows[:, 1], rows[:, 2])


def check_irrational(rho, max_q=100, tol=1e-9):
    for q in range(1, max_q + 1):
        if abs(rho * q - round(rho * q)) < tol * q:
            raise RationalRho(f"rho within {tol} of {round(rho*q)}/{q}")


def denjoy_map(rho, n_gaps=200, gap_mass=0.5):
    """Piecewise-linear Denjoy counterexample.

    Gap lengths c/(|n|+2)^2 are normalized to total gap_mass and inserted at
    the rotation orbit points frac(n*rho), n in [-n_gaps, n_gaps], by the
    order-preserving stretch Phi(t) = (1-mass) t + sum of gaps left of t.
    Breakpoint constraints send gap n onto gap n+1 (n < n_gaps); elsewhere
    the lift is the monotone PL interpolation.
    Returns (CircleLift, GapSystem).
    """
    check_irrational(rho)
    if not 0 < gap_mass < 1:
        raise ValidationError("gap_mass must lie in (0,1)")
    if n_gaps < 1:
        raise ValidationError("need at least one gap index on each side")
    ns = np.arange(-n_gaps, n_gaps + 1)
    raw = 1.0 / (np.abs(ns) + 2.0) ** 2
    lengths = gap_mass * raw / raw.sum()
    t = np.mod(ns * rho, 1.0)
    order = np.argsort(t)
    if np.min(np.diff(t[order])) < 1e-12:
        raise TooManyGaps("orbit points collide; gaps cannot stay disjoint")
    # left endpoint of gap n: (1-mass) t_n + total length of gaps inserted before it
    csum = np.zeros_like(t)
    csum[order] = np.concatenate([[0.0], np.cumsum(lengths[order])[:-1]])
    lefts = (1.0 - gap_mass) * t + csum
    rights = lefts + lengths
    gaps = GapSystem(rho, ns, lefts, rights)

    # lift constraints: endpoints of gap n |-> endpoints of gap n+1,
    # lifted by the integer carried by the rotation orbit
    pos = {int(n): i for i, n in enumerate(ns)}
    bps, vals = [], []
    for n in ns[:-1]:
        i, j = pos[n], pos[n + 1]
        carry = np.floor(t[i] + rho)  # 0 or 1
        bps.extend([lefts[i], rights[i]])
        vals.extend([lefts[j] + carry, rights[j] + carry])
    bps = np.asarray(bps)
    vals = np.asarray(vals)
    srt = np.argsort(bps)
    bps, vals = bps[srt], vals[srt]
    # the value sequence must be circularly increasing; rotate the value
    # column so it increases within [v_min, v_min+1)
    vals = np.where(vals < vals[0], vals + 1.0, vals)
    vals -= np.floor(vals[0])  # normalize near [0,2)
    if np.any(np.diff(bps) <= 0) or np.any(np.diff(vals) <= 0):
        raise TooManyGaps("gap endpoint constraints are not monotone")
    return CircleLift(bps, vals), gaps


def nonwandering_raster(gaps, resolution=4096):
    """One-row RasterSet over the circle: a cell is occupied when its center
    avoids every represented gap (cell-center sampling)."""
    spec = GridSpec(resolution, 1, 0.0, 1.0 / resolution)
    x = spec.x_centers()
    occupied = np.ones(resolution, dtype=bool)
    for a, b in zip(gaps.lefts, gaps.rights):
        occupied &= ~((x > a) & (x < b))
    return RasterSet(spec, occupied[None, :])


def orbit_to_csv(path, xs, ys=None):
    """k,x[,y] orbit log."""
    xs = np.asarray(xs, dtype=float)
    with open(path, "w") as fh:
        if ys is None:
            fh.write("k,x\n")
            for k, x in enumerate(xs):
                fh.write(f"{k},{float(x)!r}\n")
        else:
            fh.write("k,x,y\n")
            for k, (x, y) in enumerate(zip(xs, ys)):
                fh.write(f"{k},{float(x)!r},{float(y)!r}\n")


def lift_to_csv(lift, path):
    with open(path, "w") as fh:
        fh.write("x,Gx\n")
        for x, v in zip(lift.breakpoints, lift.values):
            fh.write(f"{float(x)!r},{float(v)!r}\n")
