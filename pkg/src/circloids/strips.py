"""Compact generators, spikes and classification of invariant strips.

A StripRaster is a window of the covering strip (x_period >= 3 fundamental
domains) holding a 1-periodic closed set that separates the window's two y
margins.  Generator candidates are CLOSED column windows (width w spans
w*resolution + 1 columns); with the closed convention the discrete versions
of the adjacent-generator and translate-count inequalities hold (a unit-width
generator of a row has nu = 1, just like its continuum counterpart, a closed
unit interval).

All negative findings here are reported as Inconclusive ("not found at the
widths tried"), never as proofs of nonexistence.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import ValidationError, EmptySet, WindowTooSmall
from .grid import RasterSet
from . import topology as tp

_STRUCT8 = np.ones((3, 3), dtype=bool)


@dataclass
class StripRaster:
    """A periodic separating set on a cover window."""
    raster: RasterSet

    def __post_init__(self):
        rs = self.raster
        if rs.spec.x_period < 3:
            raise ValidationError("strip windows need at least 3 fundamental domains")
        tp.margin_guard(rs)
        # 1-periodic occupancy: shifting by one period reproduces the mask
        # on the overlap
        r = rs.spec.resolution
        if not np.array_equal(rs.cells[:, r:], rs.cells[:, :-r]):
            raise ValidationError("strip content is not x-periodic on the window")
        lab = tp.label_components(~rs.cells, rs.spec, adjacency=4)
        tops = [k for k in range(1, lab.count + 1) if lab.touches_top[k]]
        bots = [k for k in range(1, lab.count + 1) if lab.touches_bottom[k]]
        both = set(tops) & set(bots)
        if both or len(tops) != 1 or len(bots) != 1:
            raise ValidationError("set does not separate the strip into top and bottom")

    @property
    def spec(self):
        return self.raster.spec


def nu(b):
    """Largest n >= 1 with b meeting its n-period translate; 0 if none."""
    cells = b.cells
    r = b.spec.resolution
    n = 0
    k = 1
    while k * r < b.spec.nx:
        shifted = np.zeros_like(cells)
        shifted[:, k * r:] = cells[:, :-k * r]
        if (cells & shifted).any():
            n = k
        k += 1
    return n


def _diameter(raster):
    pts = raster.occupied_centers()
    # max pairwise distance; fine at these cell counts via hull shortcut
    from scipy.spatial import ConvexHull
    if len(pts) > 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except Exception:
            pass
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


@dataclass
class GeneratorReport:
    found: bool
    generator: RasterSet = None
    width: float = 0.0
    offset_col: int = -1
    diameter: float = 0.0
    nu: int = 0
    widths_tried: tuple = ()

    def to_dict(self):
        return {"found": self.found, "width": self.width,
                "diameter": self.diameter, "nu": self.nu,
                "widths_tried": list(self.widths_tried)}


def _class_projection(cells, r):
    """Fold columns modulo one period: (ny, r) mask of occupied classes."""
    ny, nx = cells.shape
    pad = (-nx) % r
    if pad:
        cells = np.concatenate([cells, np.zeros((ny, pad), bool)], axis=1)
    return cells.reshape(ny, -1, r).any(axis=1)


def find_generator(strip, max_width=4.0, width_step=0.5):
    """Scan closed column windows of width 1, 1.5, ... <= max_width over all
    grid offsets for a connected candidate whose integer translates cover the
    strip.  Returns the first hit (smallest width, then smallest offset); a
    miss is only 'not found at these widths'."""
    rs = strip.raster
    r = rs.spec.resolution
    nx = rs.spec.nx
    cells = rs.cells
    strip_classes = _class_projection(cells, r)
    widths = []
    w = 1.0
    while w <= max_width + 1e-9:
        widths.append(round(w, 6))
        w += width_step
    ny = cells.shape[0]
    for w in widths:
        ncols = int(round(w * r)) + 1  # closed window
        if ncols > nx:
            break
        for j0 in range(0, nx - ncols + 1):
            window = cells[:, j0:j0 + ncols]
            if not window.any():
                continue
            # fold at the window's phase so classes line up with the strip's
            phase = j0 % r
            padded = np.concatenate(
                [np.zeros((ny, phase), bool), window], axis=1)
            if not np.array_equal(_class_projection(padded, r), strip_classes):
                continue
            _, ncomp = ndimage.label(window, structure=_STRUCT8)
            if ncomp != 1:
                continue
            cand = np.zeros_like(cells)
            cand[:, j0:j0 + ncols] = window
            g = RasterSet(rs.spec, cand)
            return GeneratorReport(True, g, w, j0, _diameter(g), nu(g), tuple(widths))
    return GeneratorReport(False, widths_tried=tuple(widths))


def adjacent_generator_check(report):
    """A found generator must meet its one-period translate (discrete
    version of the adjacent-translate lemma)."""
    if not report.found:
        raise ValidationError("no generator to check")
    g = report.generator
    r = g.spec.resolution
    shifted = np.zeros_like(g.cells)
    shifted[:, r:] = g.cells[:, :-r]
    return bool((g.cells & shifted).any())


def translate_intersection_count(image, g2):
    """Number of integer translates of g2 met by the image raster."""
    if image.spec != g2.spec:
        raise ValidationError("rasters live on different grids")
    if image.is_empty() or g2.is_empty():
        raise EmptySet("empty raster in translate count")
    r = image.spec.resolution
    nx = image.spec.nx
    count = 0
    for k in range(-(nx // r), nx // r + 1):
        s = k * r
        shifted = np.zeros_like(g2.cells)
        if s >= 0:
            if s < nx:
                shifted[:, s:] = g2.cells[:, :nx - s]
        else:
            if -s < nx:
                shifted[:, :s] = g2.cells[:, -s:]
        if (image.cells & shifted).any():
            count += 1
    return count


def map_raster(fmap, raster, out_spec=None):
    """Raster of the forward image of the occupied cell centers."""
    pts = raster.occupied_centers()
    img = fmap.forward(pts)
    return RasterSet.from_points(out_spec or raster.spec, img[:, 0], img[:, 1])


@dataclass
class Spike:
    component: RasterSet
    width: float
    possibly_infinite: bool

    def to_dict(self):
        return {"width": self.width, "possibly_infinite": self.possibly_infinite}


def spikes(strip, core=None):
    """Components of strip minus its core circloid, counted modulo the deck
    translation (components of the one-period projection, which also rejoins
    spike pieces the window clipped apart).  Each spike is reported with the
    horizontal extent of its preimage in the window; possibly_infinite is a
    window-width heuristic (the true extent is clipped), a lower-bound
    certificate only."""
    from .grid import GridSpec
    rs = strip.raster
    core = core or tp.core_circloid(rs)
    leftover = rs.cells & ~core.cells
    if not leftover.any():
        return core, []
    r = rs.spec.resolution
    folded = _class_projection(leftover, r)
    wrap_spec = GridSpec(r, 1, rs.spec.y_min, rs.spec.y_max)
    lab = tp.label_components(folded, wrap_spec, adjacency=8)
    window_w = float(rs.spec.x_period)
    out = []
    for k in range(1, lab.count + 1):
        tiled = np.tile(lab.labels == k, (1, rs.spec.x_period))[:, :rs.spec.nx]
        comp = RasterSet(rs.spec, leftover & tiled)
        x0, x1 = comp.x_extent()
        width = x1 - x0
        out.append(Spike(comp, width,
                         width >= window_w - 2 * rs.spec.cell))
    out.sort(key=lambda s: -s.width)
    return core, out


class GenClass(Enum):
    COMPACTLY_GENERATED = "CompactlyGenerated"
    CORE_GENERATED_INFINITE_SPIKE = "CoreGeneratedInfiniteSpike"
    CORE_NOT_GENERATED = "CoreNotGenerated?"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Classification:
    verdict: GenClass
    strip_report: GeneratorReport
    core_report: GeneratorReport
    spike_list: list
    has_infinite_spike: bool

    def to_dict(self):
        return {"verdict": self.verdict.value,
                "strip_generator": self.strip_report.to_dict(),
                "core_generator": self.core_report.to_dict(),
                "spikes": [s.to_dict() for s in self.spike_list],
                "has_infinite_spike": self.has_infinite_spike}


def classify(strip, max_width=4.0):
    """Trichotomy: strip compactly generated / core generated but an
    unbounded spike prevents the strip from being so / neither found.
    Negative generator searches are width-limited, hence the question marks.
    """
    rs = strip.raster
    core = tp.core_circloid(rs)
    core_strip = StripRaster(core)
    strip_rep = find_generator(strip, max_width)
    core_rep = find_generator(core_strip, max_width)
    if strip_rep.found and not core_rep.found:
        # a generated strip has a generated core (its core intersected with
        # the window generates); widths tried must have been too small
        raise ValidationError(
            "inconsistent search: strip generator found but core generator missed")
    _, spike_list = spikes(strip, core)
    infinite = any(s.possibly_infinite for s in spike_list)
    if strip_rep.found:
        verdict = GenClass.COMPACTLY_GENERATED
    elif core_rep.found and infinite:
        verdict = GenClass.CORE_GENERATED_INFINITE_SPIKE
    elif core_rep.found:
        verdict = GenClass.INCONCLUSIVE
    else:
        verdict = GenClass.CORE_NOT_GENERATED
    return Classification(verdict, strip_rep, core_rep, spike_list, infinite)
