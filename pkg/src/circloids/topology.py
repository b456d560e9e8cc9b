"""Digital topology of annular continua on raster windows.

Adjacency pairing: occupied sets use 8-adjacency, complements use
4-adjacency.  This is the standard pairing under which the digital Jordan
separation statements hold (a closed curve of set cells separates its
4-connected complement), so filled/unbounded component counts behave like
their continuum counterparts.

Every operation whose meaning depends on unboundedness in y raises
WindowTooSmall when the input set comes within two cells of a y margin.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import (WindowTooSmall, NotEssential, NotThin, EmptySet,
                     NotDisjoint, ValidationError)
from .grid import RasterSet, dilate

_STRUCT8 = np.ones((3, 3), dtype=bool)
_STRUCT4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass
class Labeling:
    labels: np.ndarray          # int array, 0 = background
    count: int
    touches_bottom: np.ndarray  # bool, indexed by label (entry 0 unused)
    touches_top: np.ndarray


def label_components(mask, spec, adjacency=8):
    """Connected components of a boolean mask.

    Labels are assigned in row-major order of each component's first cell
    (deterministic).  When the grid wraps in x, components touching across
    the seam are merged.
    """
    structure = _STRUCT8 if adjacency == 8 else _STRUCT4
    labels, n = ndimage.label(mask, structure=structure)
    if spec.wrap_x and n > 1 and spec.nx > 1:
        # merge components adjacent across the x seam
        parent = np.arange(n + 1)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        left = labels[:, 0]
        right = labels[:, -1]
        ny = spec.ny
        for i in range(ny):
            a = right[i]
            if a == 0:
                continue
            b = left[i]
            if b:
                union(a, b)
            if adjacency == 8:
                for di in (-1, 1):
                    k = i + di
                    if 0 <= k < ny and left[k]:
                        union(a, left[k])
        roots = np.array([find(a) for a in range(n + 1)])
        labels = roots[labels]
    # deterministic relabel by first occurrence, row-major from the bottom
    flat = labels.ravel()
    nz = np.nonzero(flat)[0]
    if nz.size == 0:
        return Labeling(labels, 0, np.zeros(1, bool), np.zeros(1, bool))
    seen = {}
    remap = np.zeros(labels.max() + 1, dtype=int)
    order = flat[nz]
    # first occurrence of each label value
    uniq, first_idx = np.unique(order, return_index=True)
    for lab, idx in sorted(zip(uniq.tolist(), first_idx.tolist()), key=lambda t: t[1]):
        seen[lab] = len(seen) + 1
    for lab, new in seen.items():
        remap[lab] = new
    labels = remap[labels]
    count = len(seen)
    touches_bottom = np.zeros(count + 1, dtype=bool)
    touches_top = np.zeros(count + 1, dtype=bool)
    for lab in np.unique(labels[0, :]):
        if lab:
            touches_bottom[lab] = True
    for lab in np.unique(labels[-1, :]):
        if lab:
            touches_top[lab] = True
    return Labeling(labels, count, touches_bottom, touches_top)


def connected_components(rs, adjacency=8):
    """Components of the occupied set, as a list of RasterSets (deterministic
    order: row-major first cell)."""
    lab = label_components(rs.cells, rs.spec, adjacency)
    return [RasterSet(rs.spec, lab.labels == k) for k in range(1, lab.count + 1)]


def margin_guard(rs, margin=2):
    """Raise WindowTooSmall when the set comes within `margin` cells of a
    y-window edge (unboundedness questions would be ill-posed)."""
    if rs.is_empty():
        raise EmptySet("empty raster")
    cells = rs.cells
    if cells[:margin, :].any() or cells[-margin:, :].any():
        raise WindowTooSmall(
            f"set within {margin} cells of a y margin; enlarge the window")


def _complement_labeling(rs):
    return label_components(~rs.cells, rs.spec, adjacency=4)


def upper_component(rs):
    """The unbounded complement component above the set (touching the top
    margin).  Unique by definition on a valid window."""
    margin_guard(rs)
    lab = _complement_labeling(rs)
    tops = [k for k in range(1, lab.count + 1) if lab.touches_top[k]]
    if len(tops) != 1:
        raise WindowTooSmall(f"{len(tops)} complement components touch the top margin")
    return RasterSet(rs.spec, lab.labels == tops[0])


def lower_component(rs):
    margin_guard(rs)
    lab = _complement_labeling(rs)
    bots = [k for k in range(1, lab.count + 1) if lab.touches_bottom[k]]
    if len(bots) != 1:
        raise WindowTooSmall(f"{len(bots)} complement components touch the bottom margin")
    return RasterSet(rs.spec, lab.labels == bots[0])


def unbounded_complement_count(rs):
    """Number of complement components touching a y margin."""
    margin_guard(rs)
    lab = _complement_labeling(rs)
    return sum(1 for k in range(1, lab.count + 1)
               if lab.touches_top[k] or lab.touches_bottom[k])


def fill(rs):
    """Union of the set with all bounded complement components.

    Idempotent and monotone; the filled set has no bounded complement
    components left.
    """
    margin_guard(rs)
    lab = _complement_labeling(rs)
    out = rs.cells.copy()
    for k in range(1, lab.count + 1):
        if not (lab.touches_top[k] or lab.touches_bottom[k]):
            out |= lab.labels == k
    return RasterSet(rs.spec, out)


@dataclass
class EssentialReport:
    connected: bool
    essential: bool
    annular: bool

    @property
    def ok(self):
        return self.connected and self.essential and self.annular


def is_essential_annular_continuum(rs):
    """connected: one 8-component.  essential: the set separates the two
    y margins (no complement component touches both, each is touched).
    annular: the complement is exactly the two unbounded components."""
    margin_guard(rs)
    set_lab = label_components(rs.cells, rs.spec, adjacency=8)
    connected = set_lab.count == 1
    lab = _complement_labeling(rs)
    top_only = bottom_only = both = bounded = 0
    for k in range(1, lab.count + 1):
        t, b = lab.touches_top[k], lab.touches_bottom[k]
        if t and b:
            both += 1
        elif t:
            top_only += 1
        elif b:
            bottom_only += 1
        else:
            bounded += 1
    essential = both == 0 and top_only >= 1 and bottom_only >= 1
    annular = essential and top_only == 1 and bottom_only == 1 and bounded == 0
    return EssentialReport(connected, essential, annular)


def _fill_from(mask_allowed, spec, side):
    """The 4-connected component of mask_allowed touching the given y margin
    ('top' or 'bottom').  Empty raster if the margin row is clear."""
    lab = label_components(mask_allowed, spec, adjacency=4)
    row = lab.labels[-1, :] if side == "top" else lab.labels[0, :]
    out = np.zeros_like(mask_allowed)
    for k in np.unique(row):
        if k:
            out |= lab.labels == k
    return out


def circloid_plus(rs):
    """Topmost circloid contained below: alternating flood fill.

    F1 = top fill of the complement of s; F2 = bottom fill of the complement
    of closure(F1); F3 = top fill of the complement of closure(F2);
    result = complement of (F2 | F3).  Closure = one 8-dilation.
    """
    return _circloid_op(rs, first="top")


def circloid_minus(rs):
    return _circloid_op(rs, first="bottom")


def _circloid_op(rs, first):
    rep = is_essential_annular_continuum(rs)
    if not rep.essential:
        # connectivity is deliberately not required: window clipping can
        # detach pieces of a set whose connections run through infinity
        # (see core_circloid); the alternating fill only needs separation
        raise NotEssential("input is not an essential (separating) set")
    spec = rs.spec
    second = "bottom" if first == "top" else "top"
    f1 = _fill_from(~rs.cells, spec, first)
    f2 = _fill_from(~dilate(f1, spec), spec, second)
    f3 = _fill_from(~dilate(f2, spec), spec, first)
    result = RasterSet(spec, ~(f2 | f3))
    out_rep = is_essential_annular_continuum(result)
    if not out_rep.ok:
        raise NotEssential("circloid operator did not produce an annular continuum")
    # boundary of the result stays within one cell of the input set
    boundary = result.cells & dilate(~result.cells, spec)
    if (boundary & ~dilate(rs.cells, spec)).any():
        raise ValidationError("circloid boundary escaped the 1-cell dilation of the input")
    return result


def is_thin(rs):
    """Thin at grid scale: no cell whose full 3x3 neighbourhood is occupied."""
    interior = ~dilate(~rs.cells, rs.spec)
    return not interior.any()


def core_circloid(rs):
    """Core circloid by the closure formula: cl(U+) & cl(U-) & s, with
    closure = one 8-dilation.  Needs a thin connected essential set; the
    result itself must come out annular (this is what rejects sets, like a
    theta curve, that have no circloid core at all).  Bounded complement
    pockets away from the core (e.g. coil channels of a spiral) are fine.
    Connectivity of the input is not required: window clipping can detach
    pieces of a set whose connections run through infinity (a hyperbola
    sheet joins the core only far outside any window), while U+ and U- and
    hence the formula remain well defined."""
    rep = is_essential_annular_continuum(rs)
    if not rep.essential:
        raise NotEssential("core formula needs an essential (separating) set")
    if not is_thin(rs):
        raise NotThin("set has raster interior; the closure formula needs a thin set")
    up = upper_component(rs)
    lo = lower_component(rs)
    core = dilate(up.cells, rs.spec) & dilate(lo.cells, rs.spec) & rs.cells
    if not core.any():
        raise NotEssential(
            "closures of U+ and U- do not meet inside the set: no circloid core")
    out = RasterSet(rs.spec, core)
    if not is_essential_annular_continuum(out).ok:
        raise NotEssential("core formula did not produce an annular continuum")
    return out


def iterated_core(rs, max_iter=8):
    """Core as the fixpoint of alternating circloid operators (independent
    route to core_circloid; the two agree within one cell on thin inputs)."""
    cur = rs
    for _ in range(max_iter):
        nxt = circloid_minus(circloid_plus(cur))
        if nxt == cur:
            return cur
        cur = nxt
    return cur


def separates(k, u, v):
    """Does the compact set k separate u from v (no 4-path in the complement
    of k joins a u-cell to a v-cell)?  u, v must be disjoint from k."""
    for other in (u, v):
        if (k.cells & other.cells).any():
            raise NotDisjoint("u/v must be disjoint from the separating candidate")
    if u.is_empty() or v.is_empty():
        raise EmptySet("u and v must be nonempty")
    lab = label_components(~k.cells, k.spec, adjacency=4)
    labels_u = set(np.unique(lab.labels[u.cells])) - {0}
    labels_v = set(np.unique(lab.labels[v.cells])) - {0}
    return not (labels_u & labels_v)


def hausdorff_distance(a, b):
    """Hausdorff distance between occupied cell-center clouds, in real units,
    with the annulus metric (x wraps) when the grids are periodic."""
    if a.spec != b.spec:
        raise ValidationError("rasters live on different grids")
    if a.is_empty() or b.is_empty():
        raise EmptySet("Hausdorff distance of an empty raster")
    pa = a.occupied_centers()
    pb = b.occupied_centers()
    period = float(a.spec.x_period)

    def directed(p, q):
        if a.spec.wrap_x:
            tiles = [q + np.array([s * period, 0.0]) for s in (-1, 0, 1)]
            q = np.vstack(tiles)
        tree = cKDTree(q)
        d, _ = tree.query(p, k=1)
        return float(d.max())

    return max(directed(pa, pb), directed(pb, pa))
