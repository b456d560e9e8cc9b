"""Rasters on an annulus / covering-strip window.

A GridSpec fixes a square cell size 1/resolution on the window
[0, x_period] x [y_min, y_max].  x_period = 1 means the raster lives on
the annulus itself: the x direction is then periodic (adjacency wraps).
x_period > 1 represents a window of the universal cover holding several
fundamental-domain copies; such windows are plain rectangles and edge
clipping in x is acknowledged by the callers.

Cell (i, j) covers [j, j+1]/resolution x [y_min + [i, i+1]/resolution];
row 0 is the bottom of the window.  Boolean masks are indexed [row, col].
"""

from dataclasses import dataclass
import io

import numpy as np

from .errors import ValidationError, EmptySet


def _snap(value, cell):
    k = round(value / cell)
    if abs(value - k * cell) > 1e-9:
        raise ValidationError(
            f"window bound {value} is not an integer multiple of the cell size {cell}")
    return k * cell


@dataclass(frozen=True)
class GridSpec:
    resolution: int
    x_period: int = 1
    y_min: float = -1.0
    y_max: float = 2.0

    def __post_init__(self):
        if self.resolution < 8:
            raise ValidationError("resolution must be at least 8")
        if self.x_period < 1:
            raise ValidationError("x_period must be a positive integer")
        cell = 1.0 / self.resolution
        object.__setattr__(self, "y_min", _snap(self.y_min, cell))
        object.__setattr__(self, "y_max", _snap(self.y_max, cell))
        if not self.y_min < self.y_max:
            raise ValidationError("empty y window")

    @property
    def cell(self):
        return 1.0 / self.resolution

    @property
    def nx(self):
        return self.resolution * self.x_period

    @property
    def ny(self):
        return int(round((self.y_max - self.y_min) * self.resolution))

    @property
    def wrap_x(self):
        # the annulus itself is periodic in x; multi-period cover windows
        # are plain rectangles (see module docstring)
        return self.x_period == 1

    def x_centers(self):
        return (np.arange(self.nx) + 0.5) * self.cell

    def y_centers(self):
        return self.y_min + (np.arange(self.ny) + 0.5) * self.cell

    def index_of(self, x, y):
        """Cell indices (rows, cols) of real points; x wraps when periodic.
        Points outside the y window get row -1."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.wrap_x:
            x = np.mod(x, self.x_period)
        cols = np.floor(x * self.resolution).astype(int)
        cols = np.clip(cols, 0, self.nx - 1) if not self.wrap_x else np.mod(cols, self.nx)
        rows = np.floor((y - self.y_min) * self.resolution).astype(int)
        rows = np.where((y >= self.y_min) & (y <= self.y_max), np.clip(rows, 0, self.ny - 1), -1)
        return rows, cols


def dilate(mask, spec, iterations=1):
    """8-neighbourhood dilation honouring the wrap convention of spec."""
    out = mask.astype(bool)
    for _ in range(iterations):
        m = out
        up = np.zeros_like(m)
        down = np.zeros_like(m)
        up[1:, :] = m[:-1, :]
        down[:-1, :] = m[1:, :]
        vert = m | up | down
        if spec.wrap_x:
            left = np.roll(vert, 1, axis=1)
            right = np.roll(vert, -1, axis=1)
        else:
            left = np.zeros_like(vert)
            right = np.zeros_like(vert)
            left[:, 1:] = vert[:, :-1]
            right[:, :-1] = vert[:, 1:]
        out = vert | left | right
    return out


class RasterSet:
    """A compact subset of the window, as a boolean cell mask."""

    def __init__(self, spec, cells):
        cells = np.asarray(cells, dtype=bool)
        if cells.shape != (spec.ny, spec.nx):
            raise ValidationError(
                f"mask shape {cells.shape} does not match grid {(spec.ny, spec.nx)}")
        self.spec = spec
        self.cells = cells

    # -- constructors -------------------------------------------------

    @classmethod
    def empty(cls, spec):
        return cls(spec, np.zeros((spec.ny, spec.nx), dtype=bool))

    @classmethod
    def from_points(cls, spec, x, y, clip_y=True):
        """Mark every cell containing one of the points.  Points outside the
        y window are dropped when clip_y, otherwise raise."""
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        rows, cols = spec.index_of(x, y)
        ok = rows >= 0
        if not clip_y and not ok.all():
            raise ValidationError("points outside the y window")
        if not spec.wrap_x:
            inside = (x >= 0) & (x <= spec.x_period)
            ok &= inside
        mask = np.zeros((spec.ny, spec.nx), dtype=bool)
        mask[rows[ok], cols[ok]] = True
        return cls(spec, mask)

    # -- basics --------------------------------------------------------

    def is_empty(self):
        return not self.cells.any()

    def count(self):
        return int(self.cells.sum())

    def copy(self):
        return RasterSet(self.spec, self.cells.copy())

    def __eq__(self, other):
        return (isinstance(other, RasterSet) and self.spec == other.spec
                and np.array_equal(self.cells, other.cells))

    def union(self, other):
        self._check_same(other)
        return RasterSet(self.spec, self.cells | other.cells)

    def intersection(self, other):
        self._check_same(other)
        return RasterSet(self.spec, self.cells & other.cells)

    def difference(self, other):
        self._check_same(other)
        return RasterSet(self.spec, self.cells & ~other.cells)

    def _check_same(self, other):
        if other.spec != self.spec:
            raise ValidationError("rasters live on different grids")

    def dilated(self, iterations=1):
        return RasterSet(self.spec, dilate(self.cells, self.spec, iterations))

    def shifted_cols(self, ncols):
        """Shift right by ncols columns.  Wraps when periodic, otherwise
        cells pushed past the window edge are lost."""
        if self.spec.wrap_x:
            return RasterSet(self.spec, np.roll(self.cells, ncols, axis=1))
        out = np.zeros_like(self.cells)
        if ncols >= 0:
            if ncols < self.spec.nx:
                out[:, ncols:] = self.cells[:, :self.spec.nx - ncols]
        else:
            if -ncols < self.spec.nx:
                out[:, :ncols] = self.cells[:, -ncols:]
        return RasterSet(self.spec, out)

    def occupied_centers(self):
        """(k, 2) array of cell-center coordinates of occupied cells."""
        rows, cols = np.nonzero(self.cells)
        if rows.size == 0:
            raise EmptySet("raster has no occupied cells")
        x = (cols + 0.5) * self.spec.cell
        y = self.spec.y_min + (rows + 0.5) * self.spec.cell
        return np.column_stack([x, y])

    def y_extent(self):
        rows = np.nonzero(self.cells.any(axis=1))[0]
        if rows.size == 0:
            raise EmptySet("raster has no occupied cells")
        return (self.spec.y_min + rows[0] * self.spec.cell,
                self.spec.y_min + (rows[-1] + 1) * self.spec.cell)

    def x_extent(self):
        cols = np.nonzero(self.cells.any(axis=0))[0]
        if cols.size == 0:
            raise EmptySet("raster has no occupied cells")
        return (cols[0] * self.spec.cell, (cols[-1] + 1) * self.spec.cell)

    # -- axis swap ------------------------------------------------------

    def swapped_axes(self):
        """Exchange the roles of the two axes (the classical vertical-circle
        picture vs the normalized horizontal one).  Requires the y window to
        span an integer number of units and x_period to become that span."""
        span = self.spec.y_max - self.spec.y_min
        if abs(span - round(span)) > 1e-9:
            raise ValidationError("axis swap needs an integer-height y window")
        new_spec = GridSpec(self.spec.resolution, int(round(span)),
                            0.0, float(self.spec.x_period))
        # new x = old y - y_min, new y = old x
        return RasterSet(new_spec, self.cells.T.copy())

    # -- PGM I/O ---------------------------------------------------------

    def to_pgm(self, path):
        """Binary P5 PGM, 255 = set, 0 = complement, plus a sidecar text
        header <path>.hdr carrying the grid geometry.  Round-trips exactly."""
        img = np.where(self.cells[::-1, :], 255, 0).astype(np.uint8)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{self.spec.nx} {self.spec.ny}\n255\n".encode())
            fh.write(img.tobytes())
        with open(str(path) + ".hdr", "w") as fh:
            fh.write(f"resolution={self.spec.resolution} x_period={self.spec.x_period} "
                     f"y_min={self.spec.y_min!r} y_max={self.spec.y_max!r}\n")

    @classmethod
    def from_pgm(cls, path):
        with open(path, "rb") as fh:
            data = fh.read()
        buf = io.BytesIO(data)
        magic = buf.readline().strip()
        if magic != b"P5":
            raise ValidationError("not a binary PGM (P5) file")
        dims = buf.readline().split()
        while dims and dims[0].startswith(b"#"):
            dims = buf.readline().split()
        nx, ny = int(dims[0]), int(dims[1])
        maxval = int(buf.readline().strip())
        if maxval != 255:
            raise ValidationError("expected maxval 255")
        img = np.frombuffer(buf.read(nx * ny), dtype=np.uint8).reshape(ny, nx)
        fields = {}
        with open(str(path) + ".hdr") as fh:
            for token in fh.read().split():
                key, _, val = token.partition("=")
                fields[key] = val
        spec = GridSpec(int(fields["resolution"]), int(fields["x_period"]),
                        float(fields["y_min"]), float(fields["y_max"]))
        if (spec.ny, spec.nx) != (ny, nx):
            raise ValidationError("PGM dimensions disagree with sidecar header")
        return cls(spec, (img[::-1, :] >= 128))
