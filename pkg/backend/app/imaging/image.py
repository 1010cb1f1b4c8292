"""
Gray-level images and pixel graphs.

Pixels are indexed row-major with (x, y) = (column, row) and the origin at the
top-left corner; vertex id of pixel (x, y) is y * width + x.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Tuple

import numpy as np

from app.errors import DimensionMismatchError, ShapeSpaceError
from app.hierarchy.graph import NodeWeightedGraph, csr_from_pairs


class Connectivity(int, Enum):
    C4 = 4
    C8 = 8

    @property
    def forward_offsets(self) -> List[Tuple[int, int]]:
        """Half of the neighborhood as (dy, dx); the other half is the mirror."""
        if self is Connectivity.C4:
            return [(0, 1), (1, 0)]
        return [(0, 1), (1, 0), (1, 1), (1, -1)]

    @property
    def dual(self) -> "Connectivity":
        return Connectivity.C8 if self is Connectivity.C4 else Connectivity.C4

    @property
    def structure(self) -> np.ndarray:
        """3x3 structuring element for scipy.ndimage."""
        if self is Connectivity.C8:
            return np.ones((3, 3), dtype=bool)
        return np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable 8-bit gray image. `pixels` has shape (height, width)."""
    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeSpaceError(f"image must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ShapeSpaceError("gray levels must lie in [0, 255]")
            if np.issubdtype(arr.dtype, np.floating) and not np.array_equal(arr, np.floor(arr)):
                raise ShapeSpaceError("gray levels must be integers")
            arr = arr.astype(np.uint8)
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_values(cls, width: int, height: int, values: Iterable[int]) -> "Image":
        values = np.asarray(list(values))
        if values.size != width * height:
            raise DimensionMismatchError(f"{values.size} values for a {width}x{height} image")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    @property
    def values(self) -> np.ndarray:
        """Row-major flat view."""
        return self.pixels.reshape(-1)

    def complement(self) -> "Image":
        return Image(255 - self.pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height})"


def grid_pairs(height: int, width: int, conn: Connectivity) -> Tuple[np.ndarray, np.ndarray]:
    """Each unordered pair of conn-neighbors once, as two aligned id arrays."""
    ids = np.arange(height * width, dtype=np.int64).reshape(height, width)
    src, dst = [], []
    for dy, dx in conn.forward_offsets:
        y0, y1 = 0, height - dy
        x0, x1 = max(0, -dx), width - max(0, dx)
        if y1 <= y0 or x1 <= x0:
            continue
        src.append(ids[y0:y1, x0:x1].ravel())
        dst.append(ids[y0 + dy:y1 + dy, x0 + dx:x1 + dx].ravel())
    if not src:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(src), np.concatenate(dst)


def grid_adjacency(height: int, width: int, conn: Connectivity) -> Tuple[np.ndarray, np.ndarray]:
    p, q = grid_pairs(height, width, conn)
    return csr_from_pairs(height * width, np.concatenate([p, q]), np.concatenate([q, p]))


def weighted_grid_graph(weights: np.ndarray, conn: Connectivity) -> NodeWeightedGraph:
    """Pixel graph over any 2-D real array (used for padded images too)."""
    height, width = weights.shape
    indptr, indices = grid_adjacency(height, width, conn)
    return NodeWeightedGraph(indptr, indices, np.asarray(weights, dtype=np.float64).ravel().copy(), (height, width))


def grid_graph(img: Image, conn: Connectivity) -> NodeWeightedGraph:
    """One vertex per pixel weighted by its gray value, edges between conn-neighbors."""
    return weighted_grid_graph(img.pixels, Connectivity(conn))


def is_leveling(f: Image, g: Image, conn: Connectivity = Connectivity.C4) -> bool:
    """True iff g(p) > g(q) implies f(p) >= g(p) and g(q) >= f(q) for all neighbors p, q."""
    if f.shape != g.shape:
        raise DimensionMismatchError(f"leveling check on {f.shape} vs {g.shape}")
    fv = f.values.astype(np.int16)
    gv = g.values.astype(np.int16)
    p, q = grid_pairs(f.height, f.width, Connectivity(conn))
    for a, b in ((p, q), (q, p)):
        rising = gv[a] > gv[b]
        ok = (fv[a] >= gv[a]) & (gv[b] >= fv[b])
        if np.any(rising & ~ok):
            return False
    return True
