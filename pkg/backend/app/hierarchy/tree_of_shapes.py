"""
Tree of shapes.

Shapes are the saturated (hole-filled) connected components of the upper
threshold sets (C4) and lower threshold sets (C8) of an image. The image is
framed by a virtual ring of pixels valued at the median of its border
values; components reaching that ring saturate to the whole domain and are
represented by the root.

Upper-set and lower-set components are enumerated through the max-tree and
the min-tree of the framed image: each distinct component of a threshold
set is exactly one node of those trees.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from app.config.settings import get_settings
from app.errors import ParameterError
from app.hierarchy.component_tree import (
    ComponentTree,
    Polarity,
    TreeKind,
    accumulate,
    build_component_tree,
    vertex_sets,
)
from app.imaging.image import Connectivity, Image, weighted_grid_graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Shape:
    """A saturated component; `pixels` are sorted row-major flat indices."""
    pixels: np.ndarray
    level: float

    @property
    def area(self) -> int:
        return len(self.pixels)


def saturate(
    pixels: Union[Sequence[int], np.ndarray],
    img_dims: Tuple[int, int],
    conn_complement: Connectivity,
) -> np.ndarray:
    """Add to `pixels` every complement component (under conn_complement)
    that does not reach the exterior of the image.

    Args:
        pixels: flat row-major pixel indices
        img_dims: (height, width)
        conn_complement: connectivity used to flood the complement

    Returns:
        Sorted flat indices of the saturated set.
    """
    height, width = img_dims
    idx = np.unique(np.asarray(pixels, dtype=np.int64))
    if len(idx) == 0:
        return idx
    ys, xs = np.divmod(idx, width)
    y0, x0 = ys.min(), xs.min()
    # crop to the bounding box plus a one-pixel frame; everything outside the
    # box is reachable from the image border, so the frame stands for it
    mask = np.zeros((ys.max() - y0 + 3, xs.max() - x0 + 3), dtype=bool)
    mask[ys - y0 + 1, xs - x0 + 1] = True
    filled = ndimage.binary_fill_holes(mask, structure=Connectivity(conn_complement).structure)
    fy, fx = np.nonzero(filled[1:-1, 1:-1])
    return (fy + y0) * width + (fx + x0)


def border_median(img: Image) -> float:
    border = np.zeros(img.shape, dtype=bool)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    return float(np.median(img.pixels[border]))


def enumerate_shapes(img: Image) -> Tuple[List[Shape], float]:
    """All distinct shapes except the full domain, plus the exterior level.

    A pixel set generated by both polarities is kept once with its
    upper-set level.
    """
    height, width = img.shape
    exterior = border_median(img)
    framed = np.pad(img.pixels.astype(np.float64), 1, constant_values=exterior)
    ring = np.pad(np.zeros(img.shape, dtype=bool), 1, constant_values=True).ravel()
    framed_width = width + 2

    shapes: Dict[bytes, Shape] = {}
    full = hashlib.blake2b(np.arange(height * width, dtype=np.int64).tobytes(), digest_size=16).digest()
    passes = (
        (Polarity.MAX, Connectivity.C4),
        (Polarity.MIN, Connectivity.C8),
    )
    for polarity, conn in passes:
        tree = build_component_tree(weighted_grid_graph(framed, conn), polarity)
        on_ring = accumulate(tree, np.bincount(tree.node_of_vertex, weights=ring, minlength=tree.node_count)) > 0
        vs = vertex_sets(tree)
        for node in np.flatnonzero(~on_ring).tolist():
            fy, fx = np.divmod(vs.members(node), framed_width)
            pixels = saturate((fy - 1) * width + (fx - 1), img.shape, conn.dual)
            key = hashlib.blake2b(pixels.tobytes(), digest_size=16).digest()
            if key != full and key not in shapes:
                shapes[key] = Shape(pixels, float(tree.level[node]))
    return list(shapes.values()), exterior


def build_tree_of_shapes(img: Image) -> ComponentTree:
    """Inclusion tree of the shapes of `img`.

    Node ids are ordered by (area, smallest pixel id), root last. A shape's
    level is the gray value of its proper pixels (those whose smallest shape
    it is); the root's level is the border median.

    Raises:
        ParameterError: image larger than SHAPESPACE_TOS_MAX_PIXELS
    """
    limit = get_settings().tos_max_pixels
    if img.width * img.height > limit:
        raise ParameterError(
            f"tree of shapes limited to {limit} pixels, image has {img.width * img.height}"
        )
    logger.debug("call to: build_tree_of_shapes(%dx%d)", img.width, img.height)

    shapes, exterior = enumerate_shapes(img)
    shapes.sort(key=lambda s: (s.area, int(s.pixels[0])))
    count = len(shapes) + 1
    root = count - 1

    # paint from the largest shape down; a shape's parent is whatever covers
    # its first pixel just before it is painted
    label = np.full(img.width * img.height, root, dtype=np.int64)
    parent = np.full(count, root, dtype=np.int64)
    for s in range(count - 2, -1, -1):
        pixels = shapes[s].pixels
        parent[s] = label[pixels[0]]
        label[pixels] = s

    own = np.bincount(label, minlength=count)
    if np.any(own[:-1] == 0):
        parent, label, shapes = _splice_empty(parent, label, shapes, own)
        count = len(shapes) + 1

    values = img.values.astype(np.float64)
    level = np.full(count, exterior)
    lo = np.full(count, np.inf)
    hi = np.full(count, -np.inf)
    np.minimum.at(lo, label, values)
    np.maximum.at(hi, label, values)
    proper = np.isfinite(lo[:-1])
    level[:-1][proper] = lo[:-1][proper]
    mixed = np.flatnonzero(lo[:-1] != hi[:-1])
    if len(mixed):
        logger.warning("tree of shapes: %d shapes with mixed proper values", len(mixed))
        for s in mixed.tolist():
            level[s] = shapes[s].level

    logger.debug("tree of shapes: %d nodes", count)
    return ComponentTree(parent, level, label, Polarity.MIN, TreeKind.TOS, img.shape)


def _splice_empty(parent, label, shapes, own):
    """Drop non-root shapes without proper pixels and renumber."""
    count = len(parent)
    keep = own > 0
    keep[-1] = True
    alias = np.arange(count)
    for s in range(count - 2, -1, -1):
        if not keep[s]:
            alias[s] = alias[parent[s]]
    new_id = np.cumsum(keep) - 1
    kept = np.flatnonzero(keep)
    logger.debug("tree of shapes: splicing %d shapes without proper pixels", count - len(kept))
    new_parent = new_id[alias[parent[kept]]]
    new_parent[-1] = len(kept) - 1
    return new_parent, new_id[label], [shapes[s] for s in kept[:-1].tolist()]
