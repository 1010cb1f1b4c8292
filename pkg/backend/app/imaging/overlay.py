"""Detection overlays: gray input as RGB with object contours colored per attribute."""

from typing import Dict, Iterable, Sequence

import numpy as np
from scipy import ndimage

from app.hierarchy.component_tree import ComponentTree, vertex_sets
from app.imaging.image import Connectivity, Image

PALETTE = [
    (255, 0, 0),
    (0, 255, 0),
    (0, 0, 255),
    (255, 255, 0),
    (255, 0, 255),
    (0, 255, 255),
]


def inner_boundary(mask: np.ndarray) -> np.ndarray:
    """Pixels of `mask` with a 4-neighbor outside it (the image border counts as outside)."""
    interior = ndimage.binary_erosion(mask, structure=Connectivity.C4.structure, border_value=0)
    return mask & ~interior


def render_overlay(img: Image, tree: ComponentTree, detections: Iterable, kinds: Sequence[str]) -> np.ndarray:
    """(height, width, 3) uint8 array; colors cycle over `kinds` in order."""
    rgb = np.repeat(img.pixels[:, :, None], 3, axis=2).copy()
    colors: Dict[str, tuple] = {k: PALETTE[i % len(PALETTE)] for i, k in enumerate(kinds)}
    members = vertex_sets(tree)
    flat = rgb.reshape(-1, 3)
    for obj in detections:
        mask = np.zeros(img.width * img.height, dtype=bool)
        mask[members.members(obj.node)] = True
        edge = inner_boundary(mask.reshape(img.shape)).ravel()
        flat[edge] = colors.get(obj.kind, PALETTE[0])
    return rgb
