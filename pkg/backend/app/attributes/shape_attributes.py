"""
Shape attributes of component-tree nodes.

The map keeps raw attribute values; `oriented()` gives the weights used in
shape space, where relevant nodes are low (relevant_is_high attributes are
negated).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from app.errors import AttributeKindError, ParameterError, TreeMismatchError
from app.hierarchy.component_tree import ComponentTree, accumulate
from app.attributes.moments import Moments, accumulate_moments
from app.imaging.image import Connectivity, grid_pairs

logger = logging.getLogger(__name__)


class AttributeKind(str, Enum):
    AREA = "area"
    CONTOUR_LENGTH = "contour_length"
    INERTIA = "inertia"
    INERTIA_OVER_AREA2 = "inertia_over_area2"
    CIRCULARITY = "circularity"
    ELONGATION = "elongation"
    COMBINED = "combined"
    CUSTOM = "custom"
    # second-level attributes, computed on the second tree
    HEIGHT = "height"
    NODE_COUNT = "node_count"
    PIXEL_AREA = "pixel_area"


SHAPE_ATTRIBUTES = (
    AttributeKind.AREA,
    AttributeKind.CONTOUR_LENGTH,
    AttributeKind.INERTIA,
    AttributeKind.INERTIA_OVER_AREA2,
    AttributeKind.CIRCULARITY,
    AttributeKind.ELONGATION,
)

ALIASES = {"contour": AttributeKind.CONTOUR_LENGTH, "i_over_a2": AttributeKind.INERTIA_OVER_AREA2}


class Orientation(str, Enum):
    RELEVANT_IS_LOW = "relevant_is_low"
    RELEVANT_IS_HIGH = "relevant_is_high"


DEFAULT_ORIENTATION = {
    AttributeKind.AREA: Orientation.RELEVANT_IS_HIGH,
    AttributeKind.CIRCULARITY: Orientation.RELEVANT_IS_HIGH,
    AttributeKind.CONTOUR_LENGTH: Orientation.RELEVANT_IS_LOW,
    AttributeKind.INERTIA: Orientation.RELEVANT_IS_LOW,
    AttributeKind.INERTIA_OVER_AREA2: Orientation.RELEVANT_IS_LOW,
    AttributeKind.ELONGATION: Orientation.RELEVANT_IS_LOW,
}


def parse_attribute_kind(name: Union[str, AttributeKind]) -> AttributeKind:
    if isinstance(name, AttributeKind):
        return name
    key = str(name).strip().lower()
    if key in ALIASES:
        return ALIASES[key]
    try:
        return AttributeKind(key)
    except ValueError:
        raise AttributeKindError(
            f"unknown attribute '{name}'. Available: {[k.value for k in SHAPE_ATTRIBUTES]}"
        ) from None


@dataclass(frozen=True, eq=False)
class AttributeMap:
    """One real value per node of `tree`."""
    tree: ComponentTree
    values: np.ndarray
    kind: AttributeKind
    orientation: Orientation

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.tree.node_count,):
            raise TreeMismatchError(
                f"{values.shape[0] if values.ndim else 0} attribute values for {self.tree.node_count} nodes"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(
        cls,
        tree: ComponentTree,
        values: Sequence[float],
        orientation: Orientation = Orientation.RELEVANT_IS_LOW,
    ) -> "AttributeMap":
        """Wrap externally computed per-node values."""
        return cls(tree, np.array(values, dtype=np.float64), AttributeKind.CUSTOM, Orientation(orientation))

    def oriented(self) -> np.ndarray:
        if self.orientation is Orientation.RELEVANT_IS_HIGH:
            return -self.values
        return self.values.copy()

    def refers_to(self, tree: ComponentTree) -> bool:
        return self.tree is tree


def contour_lengths(tree: ComponentTree) -> np.ndarray:
    """Pixel sides between each node and its complement (image border included).

    boundary(S) = 4 |S| - 2 * (C4 pixel pairs inside S). A pair lies inside
    exactly the nodes above the lowest common ancestor of its two pixels'
    nodes, so pairs are counted at that ancestor and accumulated upwards.
    """
    if tree.domain is None:
        raise ParameterError("contour length needs a tree built over a pixel grid")
    height, width = tree.domain
    p, q = grid_pairs(height, width, Connectivity.C4)
    a = tree.node_of_vertex[p]
    b = tree.node_of_vertex[q]
    depth = tree.depth
    parent = tree.parent
    active = np.flatnonzero(a != b)
    while len(active):
        da, db = depth[a[active]], depth[b[active]]
        up_a = active[da >= db]
        up_b = active[db > da]
        a[up_a] = parent[a[up_a]]
        b[up_b] = parent[b[up_b]]
        active = active[a[active] != b[active]]
    internal = np.bincount(a, minlength=tree.node_count).astype(np.float64)
    internal = accumulate(tree, internal)
    area = accumulate(tree, tree.own_vertex_count.astype(np.float64))
    return 4.0 * area - 2.0 * internal


def attribute(
    tree: ComponentTree,
    kind: Union[str, AttributeKind],
    orientation: Optional[Orientation] = None,
    moments: Optional[Moments] = None,
) -> AttributeMap:
    """Shape attribute of every node.

    Args:
        tree: tree built over a pixel grid
        kind: one of SHAPE_ATTRIBUTES (or its alias "contour")
        orientation: overrides DEFAULT_ORIENTATION
        moments: precomputed accumulate_moments(tree), reused when given

    Raises:
        AttributeKindError: unknown or non-shape kind
    """
    kind = parse_attribute_kind(kind)
    if kind not in SHAPE_ATTRIBUTES:
        raise AttributeKindError(f"'{kind.value}' is not a shape attribute")
    orientation = Orientation(orientation) if orientation else DEFAULT_ORIENTATION[kind]
    logger.debug("call to: attribute(%s, %s)", kind.value, orientation.value)

    if kind is AttributeKind.CONTOUR_LENGTH:
        return AttributeMap(tree, contour_lengths(tree), kind, orientation)

    m = moments if moments is not None else accumulate_moments(tree)
    n = m.n
    mu20, mu02, mu11 = m.mu20, m.mu02, m.mu11
    inertia = mu20 + mu02
    if kind is AttributeKind.AREA:
        values = n
    elif kind is AttributeKind.INERTIA:
        values = inertia
    elif kind is AttributeKind.INERTIA_OVER_AREA2:
        values = inertia / (n * n)
    elif kind is AttributeKind.CIRCULARITY:
        values = np.minimum(n * n / (2.0 * np.pi * inertia), 1.0)
    else:
        half_trace = inertia / 2.0
        spread = np.sqrt(((mu20 - mu02) / 2.0) ** 2 + mu11 * mu11)
        values = np.sqrt((half_trace + spread) / (half_trace - spread))
    return AttributeMap(tree, values, kind, orientation)


def combine_attributes(maps: Sequence[AttributeMap], weights: Optional[Sequence[float]] = None) -> AttributeMap:
    """Weighted sum of oriented attributes, each rescaled to [0, 1] over the nodes.

    The result is oriented relevant_is_low, like its inputs after orientation.
    """
    if not maps:
        raise AttributeKindError("nothing to combine")
    tree = maps[0].tree
    if any(not m.refers_to(tree) for m in maps):
        raise TreeMismatchError("combined attributes must be computed on the same tree")
    weights = [1.0] * len(maps) if weights is None else list(weights)
    if len(weights) != len(maps):
        raise AttributeKindError(f"{len(weights)} weights for {len(maps)} attributes")
    total = np.zeros(tree.node_count)
    for m, wgt in zip(maps, weights):
        o = m.oriented()
        span = o.max() - o.min()
        if span > 0:
            total += wgt * (o - o.min()) / span
    return AttributeMap(tree, total, AttributeKind.COMBINED, Orientation.RELEVANT_IS_LOW)
