"""
Shape space: the nodes of a tree T seen as a node-weighted graph.

Vertices are the nodes of T, edges join each node to its parent and weights
are the oriented attribute, so that relevant nodes are minima. The second
tree TT is the min-tree of that graph; its leaves are the regional minima.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Union

import numpy as np

from app.attributes.shape_attributes import AttributeKind, AttributeMap, Orientation
from app.errors import AttributeKindError, TreeMismatchError
from app.hierarchy.component_tree import (
    ComponentTree,
    Polarity,
    accumulate,
    build_component_tree,
)
from app.hierarchy.graph import NodeWeightedGraph, csr_from_pairs

logger = logging.getLogger(__name__)

SECOND_ATTRIBUTES = (AttributeKind.HEIGHT, AttributeKind.NODE_COUNT, AttributeKind.PIXEL_AREA)


@dataclass(frozen=True, eq=False)
class ShapeSpace:
    graph: NodeWeightedGraph
    base_tree: ComponentTree
    attribute: AttributeMap
    oriented: bool

    @property
    def weights(self) -> np.ndarray:
        return self.graph.weights


@dataclass(frozen=True)
class MinimumRecord:
    """A regional minimum of the shape space and its extinction value.

    `minimum` is the TT leaf holding the minimum, `plateau` the T-nodes of
    that leaf. merge_level is +inf for the first minimum in the order.
    """
    minimum: int
    altitude: float
    rank: int
    extinction: float
    merge_level: float
    plateau: tuple


def make_shape_space(t: ComponentTree, a: AttributeMap) -> ShapeSpace:
    """Raises TreeMismatchError when `a` was not computed on `t`."""
    if not a.refers_to(t):
        raise TreeMismatchError("attribute map refers to another tree")
    child = np.arange(t.node_count - 1, dtype=np.int64)
    up = t.parent[:-1]
    indptr, indices = csr_from_pairs(t.node_count, np.concatenate([child, up]), np.concatenate([up, child]))
    graph = NodeWeightedGraph(indptr, indices, a.oriented())
    return ShapeSpace(graph, t, a, a.orientation is Orientation.RELEVANT_IS_HIGH)


def second_tree(s: ShapeSpace) -> ComponentTree:
    return build_component_tree(s.graph, Polarity.MIN)


def _check_pair(tt: ComponentTree, s: ShapeSpace):
    if tt.vertex_count != s.graph.vertex_count:
        raise TreeMismatchError(
            f"second tree covers {tt.vertex_count} vertices, shape space has {s.graph.vertex_count}"
        )


def second_attribute(tt: ComponentTree, s: ShapeSpace, aa_kind: Union[str, AttributeKind]) -> AttributeMap:
    """Increasing attribute of the components of TT.

    height:     level(N) - lowest weight inside N
    node_count: number of T-nodes in N
    pixel_area: pixels covered by the topmost T-nodes of N

    Raises:
        AttributeKindError: aa_kind is not a second-level attribute
    """
    _check_pair(tt, s)
    try:
        aa_kind = AttributeKind(aa_kind)
    except ValueError:
        aa_kind = None
    if aa_kind not in SECOND_ATTRIBUTES:
        raise AttributeKindError(
            f"unknown second-level attribute. Available: {[k.value for k in SECOND_ATTRIBUTES]}"
        )

    if aa_kind is AttributeKind.HEIGHT:
        lowest = accumulate(tt, tt.level, min)
        values = tt.level - lowest
    elif aa_kind is AttributeKind.NODE_COUNT:
        values = accumulate(tt, tt.own_vertex_count).astype(np.float64)
    else:
        values = _topmost_pixel_area(tt, s)
    return AttributeMap(tt, values, aa_kind, Orientation.RELEVANT_IS_HIGH)


def _topmost_pixel_area(tt: ComponentTree, s: ShapeSpace) -> np.ndarray:
    # T-node n is topmost in the TT nodes from node_of_vertex(n) up to, but
    # excluding, the smallest TT node that also holds parent(n). In a min-tree
    # that node is the one of whichever endpoint weighs more.
    base = s.base_tree
    area = accumulate(base, base.own_vertex_count.astype(np.float64))
    nov = tt.node_of_vertex
    w = s.weights
    delta = np.bincount(nov, weights=area, minlength=tt.node_count)
    child = np.arange(base.node_count - 1)
    up = base.parent[:-1]
    joint = np.where(w[up] > w[child], nov[up], nov[child])
    delta -= np.bincount(joint, weights=area[child], minlength=tt.node_count)
    return accumulate(tt, delta)


def best_leaves(tt: ComponentTree) -> np.ndarray:
    """For every TT node, the first leaf below it in the order (altitude, id)."""
    best = np.where(tt.is_leaf, np.arange(tt.node_count), -1).tolist()
    par = tt.parent.tolist()
    lvl = tt.level.tolist()
    for n in range(tt.node_count - 1):
        p, b = par[n], best[n]
        c = best[p]
        if c < 0 or (lvl[b], b) < (lvl[c], c):
            best[p] = b
    return np.asarray(best, dtype=np.int64)


def extinction_values(tt: ComponentTree, s: ShapeSpace) -> List[MinimumRecord]:
    """One record per regional minimum, sorted by rank.

    The merge level of a minimum is the level of the lowest TT node where it
    meets a minimum that precedes it in the order (altitude, leaf id).
    """
    _check_pair(tt, s)
    best = np.where(tt.is_leaf, np.arange(tt.node_count), -1).tolist()
    merge = [math.inf] * tt.node_count
    par = tt.parent.tolist()
    lvl = tt.level.tolist()
    for n in range(tt.node_count - 1):
        p, b = par[n], best[n]
        c = best[p]
        if c < 0:
            best[p] = b
        elif (lvl[b], b) < (lvl[c], c):
            merge[c] = lvl[p]
            best[p] = b
        else:
            merge[b] = lvl[p]

    leaves = np.flatnonzero(tt.is_leaf).tolist()
    leaves.sort(key=lambda m: (lvl[m], m))
    plateaus = {}
    leaf = tt.is_leaf.tolist()
    for v, node in enumerate(tt.node_of_vertex.tolist()):
        if leaf[node]:
            plateaus.setdefault(node, []).append(v)
    records = [
        MinimumRecord(
            minimum=m,
            altitude=lvl[m],
            rank=rank,
            extinction=merge[m] - lvl[m],
            merge_level=merge[m],
            plateau=tuple(plateaus.get(m, ())),
        )
        for rank, m in enumerate(leaves)
    ]
    logger.debug("extinction_values: %d minima", len(records))
    return records
