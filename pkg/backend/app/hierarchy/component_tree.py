"""
Component trees of node-weighted graphs.

Construction follows the union-find scheme: vertices are processed by
increasing weight (min-tree) or decreasing weight (max-tree), ties by
ascending vertex id, then the parent relation is canonicalized so that
each node is represented by one canonical vertex.

Node ids are topologically sorted: parent(n) > n for every non-root node
and the root is node_count - 1. Every pass in this package relies on it.
"""

import logging
import operator
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import DisconnectedGraphError, EmptyGraphError, MalformedGraphError
from app.hierarchy.graph import NodeWeightedGraph

logger = logging.getLogger(__name__)

# incremented whenever reconstruct is asked to drop the root
RECONSTRUCT_DIAGNOSTICS: Counter = Counter()


class Polarity(str, Enum):
    MIN = "min"
    MAX = "max"


class TreeKind(str, Enum):
    MIN = "min"
    MAX = "max"
    TOS = "tos"


@dataclass(frozen=True, eq=False)
class ComponentTree:
    """Rooted tree of connected components.

    parent:         node -> parent node (root maps to itself)
    level:          node -> real level
    node_of_vertex: vertex -> smallest node containing it
    domain:         (height, width) when the vertices are pixels, else None
    """
    parent: np.ndarray
    level: np.ndarray
    node_of_vertex: np.ndarray
    polarity: Polarity
    kind: TreeKind
    domain: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        n = len(self.parent)
        if n == 0 or len(self.level) != n:
            raise MalformedGraphError("tree needs one level per node and at least one node")
        ids = np.arange(n - 1)
        if n > 1 and not np.all(self.parent[:-1] > ids):
            raise MalformedGraphError("node ids are not topologically sorted")
        if self.parent[-1] != n - 1:
            raise MalformedGraphError("last node must be the root")
        for name in ("parent", "level", "node_of_vertex"):
            getattr(self, name).setflags(write=False)

    @property
    def node_count(self) -> int:
        return len(self.parent)

    @property
    def vertex_count(self) -> int:
        return len(self.node_of_vertex)

    @property
    def root(self) -> int:
        return self.node_count - 1

    @cached_property
    def children(self) -> List[List[int]]:
        """Children of every node, in ascending id order."""
        kids: List[List[int]] = [[] for _ in range(self.node_count)]
        for n, p in enumerate(self.parent[:-1].tolist()):
            kids[p].append(n)
        return kids

    @cached_property
    def is_leaf(self) -> np.ndarray:
        has_child = np.zeros(self.node_count, dtype=bool)
        has_child[self.parent[:-1]] = True
        return ~has_child

    @cached_property
    def own_vertex_count(self) -> np.ndarray:
        return np.bincount(self.node_of_vertex, minlength=self.node_count)

    @cached_property
    def depth(self) -> np.ndarray:
        """Number of nodes on the path from the root to each node (root = 1)."""
        d = [1] * self.node_count
        par = self.parent.tolist()
        for n in range(self.node_count - 2, -1, -1):
            d[n] = d[par[n]] + 1
        return np.asarray(d, dtype=np.int64)

    def ancestors(self, n: int) -> List[int]:
        """n, its parent, ..., the root."""
        path = [n]
        while path[-1] != self.root:
            path.append(int(self.parent[path[-1]]))
        return path


def accumulate(tree: ComponentTree, values: np.ndarray, op: Callable = operator.add) -> np.ndarray:
    """Fold per-node values from the leaves to the root.

    Children are folded into their parent in ascending node id order, so the
    result is deterministic for floating-point sums.
    """
    out = list(np.asarray(values).tolist())
    par = tree.parent.tolist()
    for n in range(tree.node_count - 1):
        p = par[n]
        out[p] = op(out[p], out[n])
    return np.asarray(out, dtype=np.asarray(values).dtype)


def build_component_tree(graph: NodeWeightedGraph, polarity: Union[Polarity, str]) -> ComponentTree:
    """Min-tree or max-tree of a connected node-weighted graph.

    Raises:
        EmptyGraphError: graph without vertices
        DisconnectedGraphError: graph with more than one connected component
    """
    polarity = Polarity(polarity)
    n = graph.vertex_count
    logger.debug("call to: build_component_tree(%d vertices, %s)", n, polarity.value)
    if n == 0:
        raise EmptyGraphError("cannot build a tree on an empty graph")

    w = graph.weights
    key = w if polarity is Polarity.MIN else -w
    order = np.lexsort((np.arange(n), key)).tolist()

    indptr = graph.indptr.tolist()
    indices = graph.indices.tolist()
    parent = list(range(n))
    zpar = [-1] * n
    rank = [0] * n
    top = list(range(n))  # union-find root -> latest vertex of its component

    for v in order:
        zpar[v] = v
        cur = v
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if zpar[u] < 0:
                continue
            r = u
            while zpar[r] != r:
                zpar[r] = zpar[zpar[r]]
                r = zpar[r]
            if r == cur:
                continue
            parent[top[r]] = v
            if rank[cur] < rank[r]:
                cur, r = r, cur
            zpar[r] = cur
            if rank[cur] == rank[r]:
                rank[cur] += 1
            top[cur] = v

    roots = sum(1 for v in range(n) if zpar[v] == v)
    if roots != 1:
        raise DisconnectedGraphError(f"graph has {roots} connected components")

    wl = w.tolist()
    for x in reversed(order):
        p = parent[x]
        if wl[parent[p]] == wl[p]:
            parent[x] = parent[p]

    par = np.asarray(parent, dtype=np.int64)
    order_arr = np.asarray(order, dtype=np.int64)
    canonical = (par == np.arange(n)) | (w[par] != w)
    canon_in_order = order_arr[canonical[order_arr]]
    node_id = np.full(n, -1, dtype=np.int64)
    node_id[canon_in_order] = np.arange(len(canon_in_order))

    node_of_vertex = np.where(canonical, node_id, node_id[par])
    node_parent = node_id[par[canon_in_order]]
    level = w[canon_in_order].astype(np.float64)
    kind = TreeKind.MIN if polarity is Polarity.MIN else TreeKind.MAX
    return ComponentTree(node_parent, level, node_of_vertex, polarity, kind, graph.shape)


@dataclass(frozen=True, eq=False)
class VertexSets:
    """Vertex content of every node.

    Vertices are laid out so that each subtree occupies one contiguous slice
    of `order`; `members(n)` is that slice.
    """
    counts: np.ndarray
    order: np.ndarray
    start: np.ndarray

    def members(self, n: int) -> np.ndarray:
        s = self.start[n]
        return self.order[s:s + self.counts[n]]

    def __len__(self) -> int:
        return len(self.counts)


def vertex_sets(tree: ComponentTree) -> VertexSets:
    counts = accumulate(tree, tree.own_vertex_count)
    own = tree.own_vertex_count.tolist()
    cnt = counts.tolist()
    par = tree.parent.tolist()
    start = [0] * tree.node_count
    cursor = [0] * tree.node_count  # next free slot inside each node's slice
    cursor[tree.root] = own[tree.root]
    for n in range(tree.node_count - 2, -1, -1):
        p = par[n]
        start[n] = cursor[p]
        cursor[p] += cnt[n]
        cursor[n] = start[n] + own[n]
    start_arr = np.asarray(start, dtype=np.int64)
    order = np.lexsort((np.arange(tree.vertex_count), start_arr[tree.node_of_vertex]))
    return VertexSets(counts, order, start_arr)


KeepPredicate = Union[Callable[[int], bool], Sequence[bool], np.ndarray]


def keep_mask(tree: ComponentTree, keep: KeepPredicate) -> np.ndarray:
    if callable(keep):
        mask = np.fromiter((bool(keep(n)) for n in range(tree.node_count)), dtype=bool, count=tree.node_count)
    else:
        mask = np.array(keep, dtype=bool)
        if mask.shape != (tree.node_count,):
            raise ValueError(f"keep mask has shape {mask.shape}, tree has {tree.node_count} nodes")
    return mask


def reconstruct(tree: ComponentTree, keep: KeepPredicate) -> np.ndarray:
    """Direct rule: each vertex takes the level of its lowest kept ancestor-or-self.

    A predicate rejecting the root is overridden (the root is the universal
    fallback) and RECONSTRUCT_DIAGNOSTICS["root_overrides"] is incremented.
    """
    mask = keep_mask(tree, keep)
    if not mask[tree.root]:
        RECONSTRUCT_DIAGNOSTICS["root_overrides"] += 1
        logger.debug("reconstruct: keep predicate rejected the root, overridden")
        mask[tree.root] = True
    target = list(range(tree.node_count))
    par = tree.parent.tolist()
    kept = mask.tolist()
    for n in range(tree.node_count - 2, -1, -1):
        if not kept[n]:
            target[n] = target[par[n]]
    return tree.level[np.asarray(target, dtype=np.int64)][tree.node_of_vertex]


def tree_stats(tree: ComponentTree) -> dict:
    return {
        "nodes": tree.node_count,
        "leaves": int(tree.is_leaf.sum()),
        "depth": int(tree.depth.max()),
    }


def dump(tree: ComponentTree) -> str:
    """Debug text, one "node parent level" line per node."""
    return "".join(
        f"{n} {p} {lvl:g}\n" for n, (p, lvl) in enumerate(zip(tree.parent.tolist(), tree.level.tolist()))
    )
