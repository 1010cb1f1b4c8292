"""
Brute-force component tree.

For every distinct level the threshold set is flood-filled from scratch and
each new connected component becomes a node. Quadratic, meant for checking
build_component_tree on small graphs.
"""

import logging
from collections import deque
from typing import Dict, FrozenSet, List

import numpy as np

from app.errors import DisconnectedGraphError, EmptyGraphError
from app.hierarchy.component_tree import ComponentTree, Polarity, TreeKind
from app.hierarchy.graph import NodeWeightedGraph

logger = logging.getLogger(__name__)


def _components(graph: NodeWeightedGraph, inside: np.ndarray) -> List[List[int]]:
    seen = np.zeros(graph.vertex_count, dtype=bool)
    comps = []
    for s in np.flatnonzero(inside).tolist():
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            v = queue.popleft()
            comp.append(v)
            for u in graph.neighbors(v).tolist():
                if inside[u] and not seen[u]:
                    seen[u] = True
                    queue.append(u)
        comps.append(comp)
    return comps


def brute_force_tree(graph: NodeWeightedGraph, polarity) -> ComponentTree:
    """Same contract and node numbering as build_component_tree."""
    polarity = Polarity(polarity)
    n = graph.vertex_count
    logger.debug("call to: brute_force_tree(%d vertices, %s)", n, polarity.value)
    if n == 0:
        raise EmptyGraphError("cannot build a tree on an empty graph")

    w = graph.weights
    key = w if polarity is Polarity.MIN else -w
    nodes: Dict[FrozenSet[int], int] = {}
    node_level: List[float] = []
    node_parent: List[int] = []
    current = np.full(n, -1, dtype=np.int64)
    first = np.full(n, -1, dtype=np.int64)

    for lam in np.unique(key).tolist():
        for comp in _components(graph, key <= lam):
            members = frozenset(comp)
            if members in nodes:
                continue
            nid = len(node_level)
            nodes[members] = nid
            node_level.append(float(w[comp].max() if polarity is Polarity.MIN else w[comp].min()))
            node_parent.append(nid)
            for v in comp:
                prev = current[v]
                if prev >= 0 and node_parent[prev] == prev:
                    node_parent[prev] = nid
                if first[v] < 0:
                    first[v] = nid
                current[v] = nid

    roots = [i for i, p in enumerate(node_parent) if p == i]
    if len(roots) != 1:
        raise DisconnectedGraphError(f"graph has {len(roots)} connected components")

    # renumber like the union-find builder: by oriented level, then by the
    # largest vertex id whose smallest node it is
    count = len(node_level)
    canon = np.full(count, -1, dtype=np.int64)
    np.maximum.at(canon, first, np.arange(n))
    levels = np.asarray(node_level)
    oriented = levels if polarity is Polarity.MIN else -levels
    perm = np.lexsort((canon, oriented))
    new_id = np.empty(count, dtype=np.int64)
    new_id[perm] = np.arange(count)
    parent = new_id[np.asarray(node_parent, dtype=np.int64)][perm]
    kind = TreeKind.MIN if polarity is Polarity.MIN else TreeKind.MAX
    return ComponentTree(parent, levels[perm], new_id[first], polarity, kind, graph.shape)
