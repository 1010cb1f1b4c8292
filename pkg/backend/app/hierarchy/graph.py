"""
Node-weighted graphs
Adjacency is stored in CSR form (indptr/indices) with each neighbor list
sorted by vertex id, so every traversal order is reproducible.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np

from app.errors import MalformedGraphError


@dataclass(frozen=True, eq=False)
class NodeWeightedGraph:
    """Undirected graph whose vertices carry a real weight.

    `shape` is set when the vertices are the pixels of a (height, width)
    grid in row-major order; vertex v then sits at (x, y) = (v % width, v // width).
    """
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if len(self.indptr) != len(self.weights) + 1:
            raise MalformedGraphError(
                f"indptr has {len(self.indptr)} entries for {len(self.weights)} vertices"
            )
        for name in ("indptr", "indices", "weights"):
            getattr(self, name).setflags(write=False)

    @property
    def vertex_count(self) -> int:
        return len(self.weights)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Each undirected edge once, as (u, v) with u < v."""
        for u in range(self.vertex_count):
            for v in self.neighbors(u).tolist():
                if u < v:
                    yield u, v

    def with_weights(self, weights: np.ndarray) -> "NodeWeightedGraph":
        return NodeWeightedGraph(self.indptr, self.indices, np.asarray(weights, dtype=np.float64).copy(), self.shape)

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[Tuple[int, int]],
        weights: Iterable[float],
        shape: Optional[Tuple[int, int]] = None,
    ) -> "NodeWeightedGraph":
        """Build a graph from an undirected edge list.

        Raises:
            MalformedGraphError: on self-loops, out-of-range endpoints or a
                weight count that does not match `vertex_count`
        """
        weights = np.asarray(list(weights), dtype=np.float64)
        if len(weights) != vertex_count:
            raise MalformedGraphError(f"{len(weights)} weights for {vertex_count} vertices")
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if len(pairs):
            if (pairs < 0).any() or (pairs >= vertex_count).any():
                raise MalformedGraphError("edge endpoint out of range")
            if (pairs[:, 0] == pairs[:, 1]).any():
                raise MalformedGraphError("self-loop")
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        indptr, indices = csr_from_pairs(vertex_count, src, dst)
        return cls(indptr, indices, weights, shape)


def csr_from_pairs(vertex_count: int, src: np.ndarray, dst: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Directed pairs -> (indptr, indices), duplicates dropped, rows sorted."""
    if len(src):
        keys = np.unique(src.astype(np.int64) * vertex_count + dst.astype(np.int64))
        src, dst = np.divmod(keys, vertex_count)
    counts = np.bincount(src, minlength=vertex_count) if len(src) else np.zeros(vertex_count, dtype=np.int64)
    indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, np.asarray(dst, dtype=np.int64)
