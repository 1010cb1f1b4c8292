"""Raw image moments of every node, accumulated from the leaves to the root."""

from dataclasses import dataclass

import numpy as np

from app.errors import ParameterError
from app.hierarchy.component_tree import ComponentTree, accumulate


@dataclass(frozen=True, eq=False)
class Moments:
    """Pixel count and first/second coordinate sums, one entry per node
    (or scalars, for a single node taken with `moments[n]`)."""
    n: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sxx: np.ndarray
    syy: np.ndarray
    sxy: np.ndarray

    def __getitem__(self, node: int) -> "Moments":
        return Moments(*(float(getattr(self, f)[node]) for f in ("n", "sx", "sy", "sxx", "syy", "sxy")))

    def __len__(self) -> int:
        return len(self.n)

    @property
    def centroid(self):
        return self.sx / self.n, self.sy / self.n

    # central moments with the n/12 pixel-spread term on each axis
    @property
    def mu20(self):
        return self.sxx - self.sx * self.sx / self.n + self.n / 12.0

    @property
    def mu02(self):
        return self.syy - self.sy * self.sy / self.n + self.n / 12.0

    @property
    def mu11(self):
        return self.sxy - self.sx * self.sy / self.n


def accumulate_moments(tree: ComponentTree) -> Moments:
    """Moments of every node of a tree built over a pixel grid."""
    if tree.domain is None:
        raise ParameterError("moments need a tree built over a pixel grid")
    height, width = tree.domain
    ys, xs = np.divmod(np.arange(tree.vertex_count, dtype=np.float64), width)
    nov = tree.node_of_vertex
    size = tree.node_count

    def own(weights):
        return np.bincount(nov, weights=weights, minlength=size)

    sums = [
        tree.own_vertex_count.astype(np.float64),
        own(xs), own(ys), own(xs * xs), own(ys * ys), own(xs * ys),
    ]
    return Moments(*(accumulate(tree, s) for s in sums))
