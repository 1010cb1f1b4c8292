"""
Filtering strategies applied in shape space.

threshold(λ)        keep the T-nodes whose oriented attribute is <= λ
closing(aa, λ)      attribute closing of the weights driven by a second-level
                    attribute of TT
extinction(ε)       keep the minima whose extinction value is >= ε
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple, Union

import numpy as np

from app.attributes.shape_attributes import AttributeKind
from app.errors import ParameterError
from app.hierarchy.component_tree import ComponentTree, accumulate, reconstruct, vertex_sets
from app.shapespace.shape_space import (
    SECOND_ATTRIBUTES,
    ShapeSpace,
    best_leaves,
    extinction_values,
    second_attribute,
)

logger = logging.getLogger(__name__)


def _require(value: float, name: str, allow_negative: bool = False, allow_inf: bool = False):
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ParameterError(f"{name} must be finite, got {value}")
    if value < 0 and not allow_negative:
        raise ParameterError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class Threshold:
    lam: float

    def __post_init__(self):
        # oriented attributes are signed, so any real threshold is meaningful
        _require(self.lam, "threshold", allow_negative=True, allow_inf=True)


@dataclass(frozen=True)
class Closing:
    aa_kind: AttributeKind
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "aa_kind", AttributeKind(self.aa_kind))
        if self.aa_kind not in SECOND_ATTRIBUTES:
            raise ParameterError(f"closing needs a second-level attribute, got {self.aa_kind.value}")
        _require(self.lam, "closing parameter", allow_inf=True)


@dataclass(frozen=True)
class Extinction:
    eps: float

    def __post_init__(self):
        _require(self.eps, "extinction threshold", allow_inf=True)


Strategy = Union[Threshold, Closing, Extinction]


@dataclass(frozen=True, eq=False)
class ShapeFilterResult:
    """Outcome of a strategy on the T-nodes.

    filtered:  weights after filtering (the input weights for threshold)
    survivors: surviving minima as TT leaf ids, in rank order
    blobs:     T-nodes attached to each survivor
    kept:      T-node mask of the selected nodes (union of blobs, or the
               threshold set)
    """
    filtered: np.ndarray
    survivors: Tuple[int, ...]
    blobs: Dict[int, np.ndarray] = field(default_factory=dict)
    kept: np.ndarray = None


def closing_lifetime(tt: ComponentTree, aa) -> np.ndarray:
    """Largest value the second-level attribute takes while a TT node lasts.

    A node stands for the threshold sets between its level and its parent's.
    Height grows over that range up to level(parent) - min; the other
    attributes stay constant. The root lasts forever.
    """
    if aa.kind is AttributeKind.HEIGHT:
        lowest = tt.level - aa.values
        life = tt.level[tt.parent] - lowest
    else:
        life = aa.values.copy()
    life[tt.root] = math.inf
    return life


def _lowest_kept(tt: ComponentTree, kept: np.ndarray) -> np.ndarray:
    target = list(range(tt.node_count))
    par = tt.parent.tolist()
    flags = kept.tolist()
    for n in range(tt.node_count - 2, -1, -1):
        if not flags[n]:
            target[n] = target[par[n]]
    return np.asarray(target, dtype=np.int64)


def _closing(s: ShapeSpace, tt: ComponentTree, aa_kind: AttributeKind, lam: float):
    aa = second_attribute(tt, s, aa_kind)
    kept = closing_lifetime(tt, aa) >= lam
    kept[tt.root] = True
    filtered = reconstruct(tt, kept)
    return kept, filtered


def filter_shape_space(s: ShapeSpace, tt: ComponentTree, strategy: Strategy) -> ShapeFilterResult:
    """Apply a strategy; see the module docstring."""
    w = s.weights
    if isinstance(strategy, Threshold):
        return ShapeFilterResult(w.copy(), (), {}, w <= strategy.lam)

    members = vertex_sets(tt)
    if isinstance(strategy, Closing):
        kept_tt, filtered = _closing(s, tt, strategy.aa_kind, strategy.lam)
        below = accumulate(tt, kept_tt.astype(np.int64))
        minimal = kept_tt & (below == 1)
        best = best_leaves(tt)
        count = accumulate(tt, minimal.astype(np.int64)).tolist()
        par = tt.parent.tolist()
        rank = {r.minimum: r.rank for r in extinction_values(tt, s)}
        blobs = {}
        for x in np.flatnonzero(minimal).tolist():
            top = x
            while top != tt.root and count[par[top]] == 1:
                top = par[top]
            blobs[int(best[x])] = members.members(top)
        survivors = tuple(sorted(blobs, key=rank.get))
    elif isinstance(strategy, Extinction):
        eps = strategy.eps
        kept_tt, filtered = _closing(s, tt, AttributeKind.HEIGHT, eps)
        lowest = _lowest_kept(tt, kept_tt)
        par = tt.parent.tolist()
        lvl = tt.level.tolist()
        survivors = tuple(r.minimum for r in extinction_values(tt, s) if r.extinction >= eps)
        blobs = {}
        for m in survivors:
            top = int(lowest[m])
            limit = lvl[m] + eps
            while top != tt.root and lvl[par[top]] < limit:
                top = par[top]
            blobs[m] = members.members(top)
    else:
        raise ParameterError(f"unknown strategy {strategy!r}")

    kept = np.zeros(len(w), dtype=bool)
    for nodes in blobs.values():
        kept[nodes] = True
    logger.debug("filter_shape_space: %d survivors, %d nodes in blobs", len(survivors), int(kept.sum()))
    return ShapeFilterResult(filtered, survivors, blobs, kept)
