"""
End-to-end pipelines on images.

shape_filter: tree -> attribute -> shape space -> second tree -> strategy ->
kept nodes -> reconstruction. With a min-tree or max-tree the result is a
leveling of the input, with the tree of shapes it is a shaping.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.attributes.moments import Moments, accumulate_moments
from app.attributes.shape_attributes import (
    AttributeKind,
    AttributeMap,
    attribute,
    combine_attributes,
    parse_attribute_kind,
)
from app.config.filter_config import FilterSpec
from app.config.settings import get_settings
from app.errors import DimensionMismatchError, ParameterError
from app.hierarchy.component_tree import (
    ComponentTree,
    Polarity,
    TreeKind,
    accumulate,
    build_component_tree,
    reconstruct,
)
from app.hierarchy.tree_of_shapes import build_tree_of_shapes
from app.imaging.image import Connectivity, Image, grid_graph
from app.models.run_state import PipelineRun
from app.shapespace.shape_space import extinction_values, make_shape_space, second_tree
from app.shapespace.strategies import ShapeFilterResult, filter_shape_space

logger = logging.getLogger(__name__)


def build_tree(f: Image, tree_kind: Union[str, TreeKind], connectivity: int = 4) -> ComponentTree:
    tree_kind = TreeKind(tree_kind)
    if tree_kind is TreeKind.TOS:
        return build_tree_of_shapes(f)
    polarity = Polarity.MIN if tree_kind is TreeKind.MIN else Polarity.MAX
    return build_component_tree(grid_graph(f, Connectivity(connectivity)), polarity)


def spec_attribute(tree: ComponentTree, spec: FilterSpec, moments: Optional[Moments] = None) -> AttributeMap:
    """The attribute a spec asks for, combined with `combine_with` if any."""
    if moments is None and spec.attribute != "contour_length":
        moments = accumulate_moments(tree)
    main = attribute(tree, spec.attribute, spec.orientation, moments=moments)
    if not spec.combine_with:
        return main
    extra = [attribute(tree, k, moments=moments) for k in spec.combine_with]
    return combine_attributes([main, *extra])


def to_image(values: np.ndarray, shape: Tuple[int, int]) -> Image:
    return Image(np.clip(np.rint(values), 0, 255).astype(np.uint8).reshape(shape))


def select_nodes(tree: ComponentTree, selected: np.ndarray, mode: str) -> np.ndarray:
    """Keep mask on T for a selection of T-nodes.

    preserve keeps the selection, remove keeps its complement; the root is
    always kept. On min-trees and max-trees the mask is closed upwards so the
    reconstruction stays a leveling: preserve keeps every ancestor of a
    selected node, remove also drops everything below a dropped node.
    """
    monotone = tree.kind in (TreeKind.MIN, TreeKind.MAX)
    if mode == "preserve":
        keep = selected.copy()
        if monotone:
            keep = accumulate(tree, selected.astype(np.int64)) > 0
    elif mode == "remove":
        keep = ~selected
        keep[tree.root] = True
        if monotone:
            flags = keep.tolist()
            par = tree.parent.tolist()
            for n in range(tree.node_count - 2, -1, -1):
                flags[n] = flags[n] and flags[par[n]]
            keep = np.asarray(flags, dtype=bool)
    else:
        raise ParameterError(f"unknown mode '{mode}'")
    keep[tree.root] = True
    return keep


@dataclass(frozen=True, eq=False)
class FilterOutcome:
    image: Image
    tree: ComponentTree
    attribute: AttributeMap
    result: ShapeFilterResult
    keep: np.ndarray
    run: PipelineRun


def run_shape_filter(f: Image, spec: FilterSpec) -> FilterOutcome:
    """shape_filter keeping every intermediate product."""
    run = PipelineRun(spec=spec.model_dump())
    stage = "tree"
    try:
        run.mark_step_running(stage)
        tree = build_tree(f, spec.tree_kind, spec.connectivity)
        run.mark_step_completed(stage, nodes=tree.node_count)

        stage = "attribute"
        run.mark_step_running(stage)
        amap = spec_attribute(tree, spec)
        run.mark_step_completed(stage, kind=amap.kind.value)

        stage = "shape_space"
        run.mark_step_running(stage)
        space = make_shape_space(tree, amap)
        run.mark_step_completed(stage, edges=space.graph.edge_count)

        stage = "second_tree"
        run.mark_step_running(stage)
        tt = second_tree(space)
        run.mark_step_completed(stage, nodes=tt.node_count, minima=int(tt.is_leaf.sum()))

        stage = "strategy"
        run.mark_step_running(stage)
        result = filter_shape_space(space, tt, spec.to_strategy())
        run.mark_step_completed(stage, survivors=len(result.survivors), selected=int(result.kept.sum()))

        stage = "reconstruct"
        run.mark_step_running(stage)
        keep = select_nodes(tree, result.kept, spec.mode)
        image = to_image(reconstruct(tree, keep), f.shape)
        run.mark_step_completed(stage, kept=int(keep.sum()))
    except Exception as e:
        run.mark_step_failed(stage, str(e))
        logger.error("shape filter failed at %s: %s", stage, e)
        raise
    run.complete()
    logger.info("shape filter run: %s", run.get_summary())
    return FilterOutcome(image, tree, amap, result, keep, run)


def shape_filter(f: Image, spec: FilterSpec) -> Image:
    return run_shape_filter(f, spec).image


def top_hat(f: Image, g: Image, signed: Optional[str] = None) -> Image:
    """|f - g| pixel-wise, or the signed difference "f-g" / "g-f".

    Raises:
        DimensionMismatchError: f and g differ in size
        ParameterError: a signed difference goes negative
    """
    if f.shape != g.shape:
        raise DimensionMismatchError(f"top-hat of {f.shape} and {g.shape}")
    a = f.pixels.astype(np.int16)
    b = g.pixels.astype(np.int16)
    if signed is None:
        diff = np.abs(a - b)
    elif signed in ("f-g", "g-f"):
        diff = a - b if signed == "f-g" else b - a
        if diff.min() < 0:
            raise ParameterError(f"signed top-hat {signed} is negative somewhere")
    else:
        raise ParameterError(f"unknown top-hat sign '{signed}'")
    return Image(diff.astype(np.uint8))


def attribute_filter(
    f: Image,
    tree_kind: str,
    kind: Union[str, AttributeKind],
    lam: float,
    connectivity: int = 4,
) -> Image:
    """Classical connected filter: keep the nodes whose raw attribute is >= lam
    (with their ancestors) and reconstruct. Area gives area openings/closings."""
    tree = build_tree(f, tree_kind, connectivity)
    amap = attribute(tree, kind)
    keep = select_nodes(tree, amap.values >= lam, "preserve")
    return to_image(reconstruct(tree, keep), f.shape)


def attribute_range(f: Image, spec: FilterSpec) -> dict:
    """Raw and oriented attribute extremes over the base tree."""
    tree = build_tree(f, spec.tree_kind, spec.connectivity)
    amap = spec_attribute(tree, spec)
    oriented = amap.oriented()
    return {
        "attribute": amap.kind.value,
        "orientation": amap.orientation.value,
        "raw_min": float(amap.values.min()),
        "raw_max": float(amap.values.max()),
        "oriented_min": float(oriented.min()),
        "oriented_max": float(oriented.max()),
    }


@dataclass(frozen=True)
class DetectedObject:
    node: int
    level: float
    area: int
    centroid: Tuple[float, float]
    attribute_value: float
    extinction: float
    kind: str


def _detect_one(tree: ComponentTree, moments: Moments, kind: AttributeKind, eps: float) -> List[DetectedObject]:
    amap = attribute(tree, kind, moments=moments)
    space = make_shape_space(tree, amap)
    tt = second_tree(space)
    depth = tree.depth
    found = []
    for rec in extinction_values(tt, space):
        if not rec.extinction >= eps:
            continue
        plateau = np.asarray(rec.plateau, dtype=np.int64)
        # deepest node of the plateau, smallest id on ties
        node = int(plateau[np.lexsort((plateau, -depth[plateau]))[0]])
        cx, cy = moments[node].centroid
        found.append(DetectedObject(
            node=node,
            level=float(tree.level[node]),
            area=int(moments.n[node]),
            centroid=(float(cx), float(cy)),
            attribute_value=float(amap.values[node]),
            extinction=float(rec.extinction),
            kind=kind.value,
        ))
    return found


def detect_objects(
    f: Image,
    kinds: Sequence[Union[str, AttributeKind]],
    eps: float,
    workers: Optional[int] = None,
) -> List[DetectedObject]:
    """Objects whose minimum survives extinction(eps) on the tree of shapes.

    Attributes are processed independently (in a thread pool when there are
    several); the result is sorted by decreasing extinction, then node id,
    then attribute name.
    """
    return detect_on_tree(build_tree_of_shapes(f), kinds, eps, workers)


def detect_on_tree(
    tree: ComponentTree,
    kinds: Sequence[Union[str, AttributeKind]],
    eps: float,
    workers: Optional[int] = None,
) -> List[DetectedObject]:
    """detect_objects on an already built tree of shapes."""
    if eps != eps or eps < 0:
        raise ParameterError(f"extinction threshold must be >= 0, got {eps}")
    kinds = [parse_attribute_kind(k) for k in kinds]
    if not kinds:
        raise ParameterError("no attribute given")
    moments = accumulate_moments(tree)
    workers = workers or get_settings().workers
    if len(kinds) == 1 or workers == 1:
        batches = [_detect_one(tree, moments, k, eps) for k in kinds]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(kinds))) as pool:
            batches = list(pool.map(lambda k: _detect_one(tree, moments, k, eps), kinds))
    found = [obj for batch in batches for obj in batch]
    found.sort(key=lambda o: (-o.extinction, o.node, o.kind))
    logger.info("detect_objects: %d objects for %s", len(found), [k.value for k in kinds])
    return found
