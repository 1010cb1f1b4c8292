import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.attributes.moments import accumulate_moments
from app.attributes.shape_attributes import (
    AttributeKind,
    AttributeMap,
    Orientation,
    SHAPE_ATTRIBUTES,
    attribute,
    combine_attributes,
    contour_lengths,
    parse_attribute_kind,
)
from app.errors import AttributeKindError, ParameterError, TreeMismatchError
from app.hierarchy.component_tree import Polarity, build_component_tree, vertex_sets
from app.hierarchy.tree_of_shapes import build_tree_of_shapes
from app.imaging.image import Connectivity, Image, grid_graph

from .conftest import chain_tree, image_strategy


def single_shape(mask: np.ndarray):
    """Max-tree of a binary image: node 0 is the shape, node 1 the root."""
    img = Image(mask.astype(np.uint8))
    t = build_component_tree(grid_graph(img, Connectivity.C8), Polarity.MAX)
    assert t.node_count == 2
    return t


def canvas(h=9, w=9):
    return np.zeros((h, w), dtype=bool)


# ============================================================================
# Moments
# ============================================================================

def test_moments_single_pixel():
    mask = canvas()
    mask[4, 3] = True
    m = accumulate_moments(single_shape(mask))[0]
    assert (m.n, m.sx, m.sy, m.sxx, m.syy, m.sxy) == (1, 3, 4, 9, 16, 12)


def test_moments_block_at_origin():
    mask = canvas()
    mask[:5, :5] = True
    t = single_shape(mask)
    m = accumulate_moments(t)
    assert (m[0].n, m[0].sx, m[0].sy) == (25, 50, 50)
    assert (m[0].sxx, m[0].syy, m[0].sxy) == (150, 150, 100)
    assert m[t.root].n == 81
    assert m[0].centroid == (2.0, 2.0)
    assert m[t.root].centroid == (4.0, 4.0)


def test_moments_need_pixel_grid():
    with pytest.raises(ParameterError):
        accumulate_moments(chain_tree(3))


@given(image_strategy(max_side=7))
def test_moments_increase_towards_root(img):
    t = build_component_tree(grid_graph(img, Connectivity.C4), Polarity.MIN)
    m = accumulate_moments(t)
    up = t.parent[:-1]
    for field in ("n", "sx", "sy", "sxx", "syy", "sxy"):
        values = getattr(m, field)
        assert np.all(values[:-1] <= values[up])
    assert m.n[t.root] == img.width * img.height


# ============================================================================
# Attributes
# ============================================================================

def test_square_attributes():
    mask = canvas()
    mask[2:7, 2:7] = True
    t = single_shape(mask)
    inertia = attribute(t, "inertia").values[0]
    assert inertia == pytest.approx(100 + 25 / 6)
    assert attribute(t, "inertia_over_area2").values[0] == pytest.approx((100 + 25 / 6) / 625)
    assert attribute(t, "circularity").values[0] == pytest.approx(625 / (2 * math.pi * inertia))
    assert attribute(t, "circularity").values[0] == pytest.approx(0.955, abs=1e-3)
    assert attribute(t, "elongation").values[0] == pytest.approx(1.0)
    assert attribute(t, "area").values[0] == 25
    assert attribute(t, "contour_length").values[0] == 20


def test_cross_attributes():
    mask = canvas()
    mask[4, 3:6] = True
    mask[3:6, 4] = True
    t = single_shape(mask)
    assert attribute(t, "inertia").values[0] == pytest.approx(4 + 5 / 6)
    assert attribute(t, "circularity").values[0] == pytest.approx(0.823, abs=1e-3)
    assert attribute(t, "contour").values[0] == 12


def test_segment_elongation():
    mask = canvas()
    mask[4, 2:7] = True
    t = single_shape(mask)
    assert attribute(t, "elongation").values[0] == pytest.approx(5.0)
    assert attribute(t, "contour_length").values[0] == 12


def test_contour_counts_image_border():
    img = Image(np.zeros((3, 4), dtype=np.uint8))
    t = build_component_tree(grid_graph(img, Connectivity.C4), Polarity.MIN)
    assert contour_lengths(t).tolist() == [14]


@given(image_strategy(max_side=7), st.sampled_from([Polarity.MIN, Polarity.MAX]))
def test_contour_length_matches_direct_count(img, polarity):
    t = build_component_tree(grid_graph(img, Connectivity.C4), polarity)
    vs = vertex_sets(t)
    lengths = contour_lengths(t)
    for n in range(t.node_count):
        mask = np.zeros(img.shape, dtype=bool)
        mask.ravel()[vs.members(n)] = True
        padded = np.pad(mask, 1)
        sides = (padded[1:, :] != padded[:-1, :]).sum() + (padded[:, 1:] != padded[:, :-1]).sum()
        assert lengths[n] == sides


def test_default_orientations():
    t = single_shape(np.eye(5, dtype=bool))
    assert attribute(t, "circularity").orientation is Orientation.RELEVANT_IS_HIGH
    assert attribute(t, "area").orientation is Orientation.RELEVANT_IS_HIGH
    assert attribute(t, "elongation").orientation is Orientation.RELEVANT_IS_LOW
    c = attribute(t, "circularity")
    np.testing.assert_array_equal(c.oriented(), -c.values)
    forced = attribute(t, "circularity", Orientation.RELEVANT_IS_LOW)
    np.testing.assert_array_equal(forced.oriented(), forced.values)


def test_unknown_attribute():
    with pytest.raises(AttributeKindError):
        parse_attribute_kind("texture")
    t = single_shape(np.eye(5, dtype=bool))
    with pytest.raises(AttributeKindError):
        attribute(t, "height")
    assert parse_attribute_kind("contour") is AttributeKind.CONTOUR_LENGTH


@given(image_strategy(max_side=8))
def test_attribute_ranges_and_identity(img):
    t = build_tree_of_shapes(img)
    m = accumulate_moments(t)
    circ = attribute(t, "circularity", moments=m).values
    elong = attribute(t, "elongation", moments=m).values
    i_a2 = attribute(t, "inertia_over_area2", moments=m).values
    area = attribute(t, "area", moments=m).values
    assert np.all((circ > 0) & (circ <= 1))
    assert np.all(elong >= 1 - 1e-12)
    unclamped = circ < 1
    np.testing.assert_allclose(circ[unclamped] * 2 * math.pi * i_a2[unclamped], 1.0)
    assert np.all(area[:-1] < area[t.parent[:-1]])


@given(image_strategy(max_side=6), st.integers(1, 4), st.integers(1, 4))
def test_translation_invariance(img, dy, dx):
    h, w = img.shape
    background = int(np.median(img.pixels))
    big = np.full((h + 4, w + 4), background, dtype=np.uint8)
    big[2:2 + h, 2:2 + w] = img.pixels
    moved = np.full((h + 4 + dy, w + 4 + dx), background, dtype=np.uint8)
    moved[2 + dy:2 + dy + h, 2 + dx:2 + dx + w] = img.pixels
    a = build_tree_of_shapes(Image(big))
    b = build_tree_of_shapes(Image(moved))
    for kind in ("circularity", "elongation", "inertia_over_area2"):
        va = attribute(a, kind).values[:-1]
        vb = attribute(b, kind).values[:-1]
        np.testing.assert_allclose(np.sort(va), np.sort(vb), rtol=1e-7)


def test_disk_bound_on_convex_corpus():
    ys, xs = np.mgrid[0:41, 0:41]
    shapes = [
        (xs - 20) ** 2 + (ys - 20) ** 2 <= 15 ** 2,
        (abs(xs - 20) <= 8) & (abs(ys - 20) <= 8),
        (abs(xs - 20) <= 1) | (abs(ys - 20) <= 1),
    ]
    for mask in shapes:
        t = single_shape(mask)
        assert attribute(t, "inertia_over_area2").values[0] >= 1 / (2 * math.pi) - 1e-9


# ============================================================================
# Maps, combination, custom values
# ============================================================================

def test_from_values_and_mismatch():
    t = chain_tree(3)
    amap = AttributeMap.from_values(t, [3, 1, 2])
    assert amap.kind is AttributeKind.CUSTOM
    assert amap.refers_to(t) and not amap.refers_to(chain_tree(3))
    with pytest.raises(TreeMismatchError):
        AttributeMap.from_values(t, [1, 2])


def test_combine_normalizes_oriented_values():
    t = chain_tree(3)
    low = AttributeMap.from_values(t, [0, 5, 10], Orientation.RELEVANT_IS_LOW)
    high = AttributeMap.from_values(t, [1, 2, 3], Orientation.RELEVANT_IS_HIGH)
    combined = combine_attributes([low, high])
    assert combined.kind is AttributeKind.COMBINED
    assert combined.orientation is Orientation.RELEVANT_IS_LOW
    np.testing.assert_allclose(combined.values, [1.0, 1.0, 1.0])
    weighted = combine_attributes([low, high], weights=[2.0, 0.0])
    np.testing.assert_allclose(weighted.values, [0.0, 1.0, 2.0])


def test_combine_errors():
    t = chain_tree(3)
    with pytest.raises(AttributeKindError):
        combine_attributes([])
    a = AttributeMap.from_values(t, [0, 1, 2])
    with pytest.raises(TreeMismatchError):
        combine_attributes([a, AttributeMap.from_values(chain_tree(3), [0, 1, 2])])
    with pytest.raises(AttributeKindError):
        combine_attributes([a], weights=[1.0, 2.0])


def test_every_shape_attribute_has_a_default_orientation():
    t = single_shape(np.eye(4, dtype=bool))
    for kind in SHAPE_ATTRIBUTES:
        assert attribute(t, kind).values.shape == (2,)
