import numpy as np
import pytest
from hypothesis import given, settings
from scipy import ndimage

from app.config.settings import get_settings
from app.errors import ParameterError
from app.hierarchy.component_tree import TreeKind, reconstruct, vertex_sets
from app.hierarchy.tree_of_shapes import border_median, build_tree_of_shapes, saturate
from app.imaging.image import Connectivity, Image

from .conftest import block_image, image_strategy


def shape_sets(tree):
    vs = vertex_sets(tree)
    return [frozenset(vs.members(n).tolist()) for n in range(tree.node_count)]


def swept_shapes(img):
    """Saturated components of every upper (C4) and lower (C8) threshold set of
    the image framed at its border median, leaving out those touching the frame."""
    height, width = img.shape
    framed = np.pad(img.pixels.astype(np.float64), 1, constant_values=border_median(img))
    shapes = {frozenset(range(height * width))}
    for level in np.unique(framed):
        for mask, conn in ((framed >= level, Connectivity.C4), (framed <= level, Connectivity.C8)):
            labels, count = ndimage.label(mask, structure=conn.structure)
            on_frame = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])).tolist())
            for lab in range(1, count + 1):
                if lab in on_frame:
                    continue
                fy, fx = np.nonzero(labels == lab)
                pixels = saturate((fy - 1) * width + (fx - 1), img.shape, conn.dual)
                shapes.add(frozenset(pixels.tolist()))
    return shapes


# ============================================================================
# Saturation
# ============================================================================

def test_saturate_fills_ring():
    ring = [y * 5 + x for y in range(1, 4) for x in range(1, 4) if (y, x) != (2, 2)]
    block = [y * 5 + x for y in range(1, 4) for x in range(1, 4)]
    assert saturate(ring, (5, 5), Connectivity.C4).tolist() == block
    assert saturate(ring, (5, 5), Connectivity.C8).tolist() == block


def test_saturate_is_idempotent_on_block():
    block = [y * 5 + x for y in range(1, 4) for x in range(1, 4)]
    assert saturate(block, (5, 5), Connectivity.C8).tolist() == block


def test_saturate_fills_single_interior_hole():
    everything_but_center = [p for p in range(25) if p != 12]
    assert saturate(everything_but_center, (5, 5), Connectivity.C4).tolist() == list(range(25))


def test_saturate_complement_connectivity_matters():
    # a diamond of four pixels around the center: the center is a C4 hole but
    # escapes diagonally under C8
    diamond = [7, 11, 13, 17]
    assert 12 in saturate(diamond, (5, 5), Connectivity.C4).tolist()
    assert 12 not in saturate(diamond, (5, 5), Connectivity.C8).tolist()


def test_saturate_does_not_fill_border_notch():
    # a U shape open to the image border keeps its notch outside
    u_shape = [0, 2, 5, 7, 10, 11, 12]
    assert 1 not in saturate(u_shape, (3, 5), Connectivity.C4).tolist()


# ============================================================================
# Tree of shapes
# ============================================================================

def test_nested_square_example(nested_square_image):
    t = build_tree_of_shapes(nested_square_image)
    assert t.kind is TreeKind.TOS
    assert t.node_count == 3
    assert t.parent.tolist() == [1, 2, 2]
    # not monotone along the branch
    assert t.level.tolist() == [1, 2, 0]
    assert vertex_sets(t).counts.tolist() == [1, 9, 25]


def test_constant_image_single_shape():
    t = build_tree_of_shapes(Image(np.full((4, 6), 9, dtype=np.uint8)))
    assert t.node_count == 1
    assert t.level.tolist() == [9]


def test_border_median():
    pixels = np.zeros((3, 3), dtype=np.uint8)
    pixels[0, :] = 10
    pixels[1, 1] = 200
    assert border_median(Image(pixels)) == 0


def test_size_guard(monkeypatch):
    monkeypatch.setenv("SHAPESPACE_TOS_MAX_PIXELS", "10")
    get_settings.cache_clear()
    try:
        with pytest.raises(ParameterError):
            build_tree_of_shapes(Image(np.zeros((4, 4), dtype=np.uint8)))
    finally:
        monkeypatch.delenv("SHAPESPACE_TOS_MAX_PIXELS")
        get_settings.cache_clear()


@settings(max_examples=60, deadline=None)
@given(image_strategy(max_side=8, max_value=4))
def test_round_trip_and_inclusion(img):
    t = build_tree_of_shapes(img)
    np.testing.assert_array_equal(reconstruct(t, lambda n: True), img.values)
    assert t.node_count <= img.width * img.height + 1

    sets = shape_sets(t)
    assert sets[t.root] == frozenset(range(img.width * img.height))
    for n in range(t.node_count - 1):
        assert sets[n] < sets[t.parent[n]]
    for a in range(t.node_count):
        for b in range(a + 1, t.node_count):
            inter = sets[a] & sets[b]
            assert not inter or inter == sets[a] or inter == sets[b]


def test_round_trip_seeded_corpus(rng):
    for _ in range(100):
        h, w = rng.integers(1, 65, size=2)
        img = Image(rng.integers(0, 256, size=(h, w)))
        t = build_tree_of_shapes(img)
        np.testing.assert_array_equal(reconstruct(t, np.ones(t.node_count, dtype=bool)), img.values)


def test_well_composed_shapes_are_hole_free_and_self_dual(rng):
    for _ in range(20):
        img = block_image(rng)
        t = build_tree_of_shapes(img)
        d = build_tree_of_shapes(img.complement())
        sets, dual_sets = shape_sets(t), shape_sets(d)
        assert sets == dual_sets
        np.testing.assert_array_equal(d.level, 255 - t.level)
        for s in sets:
            pixels = sorted(s)
            for conn in Connectivity:
                assert saturate(pixels, img.shape, conn).tolist() == pixels


@settings(max_examples=300, deadline=None)
@given(image_strategy(max_side=8, max_value=5))
def test_shapes_match_threshold_sweep(img):
    t = build_tree_of_shapes(img)
    sets = shape_sets(t)
    assert len(set(sets)) == t.node_count
    assert set(sets) == swept_shapes(img)


def test_shapes_match_threshold_sweep_seeded(rng):
    for _ in range(30):
        h, w = rng.integers(1, 17, size=2)
        img = Image(rng.integers(0, 256, size=(h, w)))
        assert set(shape_sets(build_tree_of_shapes(img))) == swept_shapes(img)
