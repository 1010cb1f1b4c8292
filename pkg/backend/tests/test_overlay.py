from types import SimpleNamespace

import numpy as np

from app.hierarchy.tree_of_shapes import build_tree_of_shapes
from app.imaging.overlay import PALETTE, inner_boundary, render_overlay


def test_inner_boundary_of_block():
    mask = np.zeros((5, 5), dtype=bool)
    mask[1:4, 1:4] = True
    expected = mask.copy()
    expected[2, 2] = False
    np.testing.assert_array_equal(inner_boundary(mask), expected)


def test_inner_boundary_counts_image_border():
    mask = np.ones((3, 4), dtype=bool)
    edge = inner_boundary(mask)
    assert not edge[1, 1:3].any()
    assert edge.sum() == 10


def test_render_overlay_colors_per_kind(nested_square_image):
    tree = build_tree_of_shapes(nested_square_image)
    found = [SimpleNamespace(node=0, kind="elongation"), SimpleNamespace(node=1, kind="circularity")]
    rgb = render_overlay(nested_square_image, tree, found, ["circularity", "elongation"])
    assert rgb.shape == (5, 5, 3) and rgb.dtype == np.uint8
    assert tuple(rgb[2, 2]) == PALETTE[1]
    assert tuple(rgb[1, 2]) == PALETTE[0]
    # untouched pixels stay gray
    assert tuple(rgb[0, 0]) == (nested_square_image.pixels[0, 0],) * 3
