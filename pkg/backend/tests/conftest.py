"""Shared fixtures and hypothesis strategies."""

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from app.hierarchy.component_tree import ComponentTree, Polarity, TreeKind
from app.imaging.image import Image

settings.register_profile("shapespace", deadline=None, max_examples=50)
settings.load_profile("shapespace")


def image_strategy(max_side: int = 8, max_value: int = 6):
    """Small images with few gray levels, so plateaus and ties are frequent."""
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(
        lambda s: arrays(np.uint8, s, elements=st.integers(0, max_value))
    ).map(Image)


def chain_tree(length: int) -> ComponentTree:
    """A path-shaped tree 0 -> 1 -> ... -> length-1 (the root), one vertex per node.

    Its shape space is the path graph 0 - 1 - ... - length-1.
    """
    parent = np.minimum(np.arange(1, length + 1), length - 1)
    return ComponentTree(
        parent=parent.astype(np.int64),
        level=np.arange(length, dtype=np.float64),
        node_of_vertex=np.arange(length, dtype=np.int64),
        polarity=Polarity.MIN,
        kind=TreeKind.MIN,
    )


def block_image(rng: np.random.Generator, cells: int = 3, cell: int = 6) -> Image:
    """Well-composed test image.

    A background with a one-pixel gutter around a grid of constant cells;
    some cells hold a smaller inner square of another value. No 2x2 window
    ever shows a diagonal configuration.
    """
    background = int(rng.integers(60, 196))
    side = cells * (cell + 1) + 1
    pixels = np.full((side, side), background, dtype=np.uint8)
    for i in range(cells):
        for j in range(cells):
            y, x = 1 + i * (cell + 1), 1 + j * (cell + 1)
            pixels[y:y + cell, x:x + cell] = rng.integers(0, 256)
            if rng.random() < 0.5:
                pixels[y + 2:y + cell - 2, x + 2:x + cell - 2] = rng.integers(0, 256)
    return Image(pixels)


@pytest.fixture
def rng():
    return np.random.default_rng(20161017)


@pytest.fixture
def path_image():
    """1x4 image [0, 3, 1, 2]."""
    return Image.from_values(4, 1, [0, 3, 1, 2])


@pytest.fixture
def nested_square_image():
    """5x5 zeros, a 3x3 block at 2 with its center pixel at 1."""
    pixels = np.zeros((5, 5), dtype=np.uint8)
    pixels[1:4, 1:4] = 2
    pixels[2, 2] = 1
    return Image(pixels)
