import time

import pytest

from app.config.filter_config import FilterSpec
from app.imaging.image import Image
from app.shapespace.pipeline import run_shape_filter


def timed(f, spec):
    start = time.perf_counter()
    outcome = run_shape_filter(f, spec)
    return time.perf_counter() - start, outcome


@pytest.mark.parametrize("spec", [
    FilterSpec(tree_kind="min", attribute="area", strategy="extinction", param=10),
    FilterSpec(tree_kind="min", attribute="circularity", strategy="closing", aa_kind="height", param=0.05),
])
def test_min_tree_filter_on_512_square(rng, spec):
    f = Image(rng.integers(0, 256, size=(512, 512)))
    seconds, outcome = timed(f, spec)
    assert outcome.image.shape == (512, 512)
    assert seconds < 5.0


def test_tree_of_shapes_filter_on_128_square(rng):
    f = Image(rng.integers(0, 256, size=(128, 128)))
    spec = FilterSpec(tree_kind="tos", attribute="circularity", strategy="extinction", param=0.05)
    seconds, outcome = timed(f, spec)
    assert outcome.image.shape == (128, 128)
    assert seconds < 30.0
