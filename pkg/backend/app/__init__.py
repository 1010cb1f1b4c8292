"""Shape-space morphological filtering: component trees, trees of shapes and
connected filters computed on the tree viewed as a node-weighted graph."""

__version__ = "0.3.0"
