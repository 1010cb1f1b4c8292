"""
Filter Configuration Module
FilterSpec model, named presets and JSON persistence for shape-space filters
"""

import json
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

AttributeName = Literal[
    "area", "contour_length", "inertia", "inertia_over_area2", "circularity", "elongation"
]


class FilterSpec(BaseModel):
    """Complete description of one shape-space filter"""
    tree_kind: Literal["min", "max", "tos"] = Field(
        default="tos",
        description="Base tree: min-tree, max-tree or tree of shapes"
    )
    connectivity: Literal[4, 8] = Field(
        default=4,
        description="Pixel connectivity for min/max trees (the tree of shapes uses C4/C8 pairs)"
    )
    attribute: AttributeName = Field(
        default="circularity",
        description="Shape attribute computed on every node"
    )
    orientation: Optional[Literal["relevant_is_low", "relevant_is_high"]] = Field(
        default=None,
        description="Which end of the attribute is relevant; None uses the attribute's default"
    )
    combine_with: List[AttributeName] = Field(
        default_factory=list,
        description="Extra attributes combined with the main one (normalized, equal weights)"
    )
    strategy: Literal["threshold", "closing", "extinction"] = Field(
        default="extinction",
        description="Filtering strategy in shape space"
    )
    param: float = Field(
        default=0.0,
        description="λ for threshold/closing, ε for extinction, in raw attribute units"
    )
    aa_kind: Literal["height", "node_count", "pixel_area"] = Field(
        default="height",
        description="Second-level attribute driving the closing"
    )
    mode: Literal["preserve", "remove"] = Field(
        default="preserve",
        description="Keep only the selected blobs, or remove them"
    )
    template_id: Optional[str] = Field(
        default=None,
        description="Preset this spec was created from"
    )

    @field_validator("param")
    @classmethod
    def validate_param(cls, v):
        if not math.isfinite(v):
            raise ValueError("param must be finite")
        return v

    @field_validator("connectivity", mode="before")
    @classmethod
    def coerce_connectivity(cls, v):
        return int(v) if isinstance(v, str) and v.isdigit() else v

    @model_validator(mode="after")
    def validate_sign(self):
        # thresholds live in the signed oriented domain; closing and
        # extinction parameters are heights, counts or areas
        if self.strategy != "threshold" and self.param < 0:
            raise ValueError(f"{self.strategy} parameter must be >= 0")
        return self

    def to_strategy(self):
        from app.shapespace.strategies import Closing, Extinction, Threshold

        if self.strategy == "threshold":
            return Threshold(self.param)
        if self.strategy == "closing":
            return Closing(self.aa_kind, self.param)
        return Extinction(self.param)


# Predefined templates
TEMPLATES: Dict[str, dict] = {
    "round_leveling": {
        "tree_kind": "min",
        "connectivity": 4,
        "attribute": "circularity",
        "strategy": "closing",
        "param": 0.05,
        "aa_kind": "height",
        "mode": "preserve",
    },
    "round_shaping": {
        "tree_kind": "tos",
        "attribute": "circularity",
        "strategy": "extinction",
        "param": 0.05,
        "mode": "preserve",
    },
    "compact_shaping": {
        "tree_kind": "tos",
        "attribute": "circularity",
        "combine_with": ["inertia_over_area2"],
        "strategy": "extinction",
        "param": 0.1,
        "mode": "preserve",
    },
    "area_closing": {
        "tree_kind": "min",
        "connectivity": 4,
        "attribute": "area",
        "orientation": "relevant_is_high",
        "strategy": "threshold",
        "param": -20,
        "mode": "preserve",
    },
    "area_opening": {
        "tree_kind": "max",
        "connectivity": 4,
        "attribute": "area",
        "orientation": "relevant_is_high",
        "strategy": "threshold",
        "param": -20,
        "mode": "preserve",
    },
}


def load_config(path: Union[str, Path]) -> FilterSpec:
    """
    Load a FilterSpec from a JSON file.

    Args:
        path: JSON file written by save_config

    Returns:
        FilterSpec instance

    Raises:
        FileNotFoundError: path does not exist
    """
    with open(Path(path), "r") as f:
        config_data = json.load(f)
    return FilterSpec(**config_data)


def save_config(path: Union[str, Path], spec: FilterSpec) -> None:
    """
    Save a FilterSpec as indented JSON.

    Args:
        path: destination file (parent directories are created)
        spec: FilterSpec to save
    """
    config_path = Path(path)
    config_path.parent.mkdir(parents=True, exist_ok=True)
    with open(config_path, "w") as f:
        f.write(spec.model_dump_json(indent=2))


def apply_template(template_id: str, **overrides) -> FilterSpec:
    """
    Create a FilterSpec from a preset.

    Args:
        template_id: one of TEMPLATES
        overrides: fields replacing the preset values

    Returns:
        FilterSpec with template settings

    Raises:
        ValueError: If template_id not found
    """
    if template_id not in TEMPLATES:
        raise ValueError(
            f"Template '{template_id}' not found. "
            f"Available: {list(TEMPLATES.keys())}"
        )
    data = {**TEMPLATES[template_id], **overrides}
    return FilterSpec(**data, template_id=template_id)


def validate_config(spec: FilterSpec) -> Tuple[bool, Optional[str]]:
    """
    Cross-field checks that pydantic does not cover.

    Returns:
        (is_valid, error_message)
    """
    if spec.attribute in spec.combine_with:
        return False, f"'{spec.attribute}' is combined with itself"
    if len(set(spec.combine_with)) != len(spec.combine_with):
        return False, "combine_with lists an attribute twice"
    if spec.aa_kind != "height" and spec.strategy != "closing":
        return False, "aa_kind only applies to the closing strategy"
    if spec.combine_with and spec.orientation is not None:
        return False, "orientation cannot be forced on a combined attribute"
    return True, None
