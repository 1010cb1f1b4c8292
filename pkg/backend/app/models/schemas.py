"""
Wire Schemas
JSON structures emitted by the CLI and the HTTP service
"""

import json
import math
from typing import List, Literal, Union

from pydantic import BaseModel, Field, field_validator


# ============================================================================
# Detection output
# ============================================================================

class DetectionRecord(BaseModel):
    """One detected object, one JSON line. Field order is the line's key order."""
    id: int = Field(description="Node id in the tree of shapes")
    level: int = Field(description="Gray level of the shape")
    area: int = Field(ge=1, description="Pixel count")
    centroid: List[float] = Field(description="[x, y] in pixel coordinates")
    attribute: float = Field(description="Raw attribute value of the shape")
    extinction: Union[Literal["inf"], float] = Field(description="Extinction value, 'inf' for the first minimum")
    attr: str = Field(description="Attribute that produced the detection")

    @field_validator("extinction", mode="before")
    @classmethod
    def encode_infinity(cls, v):
        if isinstance(v, float) and math.isinf(v):
            return "inf"
        return v

    @field_validator("centroid")
    @classmethod
    def validate_centroid(cls, v):
        if len(v) != 2:
            raise ValueError("centroid must be [x, y]")
        return v

    def to_json_line(self) -> str:
        return json.dumps(self.model_dump(), separators=(", ", ": "))


# ============================================================================
# Tree statistics and attribute ranges
# ============================================================================

class TreeStats(BaseModel):
    """Size of a tree"""
    nodes: int = Field(description="Node count")
    leaves: int = Field(description="Leaf count")
    depth: int = Field(description="Nodes on the longest root-to-leaf path")

    def to_lines(self) -> str:
        return f"nodes {self.nodes}\nleaves {self.leaves}\ndepth {self.depth}\n"


class RangeReport(BaseModel):
    """Attribute range over the nodes of the base tree, to help choose a parameter"""
    attribute: str
    orientation: str
    raw_min: float
    raw_max: float
    oriented_min: float
    oriented_max: float

    def to_lines(self) -> str:
        return (
            f"attribute {self.attribute}\norientation {self.orientation}\n"
            f"raw_min {self.raw_min:.10g}\nraw_max {self.raw_max:.10g}\n"
            f"oriented_min {self.oriented_min:.10g}\noriented_max {self.oriented_max:.10g}\n"
        )
