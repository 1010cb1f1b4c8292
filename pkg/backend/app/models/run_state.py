"""
Pipeline Run State
Tracks the stages of one shape-filter run: status, timing and small outputs
"""

import time
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

STAGES = ("tree", "attribute", "shape_space", "second_tree", "strategy", "reconstruct")


class RunStatus(str, Enum):
    """Pipeline run status."""
    RUNNING = "RUNNING"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


class StageStep(BaseModel):
    """One pipeline stage."""
    name: str
    status: str = "pending"  # "pending", "running", "completed", "failed"
    started: Optional[float] = None
    seconds: Optional[float] = None
    output: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None


class PipelineRun(BaseModel):
    """
    One run of the shape-filter pipeline.

    Stages are marked running/completed in order; `get_summary()` is what
    gets logged at the end.
    """
    spec: Dict[str, Any] = Field(default_factory=dict)
    status: RunStatus = RunStatus.RUNNING
    started_at: datetime = Field(default_factory=datetime.now)
    completed_at: Optional[datetime] = None
    steps: List[StageStep] = Field(default_factory=lambda: [StageStep(name=s) for s in STAGES])

    def _step(self, name: str) -> StageStep:
        for step in self.steps:
            if step.name == name:
                return step
        raise KeyError(name)

    def mark_step_running(self, name: str):
        step = self._step(name)
        step.status = "running"
        step.started = time.perf_counter()

    def mark_step_completed(self, name: str, **output):
        step = self._step(name)
        step.status = "completed"
        step.seconds = time.perf_counter() - (step.started or time.perf_counter())
        step.output.update(output)

    def mark_step_failed(self, name: str, error: str):
        step = self._step(name)
        step.status = "failed"
        step.error = error
        self.status = RunStatus.FAILED

    def complete(self):
        self.status = RunStatus.COMPLETED
        self.completed_at = datetime.now()

    def get_summary(self) -> Dict[str, Any]:
        """Status plus per-stage seconds and outputs."""
        done = sum(1 for step in self.steps if step.status == "completed")
        return {
            "status": self.status.value,
            "progress": f"{done}/{len(self.steps)} stages",
            "stages": {
                step.name: {"seconds": round(step.seconds, 4) if step.seconds is not None else None, **step.output}
                for step in self.steps
            },
        }
