"""Run configuration shared by the pipeline and the command line."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class RunConfig:
    horizon: int = 200
    primitive_steps: int = 24
    period_window: int = 8
    digits: int = 5000
    b_values: List[int] = field(default_factory=lambda: [2])
    emit: Optional[str] = None  # directory for CSV and PNG output

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.digits < 50:
            raise ValueError("digits must be >= 50")
        if self.primitive_steps < 1:
            raise ValueError("steps must be >= 1")
        if self.period_window < 1:
            raise ValueError("window must be >= 1")
        for b in self.b_values:
            if abs(b) < 2:
                raise ValueError(f"|b| must be >= 2, got {b}")
