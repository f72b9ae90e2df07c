from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Any


@dataclass(frozen=True)
class RunContext:
    """Identity of the unit of work a log record belongs to."""

    run_id: str
    stage: str | None = None
    seed: int | None = None
    strategy: str | None = None
    num_generated: int | None = None

    def with_stage(self, stage: str) -> RunContext:
        return replace(self, stage=stage)

    def fields(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}
