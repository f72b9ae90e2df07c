from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class LabErrorCode(str, Enum):
    SHAPE_MISMATCH = "SHAPE_MISMATCH"
    DOMAIN_ERROR = "DOMAIN_ERROR"  # log of non-positive entry, zero vector, ...
    INVALID_ARGUMENT = "INVALID_ARGUMENT"
    MISSING_GRAD = "MISSING_GRAD"
    CONFIG_INVALID = "CONFIG_INVALID"
    FORMAT_ERROR = "FORMAT_ERROR"  # bad magic / version / truncation
    PROTOCOL_ERROR = "PROTOCOL_ERROR"  # evaluation protocol cannot be satisfied
    STAGE_FAILED = "STAGE_FAILED"
    INTERNAL_ERROR = "INTERNAL_ERROR"


@dataclass
class LabError(Exception):
    """Canonical exception for the laboratory."""

    code: LabErrorCode
    message_safe: str
    details_safe: dict[str, Any] | None = None
    stage: str | None = None

    def __post_init__(self) -> None:
        super().__init__(self.message_safe)

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message_safe}"
        return self.message_safe

    @property
    def is_config_error(self) -> bool:
        return self.code is LabErrorCode.CONFIG_INVALID

    def to_error_dict(self) -> dict[str, Any]:
        return {
            "code": self.code.value,
            "message": self.message_safe,
            "details": self.details_safe or {},
            "stage": self.stage,
        }


def shape_error(op: str, *shapes: tuple[int, ...]) -> LabError:
    rendered = " and ".join(str(tuple(s)) for s in shapes)
    return LabError(
        LabErrorCode.SHAPE_MISMATCH,
        f"{op}: incompatible shapes {rendered}",
        details_safe={"op": op, "shapes": [list(s) for s in shapes]},
    )


def invalid(message: str, **details: Any) -> LabError:
    return LabError(LabErrorCode.INVALID_ARGUMENT, message, details_safe=details or None)
