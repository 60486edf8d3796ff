"""
Pydantic schemas for session requests and machine-readable reports.
"""

import math
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class SessionRunRequest(BaseModel):
    """
    Input schema for running a session over HTTP.
    """

    source: str = Field(min_length=1)
    max_degree: Optional[int] = Field(default=None, ge=1)
    zpower: Optional[int] = Field(default=None, ge=0)
    stats: bool = False


class ErrorRecord(BaseModel):
    """
    A domain error with its stable code and, for parse errors, its position.
    """

    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None
    token: Optional[str] = None


class EngineStatsRead(BaseModel):
    spairs_processed: int = 0
    spairs_skipped: int = 0
    zero_reductions: int = 0
    bases_computed: int = 0
    max_basis_size: int = 0


class CycleComponentRead(BaseModel):
    generators: List[str]
    multiplicity: int


class CharCycleRead(BaseModel):
    """
    Characteristic cycle as a list of prime components with multiplicities.
    """

    components: List[CycleComponentRead] = Field(default_factory=list)
    total_multiplicity: int = 0


class CohomologyRead(BaseModel):
    dims: Optional[List[int]] = None
    chi: int
    provenance: str


class ModuleSummaryRead(BaseModel):
    """
    Echo of a presented module: ring, side, shape and relation rows.
    """

    ring: str
    side: str
    ambient_n: int
    rank: int
    relations: List[List[str]] = Field(default_factory=list)


class Report(BaseModel):
    """
    The single document emitted per invocation.

    ``verdicts`` keys are inserted in a fixed order per command; exact
    rationals are strings ``"p/q"`` and infinity is the string ``"inf"``.
    """

    command: str
    status: str = "ok"
    exit_code: int = 0
    verdicts: Dict[str, Any] = Field(default_factory=dict)
    timing_ms: float = 0.0
    stats: Optional[EngineStatsRead] = None
    error: Optional[ErrorRecord] = None


def exact(value: Any) -> Any:
    """Make a verdict value JSON-safe without going through floats."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return str(value)
    if isinstance(value, int):
        return value
    if isinstance(value, BaseModel):
        return value.model_dump()
    if isinstance(value, dict):
        return {str(k): exact(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [exact(v) for v in value]
    return str(value)
