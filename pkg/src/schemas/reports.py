# src/schemas/reports.py
from enum import Enum
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationInfo, model_validator

from src.core.config import settings


class ResultStatus(str, Enum):
    DETERMINED = "Determined"
    NEEDED_ORACLE = "NeededOracle"
    UNDETERMINED = "Undetermined"


class Verdict(str, Enum):
    CERTIFIED = "Certified"
    OBSTRUCTED = "Obstructed"


class RunConfig(BaseModel):
    command: Literal["dims", "uniqueness", "singdeg", "verify"] = "dims"
    surface: Literal["quartic", "2-3", "2-2-2", "all"] = "all"
    d_min: int = Field(0, ge=0)
    d_max: int = Field(12, ge=0)
    output_format: Literal["json", "csv", "md"] = "json"
    with_oracle: bool = False
    with_trace: bool = False
    fit: bool = False

    @model_validator(mode="after")
    def validate_range(self, info: ValidationInfo):
        # callers holding their own Settings pass {"d_cap": ...} as validation context
        d_cap = (info.context or {}).get("d_cap", settings.d_cap)
        if self.d_min > self.d_max:
            raise ValueError(f"empty d-range {self.d_min}..{self.d_max}")
        if self.d_max > d_cap:
            raise ValueError(f"d_max {self.d_max} exceeds the cap {d_cap}")
        return self

    @property
    def d_values(self) -> List[int]:
        return list(range(self.d_min, self.d_max + 1))


class DimensionRecord(BaseModel):
    """One output row; the key set is the stable machine-readable schema"""

    surface: str
    d: int
    quantity: str
    value: Union[int, str]
    status: str
    provenance: str


class FoliationSpaceResult(BaseModel):
    d: int
    h0: Optional[int] = Field(None, ge=0)
    status: ResultStatus
    h0_omega1_pullback: Optional[int] = None
    h0_structure_terms: Optional[int] = None
    provenance: str = "chase"
    trace: List[str] = Field(default_factory=list)


class Obstruction(BaseModel):
    slot: str
    value: str

    def __str__(self) -> str:
        return f"{self.slot} = {self.value}"


class UniquenessCertificate(BaseModel):
    surface: str
    d: int
    verdict: Verdict
    obstructions: List[Obstruction] = Field(default_factory=list)
    trace: List[str] = Field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def describe(self) -> str:
        if self.certified:
            return self.verdict.value
        return f"{self.verdict.value}(" + "; ".join(str(o) for o in self.obstructions) + ")"
