# src/schemas/surfaces.py
from enum import Enum
from itertools import combinations
from math import prod
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.schemas.sheaves import AmbientSheaf, SheafExpr, SheafKind


class CompleteIntersection(BaseModel):
    """X = V(f_1, ..., f_c) ⊂ P^n with deg f_i = d_i"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    degrees: Tuple[int, ...]

    @field_validator("degrees")
    @classmethod
    def validate_degrees(cls, degrees):
        if not degrees:
            raise ValueError("at least one defining degree is required")
        if any(d <= 1 for d in degrees):
            raise ValueError(f"every degree must exceed 1, got {degrees}")
        return tuple(sorted(degrees))

    @model_validator(mode="after")
    def validate_codimension(self):
        if len(self.degrees) > self.n:
            raise ValueError(f"codimension {len(self.degrees)} exceeds ambient dimension {self.n}")
        return self

    @property
    def codim(self) -> int:
        return len(self.degrees)

    @property
    def dim(self) -> int:
        return self.n - self.codim

    @property
    def is_surface(self) -> bool:
        return self.dim == 2

    @property
    def degree(self) -> int:
        """d_0, the product of the defining degrees"""
        return prod(self.degrees)

    @property
    def canonical_twist(self) -> int:
        """ω_X = O_X(Σd_i − n − 1) by adjunction"""
        return sum(self.degrees) - self.n - 1

    @property
    def is_k3_numerics(self) -> bool:
        return self.is_surface and self.canonical_twist == 0

    def koszul_terms(self) -> List[SheafExpr]:
        """E_1, ..., E_c of 0 → E_c → … → E_1 → I_X → 0, E_i = ⊕_{|S|=i} O(−Σ_S d)"""
        terms = []
        for size in range(1, self.codim + 1):
            twists = [-sum(subset) for subset in combinations(self.degrees, size)]
            terms.append(SheafExpr.direct_sum(
                self.n, [AmbientSheaf(SheafKind.STRUCTURE, t, self.n) for t in twists]
            ))
        return terms

    def normal_bundle(self) -> SheafExpr:
        """N_X = ⊕ O(d_i), before restriction to X"""
        return SheafExpr.direct_sum(
            self.n, [AmbientSheaf(SheafKind.STRUCTURE, d, self.n) for d in self.degrees]
        )

    @property
    def name(self) -> str:
        return "-".join(str(d) for d in self.degrees) + f" in P{self.n}"


class K3Type(str, Enum):
    QUARTIC = "quartic"
    QUADRIC_CUBIC = "2-3"
    THREE_QUADRICS = "2-2-2"

    @property
    def surface(self) -> CompleteIntersection:
        return _CATALOG[self]

    @property
    def model_file(self) -> str:
        return {
            K3Type.QUARTIC: "quartic.txt",
            K3Type.QUADRIC_CUBIC: "quadric_cubic.txt",
            K3Type.THREE_QUADRICS: "three_quadrics.txt",
        }[self]

    @classmethod
    def select(cls, selector: str) -> List["K3Type"]:
        """Expand a surface selector; 'all' keeps catalog order"""
        if selector == "all":
            return list(cls)
        return [cls(selector)]


_CATALOG = {
    K3Type.QUARTIC: CompleteIntersection(n=3, degrees=(4,)),
    K3Type.QUADRIC_CUBIC: CompleteIntersection(n=4, degrees=(2, 3)),
    K3Type.THREE_QUADRICS: CompleteIntersection(n=5, degrees=(2, 2, 2)),
}
