# src/schemas/sheaves.py
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Tuple

from src.core.exceptions import DomainError


class SheafKind(str, Enum):
    STRUCTURE = "O"
    COTANGENT = "Omega1"
    TANGENT = "Theta"


@dataclass(frozen=True, order=True)
class AmbientSheaf:
    """O(k), Ω¹(k) or Θ(k) on P^n"""

    kind: SheafKind
    twist: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"ambient dimension must be at least 2, got {self.n}")

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.twist})"

    def twisted(self, k: int) -> "AmbientSheaf":
        return replace(self, twist=self.twist + k)


@dataclass(frozen=True)
class SheafExpr:
    """
    Finite direct sum of ambient sheaves, optionally tensored with I_X
    or replaced by i_* i^* of the sum.
    """

    n: int
    summands: Tuple[Tuple[AmbientSheaf, int], ...]
    ideal_twisted: bool = False
    pulled_back: bool = False

    @classmethod
    def of(cls, sheaf: AmbientSheaf, multiplicity: int = 1) -> "SheafExpr":
        return cls(sheaf.n, ((sheaf, multiplicity),))

    @classmethod
    def line(cls, n: int, k: int) -> "SheafExpr":
        return cls.of(AmbientSheaf(SheafKind.STRUCTURE, k, n))

    @classmethod
    def direct_sum(cls, n: int, sheaves) -> "SheafExpr":
        counts: Dict[AmbientSheaf, int] = {}
        for sheaf in sheaves:
            counts[sheaf] = counts.get(sheaf, 0) + 1
        ordered = sorted(counts.items(), key=lambda item: (item[0].kind.value, -item[0].twist))
        return cls(n, tuple(ordered))

    @property
    def is_ambient(self) -> bool:
        return not (self.ideal_twisted or self.pulled_back)

    @property
    def base_label(self) -> str:
        parts = []
        for sheaf, multiplicity in self.summands:
            parts.append(sheaf.label if multiplicity == 1 else f"{sheaf.label}^{multiplicity}")
        return "+".join(parts) if parts else "0"

    @property
    def label(self) -> str:
        base = self.base_label
        if (self.ideal_twisted or self.pulled_back) and len(self.summands) > 1:
            base = f"({base})"
        if self.ideal_twisted:
            return f"I_X*{base}"
        if self.pulled_back:
            return f"i*{base}"
        return base

    def ambient(self) -> "SheafExpr":
        return replace(self, ideal_twisted=False, pulled_back=False)

    def with_ideal(self) -> "SheafExpr":
        return replace(self, ideal_twisted=True, pulled_back=False)

    def pullback(self) -> "SheafExpr":
        return replace(self, ideal_twisted=False, pulled_back=True)

    def tensor(self, other: "SheafExpr") -> "SheafExpr":
        """Tensor two ambient sums; only O(a) ⊗ K(b) = K(a+b) products are supported"""
        if not (self.is_ambient and other.is_ambient):
            raise DomainError("tensor products are formed before ideal twists and pullbacks")
        terms = []
        for left, m_left in self.summands:
            for right, m_right in other.summands:
                if left.kind is SheafKind.STRUCTURE:
                    product = right.twisted(left.twist)
                elif right.kind is SheafKind.STRUCTURE:
                    product = left.twisted(right.twist)
                else:
                    raise DomainError(f"unsupported tensor product {left.label} ⊗ {right.label}")
                terms.extend([product] * (m_left * m_right))
        return SheafExpr.direct_sum(self.n, terms)
