# src/schemas/cohomology.py
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Tuple

from src.core.exceptions import DomainError, UndeterminedError


@dataclass(frozen=True)
class Dim:
    """A cohomology dimension: Known when lower == upper, otherwise an interval (upper None = ∞)"""

    lower: int = 0
    upper: Optional[int] = None

    def __post_init__(self):
        if self.lower < 0:
            raise DomainError(f"dimension lower bound {self.lower} is negative")
        if self.upper is not None and self.upper < self.lower:
            raise DomainError(f"empty dimension interval [{self.lower}, {self.upper}]")

    @classmethod
    def known(cls, value: int) -> "Dim":
        return cls(value, value)

    @classmethod
    def unknown(cls, lower: int = 0, upper: Optional[int] = None) -> "Dim":
        return cls(lower, upper)

    @property
    def is_known(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    @property
    def value(self) -> int:
        if not self.is_known:
            raise UndeterminedError(f"dimension is only bounded: {self}")
        return self.lower

    def within(self, other: "Dim") -> bool:
        """True when self is at least as tight as other"""
        if self.lower < other.lower:
            return False
        if other.upper is None:
            return True
        return self.upper is not None and self.upper <= other.upper

    def __add__(self, other: "Dim") -> "Dim":
        upper = None if self.upper is None or other.upper is None else self.upper + other.upper
        return Dim(self.lower + other.lower, upper)

    def __mul__(self, times: int) -> "Dim":
        upper = None if self.upper is None else self.upper * times
        return Dim(self.lower * times, upper)

    def __str__(self) -> str:
        if self.is_known:
            return str(self.lower)
        upper = "inf" if self.upper is None else str(self.upper)
        return f"[{self.lower},{upper}]"

    @classmethod
    def parse(cls, text: str) -> "Dim":
        text = text.strip()
        if text.startswith("["):
            lower, upper = text[1:-1].split(",")
            return cls(int(lower), None if upper == "inf" else int(upper))
        return cls.known(int(text))


ZERO = Dim.known(0)


@dataclass(frozen=True)
class CohProfile:
    """h^0..h^top of one sheaf"""

    label: str
    dims: Tuple[Dim, ...]

    @classmethod
    def from_values(cls, label: str, values: Iterable[int]) -> "CohProfile":
        return cls(label, tuple(Dim.known(v) for v in values))

    @classmethod
    def unknown(cls, label: str, top: int) -> "CohProfile":
        return cls(label, tuple(Dim.unknown() for _ in range(top + 1)))

    @classmethod
    def supported_on(cls, label: str, top: int, support_dim: int) -> "CohProfile":
        """Unknown up to the support dimension, Known zero above it"""
        return cls(label, tuple(Dim.unknown() if q <= support_dim else ZERO for q in range(top + 1)))

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @property
    def is_known(self) -> bool:
        return all(dim.is_known for dim in self.dims)

    def h(self, q: int) -> Dim:
        if not 0 <= q <= self.top:
            return ZERO
        return self.dims[q]

    def value(self, q: int) -> int:
        return self.h(q).value

    def with_dim(self, q: int, dim: Dim) -> "CohProfile":
        dims = list(self.dims)
        dims[q] = dim
        return replace(self, dims=tuple(dims))

    def relabel(self, label: str) -> "CohProfile":
        return replace(self, label=label)

    def truncated(self, top: int) -> "CohProfile":
        return replace(self, dims=self.dims[:top + 1])

    def __add__(self, other: "CohProfile") -> "CohProfile":
        if self.top != other.top:
            raise DomainError("direct sum of profiles over different ranges")
        return CohProfile(
            f"{self.label}+{other.label}",
            tuple(a + b for a, b in zip(self.dims, other.dims)),
        )

    def __str__(self) -> str:
        return f"{self.label}: (" + ", ".join(str(d) for d in self.dims) + ")"
