# src/core/arith.py
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple
import logging
import math

import sympy as sp

from src.core.exceptions import DomainError

logger = logging.getLogger(__name__)

D = sp.Symbol("d")


def binomial(n: int, k: int) -> int:
    """C(n, k), zero whenever k < 0, n < 0 or k > n"""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def to_fraction(value) -> Fraction:
    """Convert a sympy/int rational to a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    rational = sp.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


@dataclass(frozen=True)
class PolynomialPiece:
    """Polynomial in d with exact coefficients, valid on [d_min, d_max]"""

    d_min: int
    d_max: int
    coefficients: Tuple[Fraction, ...]  # constant term first

    def __call__(self, d: int) -> Fraction:
        return sum((c * d**i for i, c in enumerate(self.coefficients)), Fraction(0))

    def covers(self, d: int) -> bool:
        return self.d_min <= d <= self.d_max

    @property
    def expression(self) -> str:
        poly = sum(
            (sp.Rational(c.numerator, c.denominator) * D**i for i, c in enumerate(self.coefficients)),
            sp.Integer(0),
        )
        return str(sp.expand(poly))

    def describe(self) -> str:
        return f"{self.expression} on [{self.d_min}, {self.d_max}]"


@dataclass
class DimTable:
    entries: Dict[int, int]
    fitted: List[PolynomialPiece] = field(default_factory=list)

    def __post_init__(self):
        for d, value in self.entries.items():
            if value < 0:
                raise DomainError(f"negative dimension {value} at d={d}")
        self.entries = dict(sorted(self.entries.items()))

    @property
    def exceptional(self) -> Dict[int, int]:
        """Entries not covered by any fitted piece"""
        return {
            d: v for d, v in self.entries.items()
            if not any(piece.covers(d) for piece in self.fitted)
        }


def _consecutive_runs(ds: Sequence[int]) -> List[List[int]]:
    runs: List[List[int]] = []
    for d in ds:
        if runs and d == runs[-1][-1] + 1:
            runs[-1].append(d)
        else:
            runs.append([d])
    return runs


def _interpolate(points: Sequence[Tuple[int, int]]) -> PolynomialPiece:
    expr = sp.interpolate(list(points), D)
    coeffs = sp.Poly(expr, D).all_coeffs()[::-1]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return PolynomialPiece(
        d_min=points[0][0],
        d_max=points[-1][0],
        coefficients=tuple(to_fraction(c) for c in coeffs),
    )


def fit_piecewise(table: DimTable, min_run: int = 4) -> DimTable:
    """
    Fit quadratic-or-lower polynomials on maximal runs.
    Three consecutive points fix a candidate; the run keeps extending while
    every further entry matches exactly. Runs shorter than min_run stay exceptional.
    """
    if min_run < 4:
        raise DomainError(f"min_run must be at least 4, got {min_run}")

    pieces: List[PolynomialPiece] = []
    for run in _consecutive_runs(list(table.entries)):
        start = 0
        while start + 2 < len(run):
            window = [(d, table.entries[d]) for d in run[start:start + 3]]
            candidate = _interpolate(window)
            end = start + 3
            while end < len(run) and candidate(run[end]) == table.entries[run[end]]:
                end += 1
            if end - start >= min_run:
                pieces.append(PolynomialPiece(run[start], run[end - 1], candidate.coefficients))
                start = end
            else:
                start += 1

    logger.debug(f"📈 Fitted {len(pieces)} piece(s) over {len(table.entries)} entries")
    return DimTable(entries=dict(table.entries), fitted=pieces)
