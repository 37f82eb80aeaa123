# src/core/linalg.py
"""
Exact sparse linear algebra over Q.

Vectors are dicts {column: coefficient}. Rows are scaled to primitive integer
vectors (content 1, positive leading entry) before they enter an echelon basis,
so elimination is fraction-free and coefficient growth stays bounded by the
content normalisation.
"""
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional
import math

SparseVector = Dict[int, Fraction]


def primitive_part(vector: Mapping[int, object]) -> Dict[int, int]:
    """Scale a rational vector to a primitive integer vector with positive leading entry"""
    entries = {c: Fraction(v) for c, v in vector.items() if v != 0}
    if not entries:
        return {}
    denominator = reduce(math.lcm, (v.denominator for v in entries.values()), 1)
    scaled = {c: int(v * denominator) for c, v in entries.items()}
    content = reduce(math.gcd, (abs(v) for v in scaled.values()), 0)
    if scaled[min(scaled)] < 0:
        content = -content
    return {c: v // content for c, v in scaled.items()}


class EchelonBasis:
    """Row echelon basis of a subspace, keyed by leading column"""

    def __init__(self, rows: Optional[Iterable[Mapping[int, object]]] = None):
        self.pivots: Dict[int, Dict[int, int]] = {}
        for row in rows or ():
            self.add(row)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; returns False when it already lies in the span"""
        current = primitive_part(row)
        while current:
            lead = min(current)
            pivot = self.pivots.get(lead)
            if pivot is None:
                self.pivots[lead] = current
                return True
            a, b = current[lead], pivot[lead]
            combined = {c: b * v for c, v in current.items()}
            for c, v in pivot.items():
                combined[c] = combined.get(c, 0) - a * v
            current = primitive_part(combined)
        return False

    def reduce(self, vector: Mapping[int, object]) -> SparseVector:
        """Remainder of a vector modulo the span; supported off the pivot columns"""
        remainder = {c: Fraction(v) for c, v in vector.items() if v != 0}
        while True:
            hits = [c for c in remainder if c in self.pivots]
            if not hits:
                return remainder
            lead = min(hits)
            pivot = self.pivots[lead]
            factor = remainder[lead] / pivot[lead]
            for c, v in pivot.items():
                value = remainder.get(c, Fraction(0)) - factor * v
                if value:
                    remainder[c] = value
                else:
                    remainder.pop(c, None)

    def contains(self, vector: Mapping[int, object]) -> bool:
        return not self.reduce(vector)


def rank(vectors: Iterable[Mapping[int, object]]) -> int:
    return EchelonBasis(vectors).rank


def rank_mod_p(rows: List[List[int]], prime: int) -> int:
    """Rank of a dense integer matrix over F_p"""
    matrix = [[v % prime for v in row] for row in rows]
    rank_found = 0
    ncols = len(matrix[0]) if matrix else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank_found, len(matrix)) if matrix[r][col]), None)
        if pivot is None:
            continue
        matrix[rank_found], matrix[pivot] = matrix[pivot], matrix[rank_found]
        inverse = pow(matrix[rank_found][col], -1, prime)
        for r in range(len(matrix)):
            if r != rank_found and matrix[r][col]:
                factor = matrix[r][col] * inverse % prime
                matrix[r] = [(x - factor * y) % prime for x, y in zip(matrix[r], matrix[rank_found])]
        rank_found += 1
    return rank_found
