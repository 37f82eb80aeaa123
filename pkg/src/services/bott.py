# src/services/bott.py
"""Closed-form cohomology of O(k), Ω¹(k) and Θ(k) on P^n."""
from typing import Callable, Dict
import logging

from src.core.arith import binomial
from src.core.exceptions import DomainError, EngineConsistencyError
from src.schemas.cohomology import CohProfile, Dim
from src.schemas.sheaves import AmbientSheaf, SheafExpr, SheafKind

logger = logging.getLogger(__name__)


def _check(n: int, q: int) -> None:
    if n < 2:
        raise DomainError(f"ambient dimension must be at least 2, got {n}")
    if not 0 <= q <= n:
        raise DomainError(f"cohomological degree {q} outside 0..{n}")


def coh_structure(n: int, q: int, k: int) -> int:
    _check(n, q)
    if q == 0:
        return binomial(n + k, k) if k >= 0 else 0
    if q == n:
        return binomial(-k - 1, n)
    return 0


def coh_omega1(n: int, q: int, k: int) -> int:
    _check(n, q)
    if q == 0:
        return (k - 1) * binomial(k + n - 1, k) if k > 1 else 0
    if q == n:
        # Serre dual of h^0(Ω^{n-1}(-k))
        return (1 - k) * binomial(-k - 1, n - 1) if k < 1 - n else 0
    return 1 if (q == 1 and k == 0) else 0


def coh_tangent(n: int, q: int, k: int) -> int:
    _check(n, q)
    return coh_omega1(n, n - q, -k - n - 1)


_BY_KIND: Dict[SheafKind, Callable[[int, int, int], int]] = {
    SheafKind.STRUCTURE: coh_structure,
    SheafKind.COTANGENT: coh_omega1,
    SheafKind.TANGENT: coh_tangent,
}


def cohomology(sheaf: AmbientSheaf, q: int) -> int:
    return _BY_KIND[sheaf.kind](sheaf.n, q, sheaf.twist)


def profile(expr: SheafExpr) -> CohProfile:
    """Known profile of a direct sum of ambient sheaves"""
    if not expr.is_ambient:
        raise DomainError(f"{expr.label} is not an ambient sum; chase it instead")
    dims = [Dim.known(0)] * (expr.n + 1)
    for sheaf, multiplicity in expr.summands:
        for q in range(expr.n + 1):
            dims[q] = dims[q] + Dim.known(cohomology(sheaf, q)) * multiplicity
    return CohProfile(expr.label, tuple(dims))


def euler_characteristic(n: int, k: int) -> int:
    return sum((-1) ** q * coh_structure(n, q, k) for q in range(n + 1))


def h0_tangent_via_euler(n: int, k: int) -> int:
    """h^0(Θ(k)) from 0 → O(k) → O(k+1)^{n+1} → Θ(k) → 0, valid for k ≥ −1"""
    if k < -1:
        raise DomainError(f"Euler-sequence count needs k ≥ -1, got {k}")
    return (n + 1) * coh_structure(n, 0, k + 1) - coh_structure(n, 0, k)


def projective_foliation_space_dim(n: int, d: int) -> int:
    """Dimension of H^0(Θ_{P^n}(d−1)), foliations of degree d on P^n plus zero"""
    value = coh_tangent(n, 0, d - 1)
    if d >= 0 and value != h0_tangent_via_euler(n, d - 1):
        raise EngineConsistencyError(f"Euler-sequence mismatch for Θ({d - 1}) on P{n}")
    return value
