# src/services/ci_engine.py
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Callable, Dict, List, Optional, Tuple, Union
import logging

import sympy as sp

from src.core.arith import binomial
from src.core.config import settings
from src.core.exceptions import EngineConsistencyError, UndeterminedError
from src.schemas.cohomology import CohProfile, Dim
from src.schemas.reports import (
    FoliationSpaceResult, Obstruction, ResultStatus, UniquenessCertificate, Verdict,
)
from src.schemas.sheaves import AmbientSheaf, SheafExpr, SheafKind
from src.schemas.surfaces import CompleteIntersection, K3Type
from src.services import bott
from src.services.seqchase import ChaseTrace, ShortExact, chase, chase_resolution

logger = logging.getLogger(__name__)

Surface = Union[K3Type, CompleteIntersection]


def _surface(X: Surface) -> CompleteIntersection:
    return X.surface if isinstance(X, K3Type) else X


def hilbert_function(X: CompleteIntersection, m: int) -> int:
    """dim (R/I)_m = Σ_S (−1)^{|S|} C(n + m − Σ_S d, n)"""
    if m < 0:
        return 0
    total = 0
    for size in range(X.codim + 1):
        for subset in combinations(X.degrees, size):
            total += (-1) ** size * binomial(X.n + m - sum(subset), X.n)
    return total


@lru_cache(maxsize=None)
def ideal_chase(X: CompleteIntersection, F: SheafExpr) -> Tuple[CohProfile, ChaseTrace]:
    """Profile of F ⊗ I_X from the Koszul resolution tensored with F"""
    res = [term.tensor(F) for term in X.koszul_terms()]
    return chase_resolution(res, F.with_ideal())


@lru_cache(maxsize=None)
def pullback_chase(X: CompleteIntersection, F: SheafExpr) -> Tuple[CohProfile, ChaseTrace]:
    """Profile of i_* i^* F from 0 → F ⊗ I_X → F → i_* i^* F → 0"""
    ideal, ideal_trace = ideal_chase(X, F)
    ambient = bott.profile(F)
    pulled = CohProfile.supported_on(F.pullback().label, X.n, X.dim)
    (_, _, pulled), step_trace = chase(ShortExact(ideal.label, ambient.label, pulled.label), (ideal, ambient, pulled))
    return pulled, ChaseTrace(ideal_trace.steps + step_trace.steps)


def ideal_profile(X: Surface, m: int) -> CohProfile:
    """h^q(I_X(m)); for complete intersections h^j = 0 for 1 ≤ j ≤ dim X"""
    surface = _surface(X)
    profile, _ = ideal_chase(surface, SheafExpr.line(surface.n, m))
    return profile


def chern_numbers(X: Surface) -> Tuple[int, int]:
    """(c_1·H, c_2[X]) from c(Θ_X) = (1+H)^{n+1} / Π(1 + d_i H)"""
    surface = _surface(X)
    h = sp.Symbol("h")
    total = (1 + h) ** (surface.n + 1)
    for d in surface.degrees:
        total = total / (1 + d * h)
    series = sp.series(total, h, 0, 3).removeO()
    c1, c2 = (int(series.coeff(h, i)) for i in (1, 2))
    return c1 * surface.degree, c2 * surface.degree


def enumerate_k3_complete_intersections(max_codim: int = 6) -> List[CompleteIntersection]:
    """All surfaces with d_i ≥ 2 and Σd_i = n + 1; the bound Σd_i ≥ 2c forces c ≤ 3"""
    found = []
    for codim in range(1, max_codim + 1):
        n = codim + 2
        for degrees in combinations_with_replacement(range(2, n + 2), codim):
            if sum(degrees) == n + 1:
                found.append(CompleteIntersection(n=n, degrees=degrees))
    return found


class CompleteIntersectionEngine:
    """Foliation, singular-scheme and uniqueness quantities over complete-intersection surfaces"""

    def __init__(
        self,
        oracle_provider: Optional[Callable[[K3Type], object]] = None,
        oracle_fallback: Optional[bool] = None,
    ):
        self.oracle_provider = oracle_provider
        self.oracle_fallback = settings.oracle_fallback if oracle_fallback is None else oracle_fallback

    # ------------------------------------------------------------------ structure sheaf

    def coh_pullback_structure(self, X: Surface, m: int) -> CohProfile:
        surface = _surface(X)
        profile, _ = pullback_chase(surface, SheafExpr.line(surface.n, m))
        closed = hilbert_function(surface, m)
        h0 = profile.h(0)
        if h0.is_known and h0.value != closed:
            logger.error(f"❌ h0(i*O({m})) on {surface.name}: chase {h0.value}, Hilbert function {closed}")
            raise EngineConsistencyError(f"h0(X, i*O({m})) chase={h0.value} closed form={closed}")
        if not Dim.known(closed).within(h0):
            raise EngineConsistencyError(f"h0(X, i*O({m})) closed form {closed} outside chase bound {h0}")
        return profile.with_dim(0, Dim.known(closed))

    def structure_trace(self, X: Surface, m: int) -> ChaseTrace:
        surface = _surface(X)
        return pullback_chase(surface, SheafExpr.line(surface.n, m))[1]

    def normal_bundle_h0(self, X: Surface, m: int = 0) -> int:
        """h^0(X, N_X(m)) = Σ_j h^0(X, i*O(d_j + m))"""
        surface = _surface(X)
        return sum(self.coh_pullback_structure(surface, d + m).value(0) for d in surface.degrees)

    def verify_k3(self, X: Surface) -> bool:
        """Trivial canonical sheaf and h^1(X, O_X) = 0, the latter by chase"""
        surface = _surface(X)
        if not surface.is_k3_numerics:
            return False
        return self.coh_pullback_structure(surface, 0).h(1) == Dim.known(0)

    # ------------------------------------------------------------------ cotangent sheaf

    def _omega1_pullback(self, X: Surface, k: int) -> Tuple[CohProfile, ResultStatus, str, ChaseTrace]:
        surface = _surface(X)
        F = SheafExpr.of(AmbientSheaf(SheafKind.COTANGENT, k, surface.n))
        profile, trace = pullback_chase(surface, F)
        h0 = profile.h(0)
        if h0.is_known:
            return profile, ResultStatus.DETERMINED, "chase", trace

        if self.oracle_fallback and self.oracle_provider and isinstance(X, K3Type) and k >= 1:
            from src.services.oracle import euler_kernel_dim

            quotient = self.oracle_provider(X)
            value = euler_kernel_dim(quotient, k)
            if not Dim.known(value).within(h0):
                raise EngineConsistencyError(f"oracle h0(i*Omega1({k}))={value} outside chase bound {h0}")
            logger.info(f"🔍 h0(i*Omega1({k})) on {X.value} resolved by the oracle: {value}")
            return profile.with_dim(0, Dim.known(value)), ResultStatus.NEEDED_ORACLE, f"oracle:{X.model_file}", trace

        logger.warning(f"⚠️ h0(i*Omega1({k})) on {surface.name} left at {h0}")
        return profile, ResultStatus.UNDETERMINED, "chase", trace

    def coh_pullback_omega1(self, X: Surface, k: int) -> int:
        profile, status, _, _ = self._omega1_pullback(X, k)
        if status is ResultStatus.UNDETERMINED:
            raise UndeterminedError(f"h0(X, i*Omega1({k})) is only bounded: {profile.h(0)}")
        return profile.value(0)

    def foliation_space_dim(self, X: Surface, d: int) -> FoliationSpaceResult:
        """h^0(X, Ω¹_X ⊗ i*O(d−1)) through 0 → ⊕ i*O(d−1−d_j) → i*Ω¹(d−1) → Ω¹_X(d−1) → 0"""
        surface = _surface(X)
        k = d - 1
        omega, status, provenance, trace = self._omega1_pullback(X, k)
        trace = ChaseTrace(list(trace.steps))

        conormal_twists = [k - dj for dj in surface.degrees]
        structure = [self.coh_pullback_structure(surface, m) for m in conormal_twists]
        for m in conormal_twists:
            trace.extend(self.structure_trace(surface, m))
        structure_terms = sum(p.value(0) for p in structure)

        conormal_label = SheafExpr.direct_sum(
            surface.n, [AmbientSheaf(SheafKind.STRUCTURE, m, surface.n) for m in conormal_twists]
        ).pullback().label
        conormal = structure[0].truncated(surface.dim)
        for extra in structure[1:]:
            conormal = conormal + extra.truncated(surface.dim)
        conormal = conormal.relabel(conormal_label)
        restricted = omega.truncated(surface.dim)
        target = CohProfile.unknown(f"Omega1_X({k})", surface.dim)

        (_, _, target), goal_trace = chase(
            ShortExact(conormal.label, restricted.label, target.label),
            (conormal, restricted, target),
        )
        trace.extend(goal_trace)

        h0 = target.h(0)
        if not h0.is_known:
            return FoliationSpaceResult(
                d=d, h0=None, status=ResultStatus.UNDETERMINED,
                h0_omega1_pullback=omega.value(0) if omega.h(0).is_known else None,
                h0_structure_terms=structure_terms, provenance=provenance, trace=trace.lines(),
            )
        return FoliationSpaceResult(
            d=d, h0=h0.value, status=status,
            h0_omega1_pullback=omega.value(0), h0_structure_terms=structure_terms,
            provenance=provenance, trace=trace.lines(),
        )

    def existence_threshold(self, X: Surface, limit: int = 50) -> int:
        """Smallest d with a nonzero space of foliations"""
        for d in range(limit + 1):
            result = self.foliation_space_dim(X, d)
            if result.h0:
                return d
        raise UndeterminedError(f"no foliations found up to d={limit}")

    # ------------------------------------------------------------------ singular scheme

    def singular_scheme_degree(self, X: Surface, d: int) -> int:
        """deg c_2(Θ_X ⊗ O(d−1)) = c_2 + c_1·(d−1)H + (d−1)^2 H^2"""
        surface = _surface(X)
        c1, c2 = chern_numbers(surface)
        return c2 + c1 * (d - 1) + (d - 1) ** 2 * surface.degree

    # ------------------------------------------------------------------ uniqueness

    def uniqueness_certificate(self, X: Surface, d: int) -> UniquenessCertificate:
        """
        Certified iff H^1(X, Θ_X ⊗ i*O(1−d)) = 0 is proved by
        0 → Θ_X(1−d) → i*Θ(1−d) → ⊕ i*O(d_j−d+1) → 0.
        """
        surface = _surface(X)
        label = X.value if isinstance(X, K3Type) else surface.name
        obstructions: List[Obstruction] = []
        trace = ChaseTrace()

        normal_twists = [dj - d + 1 for dj in surface.degrees]
        normal = []
        for m in normal_twists:
            profile = self.coh_pullback_structure(surface, m)
            trace.extend(self.structure_trace(surface, m))
            normal.append(profile)
            if profile.h(0) != Dim.known(0):
                obstructions.append(Obstruction(slot=f"h0(X,i*O({m}))", value=str(profile.h(0))))

        theta = SheafExpr.of(AmbientSheaf(SheafKind.TANGENT, 1 - d, surface.n))
        tangent, tangent_trace = pullback_chase(surface, theta)
        trace.extend(tangent_trace)
        if tangent.h(1) != Dim.known(0):
            obstructions.append(Obstruction(slot=f"h1(X,i*Theta({1 - d}))", value=str(tangent.h(1))))

        normal_sum = normal[0].truncated(surface.dim)
        for extra in normal[1:]:
            normal_sum = normal_sum + extra.truncated(surface.dim)
        normal_sum = normal_sum.relabel(SheafExpr.direct_sum(
            surface.n, [AmbientSheaf(SheafKind.STRUCTURE, m, surface.n) for m in normal_twists]
        ).pullback().label)
        restricted = tangent.truncated(surface.dim)
        theta_x = CohProfile.unknown(f"Theta_X({1 - d})", surface.dim)
        (theta_x, _, _), normal_trace = chase(
            ShortExact(theta_x.label, restricted.label, normal_sum.label),
            (theta_x, restricted, normal_sum),
        )
        trace.extend(normal_trace)

        vanishes = theta_x.h(1) == Dim.known(0)
        if not obstructions and not vanishes:
            raise EngineConsistencyError(f"{label} d={d}: both inputs vanish but H^1 is {theta_x.h(1)}")

        verdict = Verdict.OBSTRUCTED if obstructions else Verdict.CERTIFIED
        logger.debug(f"{'✅' if verdict is Verdict.CERTIFIED else '❌'} {label} d={d}: {verdict.value}")
        return UniquenessCertificate(
            surface=label, d=d, verdict=verdict, obstructions=obstructions, trace=trace.lines()
        )

    def uniqueness_threshold(self, X: Surface, window: Optional[int] = None, limit: Optional[int] = None) -> int:
        """Smallest d ≥ 3 certified on the whole window [d, d + window − 1]"""
        window = window or settings.uniqueness_window
        limit = limit or settings.uniqueness_search_limit
        verdicts: Dict[int, bool] = {}

        def certified(d: int) -> bool:
            if d not in verdicts:
                verdicts[d] = self.uniqueness_certificate(X, d).certified
            return verdicts[d]

        start = 3
        while start <= limit:
            failure = next((d for d in range(start, start + window) if not certified(d)), None)
            if failure is None:
                return start
            start = failure + 1
        raise UndeterminedError(f"no certified window of width {window} starting at or below {limit}")
