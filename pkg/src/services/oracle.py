# src/services/oracle.py
"""
Brute-force graded linear algebra on explicit surfaces X = V(f_1, …, f_c).

Every graded piece (R/I)_m is realised as R_m modulo the echelon span of
{monomial · f_j}; quotient coordinates are the non-pivot monomials.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import random

import sympy as sp

from src.core.arith import to_fraction
from src.core.exceptions import DomainError, InconsistentInputError, RegularSequenceError
from src.core.linalg import EchelonBasis, SparseVector, rank_mod_p
from src.schemas.surfaces import CompleteIntersection

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, Fraction]


def poly_terms(poly: sp.Poly) -> Terms:
    return {monom: to_fraction(coeff) for monom, coeff in poly.as_dict().items() if coeff != 0}


def _shift(terms: Terms, monomial: Exponent) -> Terms:
    return {tuple(a + b for a, b in zip(exp, monomial)): c for exp, c in terms.items()}


def _unit(n_vars: int, i: int) -> Exponent:
    return tuple(1 if v == i else 0 for v in range(n_vars))


class GradedQuotient:
    """R/I for R = Q[x_0..x_n] and I = (f_1, …, f_c) homogeneous"""

    def __init__(self, n: int, forms: Sequence, name: str = "model"):
        self.n = n
        self.name = name
        self.gens = sp.symbols(f"x0:{n + 1}")
        self.forms = tuple(sp.Poly(f, *self.gens, domain=sp.QQ) for f in forms)
        for f in self.forms:
            if f.is_zero or not f.is_homogeneous:
                raise InconsistentInputError(f"{name}: defining forms must be nonzero and homogeneous")
        self.degrees = tuple(f.total_degree() for f in self.forms)
        self._form_terms = [poly_terms(f) for f in self.forms]
        self._monomials: Dict[int, List[Exponent]] = {}
        self._index: Dict[int, Dict[Exponent, int]] = {}
        self._ideal: Dict[int, EchelonBasis] = {}
        self._coords: Dict[int, Dict[int, int]] = {}

    @property
    def n_vars(self) -> int:
        return self.n + 1

    @property
    def surface(self) -> CompleteIntersection:
        return CompleteIntersection(n=self.n, degrees=self.degrees)

    def gradient(self, j: int) -> List[Terms]:
        return [poly_terms(self.forms[j].diff(x)) for x in self.gens]

    # ------------------------------------------------------------------ graded pieces

    def monomials(self, m: int) -> List[Exponent]:
        """Monomials of degree m, lex-descending so x_0^m comes first"""
        if m < 0:
            return []
        if m not in self._monomials:
            exps = []
            for choice in combinations_with_replacement(range(self.n_vars), m):
                exps.append(tuple(choice.count(v) for v in range(self.n_vars)))
            exps.sort(reverse=True)
            self._monomials[m] = exps
            self._index[m] = {exp: i for i, exp in enumerate(exps)}
        return self._monomials[m]

    def vector(self, terms: Terms, m: int) -> SparseVector:
        self.monomials(m)
        index = self._index[m]
        return {index[exp]: c for exp, c in terms.items() if c}

    def ideal_piece(self, m: int) -> EchelonBasis:
        if m not in self._ideal:
            rows = []
            for f_terms, d in zip(self._form_terms, self.degrees):
                for monomial in self.monomials(m - d):
                    rows.append(self.vector(_shift(f_terms, monomial), m))
            self._ideal[m] = EchelonBasis(rows)
            logger.debug(f"🔍 {self.name}: I_{m} has rank {self._ideal[m].rank} from {len(rows)} generators")
        return self._ideal[m]

    def quotient_columns(self, m: int) -> Dict[int, int]:
        """Monomial column → quotient coordinate, for the non-pivot monomials"""
        if m not in self._coords:
            pivots = set(self.ideal_piece(m).pivots) if m >= 0 else set()
            free = [c for c in range(len(self.monomials(m))) if c not in pivots]
            self._coords[m] = {c: i for i, c in enumerate(free)}
        return self._coords[m]

    def quotient_basis(self, m: int) -> List[Exponent]:
        monomials = self.monomials(m)
        return [monomials[c] for c in self.quotient_columns(m)]

    def dim(self, m: int) -> int:
        return len(self.quotient_columns(m)) if m >= 0 else 0

    def normal_form(self, terms: Terms, m: int) -> SparseVector:
        """Coordinates of a degree-m form in the quotient basis of (R/I)_m"""
        if m < 0 or not terms:
            return {}
        remainder = self.ideal_piece(m).reduce(self.vector(terms, m))
        coords = self.quotient_columns(m)
        return {coords[c]: v for c, v in remainder.items()}

    def contains(self, terms: Terms, m: int) -> bool:
        return not terms or self.ideal_piece(m).contains(self.vector(terms, m))

    def prepare(self, max_degree: int) -> "GradedQuotient":
        """Build every cache up to max_degree; afterwards queries are read-only"""
        for m in range(max_degree + 1):
            hilbert_function(self, m)
        return self


def hilbert_function(Q: GradedQuotient, m: int) -> int:
    if m < 0:
        return 0
    from src.services.ci_engine import hilbert_function as koszul_hilbert_function

    value = Q.dim(m)
    expected = koszul_hilbert_function(Q.surface, m)
    if value != expected:
        logger.error(f"❌ {Q.name}: HF({m}) = {value}, Koszul predicts {expected}")
        raise RegularSequenceError(f"{Q.name}: Hilbert function {value} at m={m} differs from {expected}")
    return value


@dataclass
class GradedMap:
    """Matrix of a map between graded pieces, stored column by column"""

    source_degrees: Tuple[int, ...]
    target_degree: int
    target_dim: int
    columns: List[SparseVector] = field(default_factory=list)

    @property
    def source_dim(self) -> int:
        return len(self.columns)

    def rank(self) -> int:
        return EchelonBasis(self.columns).rank

    def kernel_dim(self) -> int:
        return self.source_dim - self.rank()

    def apply(self, vector: SparseVector) -> SparseVector:
        image: SparseVector = {}
        for c, coefficient in vector.items():
            for row, entry in self.columns[c].items():
                value = image.get(row, Fraction(0)) + coefficient * entry
                if value:
                    image[row] = value
                else:
                    image.pop(row, None)
        return image


def euler_map(Q: GradedQuotient, k: int) -> GradedMap:
    """(R/I)_{k−1}^{n+1} → (R/I)_k, (a_0..a_n) ↦ Σ x_i a_i"""
    graded = GradedMap(source_degrees=(k - 1,) * Q.n_vars, target_degree=k, target_dim=Q.dim(k))
    for i in range(Q.n_vars):
        for b in Q.quotient_basis(k - 1):
            graded.columns.append(Q.normal_form(_shift({b: Fraction(1)}, _unit(Q.n_vars, i)), k))
    return graded


def euler_kernel_dim(Q: GradedQuotient, k: int) -> int:
    """h^0(X, i*Ω¹(k)) as the kernel of the restricted Euler map"""
    if k <= 0:
        return 0
    hilbert_function(Q, k - 1)
    hilbert_function(Q, k)
    return euler_map(Q, k).kernel_dim()


def conormal_map(Q: GradedQuotient, d: int) -> GradedMap:
    """⊕_j (R/I)_{d−1−d_j} → (R/I)_{d−2}^{n+1}, h ↦ h·∇f_j"""
    target = d - 2
    block = Q.dim(target)
    graded = GradedMap(
        source_degrees=tuple(d - 1 - dj for dj in Q.degrees),
        target_degree=target,
        target_dim=block * Q.n_vars,
    )
    for j, dj in enumerate(Q.degrees):
        gradient = Q.gradient(j)
        for b in Q.quotient_basis(d - 1 - dj):
            column: SparseVector = {}
            for i, partial in enumerate(gradient):
                for coord, value in Q.normal_form(_shift(partial, b), target).items():
                    column[i * block + coord] = value
            graded.columns.append(column)
    return graded


def foliation_dim_oracle(Q: GradedQuotient, d: int) -> int:
    """h^0(X, Ω¹_X(d−1)) = dim ker(Euler) − rank(conormal)"""
    if d < 1:
        raise DomainError(f"foliation degree must be at least 1, got {d}")
    kernel = euler_kernel_dim(Q, d - 1)
    conormal = conormal_map(Q, d)
    if conormal.source_dim:
        euler = euler_map(Q, d - 1)
        for column in conormal.columns:
            if euler.apply(column):
                logger.error(f"❌ {Q.name}: conormal image leaves the Euler kernel at d={d}")
                raise InconsistentInputError(f"{Q.name}: Σ x_i h ∂f/∂x_i ∉ I at d={d}")
    value = kernel - conormal.rank()
    logger.info(f"🔍 {Q.name}: oracle h0(Omega1_X({d - 1})) = {value}")
    return value


# ---------------------------------------------------------------------- vector fields


@dataclass(frozen=True)
class HomogeneousVectorField:
    """F = Σ F_i ∂/∂x_i with all F_i homogeneous of one degree"""

    components: Tuple[sp.Poly, ...]

    def __post_init__(self):
        nonzero = [c for c in self.components if not c.is_zero]
        if not nonzero:
            raise DomainError("a vector field needs a nonzero component")
        if any(not c.is_homogeneous for c in nonzero):
            raise DomainError("vector field components must be homogeneous")
        if len({c.total_degree() for c in nonzero}) != 1:
            raise DomainError("vector field components must share one degree")

    @classmethod
    def from_exprs(cls, exprs: Sequence, gens: Sequence[sp.Symbol]) -> "HomogeneousVectorField":
        return cls(tuple(sp.Poly(e, *gens, domain=sp.QQ) for e in exprs))

    @classmethod
    def radial(cls, gens: Sequence[sp.Symbol]) -> "HomogeneousVectorField":
        return cls.from_exprs(list(gens), gens)

    @classmethod
    def hamiltonian(cls, f: sp.Poly, i: int, j: int) -> "HomogeneousVectorField":
        """(∂f/∂x_j) ∂_i − (∂f/∂x_i) ∂_j"""
        gens = f.gens
        zero = sp.Poly(0, *gens, domain=sp.QQ)
        components = [zero] * len(gens)
        components[i] = f.diff(gens[j])
        components[j] = -f.diff(gens[i])
        return cls(tuple(components))

    @property
    def gens(self) -> Tuple[sp.Symbol, ...]:
        return self.components[0].gens

    @property
    def degree(self) -> int:
        return next(c.total_degree() for c in self.components if not c.is_zero)

    def apply(self, f: sp.Poly) -> sp.Poly:
        """F(f) = Σ F_i ∂f/∂x_i"""
        total = sp.Poly(0, *self.gens, domain=sp.QQ)
        for component, x in zip(self.components, self.gens):
            total = total + component * f.diff(x)
        return total


def is_invariant(F: HomogeneousVectorField, Q: GradedQuotient) -> bool:
    """F(f_j) ∈ I for every j"""
    for f in Q.forms:
        image = F.apply(f)
        if image.is_zero:
            continue
        if not Q.contains(poly_terms(image), image.total_degree()):
            return False
    return True


@dataclass
class SingularSchemeIdeal:
    minors: List[sp.Poly]
    common_factor: sp.Poly


def singular_scheme_ideal(F: HomogeneousVectorField) -> SingularSchemeIdeal:
    """The 2×2 minors x_i F_j − x_j F_i of (x; F), i < j"""
    gens = F.gens
    minors = []
    for i, j in combinations(range(len(gens)), 2):
        x_i = sp.Poly(gens[i], *gens, domain=sp.QQ)
        x_j = sp.Poly(gens[j], *gens, domain=sp.QQ)
        minors.append(x_i * F.components[j] - x_j * F.components[i])
    nonzero = [m.as_expr() for m in minors if not m.is_zero]
    if not nonzero:
        return SingularSchemeIdeal(minors=minors, common_factor=sp.Poly(0, *gens, domain=sp.QQ))
    factor = sp.Poly(sp.gcd_list(nonzero), *gens, domain=sp.QQ).monic()
    return SingularSchemeIdeal(minors=minors, common_factor=factor)


def section_space_dim(fields: Sequence[HomogeneousVectorField], Q: GradedQuotient) -> int:
    """Dimension of the span of fields in ((R/I)_d)^{n+1} modulo radial multiples"""
    if not fields:
        return 0
    d = fields[0].degree
    if any(F.degree != d for F in fields):
        raise DomainError("fields of different degrees")
    block = Q.dim(d)

    def as_vector(components: Sequence[Terms]) -> SparseVector:
        vector: SparseVector = {}
        for i, terms in enumerate(components):
            for coord, value in Q.normal_form(terms, d).items():
                vector[i * block + coord] = value
        return vector

    span = EchelonBasis()
    for b in Q.quotient_basis(d - 1):
        span.add(as_vector([_shift({b: Fraction(1)}, _unit(Q.n_vars, i)) for i in range(Q.n_vars)]))
    trivial = span.rank
    for F in fields:
        span.add(as_vector([poly_terms(c) for c in F.components]))
    return span.rank - trivial


def hamiltonian_fields(Q: GradedQuotient) -> List[HomogeneousVectorField]:
    if len(Q.forms) != 1:
        raise DomainError("Hamiltonian-minor fields are defined for hypersurfaces")
    f = Q.forms[0]
    return [HomogeneousVectorField.hamiltonian(f, i, j) for i, j in combinations(range(Q.n_vars), 2)]


# ---------------------------------------------------------------------- smoothness


def _mod_terms(terms: Terms, prime: int) -> List[Tuple[Exponent, int]]:
    reduced = []
    for exp, c in terms.items():
        if c.denominator % prime == 0:
            raise InconsistentInputError(f"coefficient {c} is not integral at {prime}")
        reduced.append((exp, c.numerator * pow(c.denominator, -1, prime) % prime))
    return reduced


def _evaluate(terms: List[Tuple[Exponent, int]], point: Sequence[int], prime: int) -> int:
    total = 0
    for exp, c in terms:
        value = c
        for x, e in zip(point, exp):
            if e:
                value = value * pow(x, e, prime) % prime
        total += value
    return total % prime


def spot_check_smoothness(
    Q: GradedQuotient,
    samples: int = 100,
    prime: int = 13,
    seed: int = 1729,
    max_attempts: Optional[int] = None,
) -> int:
    """
    Jacobian rank at seeded random points of X over F_p.
    Points come from random values of the last n+1−c coordinates completed
    by exhaustive search over the first c. Returns the number of points checked.
    """
    rng = random.Random(seed)
    codim = len(Q.forms)
    free = Q.n_vars - codim
    forms = [_mod_terms(t, prime) for t in Q._form_terms]
    jacobian = [[_mod_terms(partial, prime) for partial in Q.gradient(j)] for j in range(codim)]
    max_attempts = max_attempts or samples * 50

    checked = 0
    for _ in range(max_attempts):
        if checked >= samples:
            break
        tail = [rng.randrange(prime) for _ in range(free)]
        solutions = [
            point for point in (list(head) + tail for head in product(range(prime), repeat=codim))
            if any(point) and all(_evaluate(f, point, prime) == 0 for f in forms)
        ]
        if not solutions:
            continue
        point = rng.choice(solutions)
        rows = [[_evaluate(partial, point, prime) for partial in row] for row in jacobian]
        if rank_mod_p(rows, prime) < codim:
            logger.error(f"❌ {Q.name}: Jacobian rank drops at {point} mod {prime}")
            raise InconsistentInputError(f"{Q.name} is singular at {point} modulo {prime}")
        checked += 1

    if checked < samples:
        logger.warning(f"⚠️ {Q.name}: only {checked}/{samples} points found mod {prime}")
    else:
        logger.info(f"✅ {Q.name}: Jacobian of full rank at {checked} points mod {prime}")
    return checked
