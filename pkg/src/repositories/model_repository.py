# src/repositories/model_repository.py
from fractions import Fraction
from pathlib import Path
from threading import Lock
from typing import Dict, List, Optional, Tuple
import logging
import re

import sympy as sp

from src.core.config import settings
from src.core.exceptions import ModelFormatError
from src.schemas.surfaces import K3Type
from src.services.oracle import GradedQuotient

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^n\s*=\s*(\d+)\s+degrees\s*=\s*\[?\s*([\d,\s]+?)\s*\]?$")


def _parse_term(token: str, n_vars: int) -> Tuple[Tuple[int, ...], Fraction]:
    try:
        coeff_text, exponent_text = token.split(":")
        coeff = Fraction(coeff_text)
        exponents = tuple(int(e) for e in exponent_text.split(","))
    except ValueError as e:
        raise ModelFormatError(f"malformed term {token!r}: {e}")
    if len(exponents) != n_vars or any(e < 0 for e in exponents):
        raise ModelFormatError(f"term {token!r} needs {n_vars} nonnegative exponents")
    return exponents, coeff


def parse_model(text: str, name: str = "model") -> GradedQuotient:
    """
    Header `n=<int> degrees=[d1,...]`, then one form per line as
    whitespace-separated `coeff:e0,e1,...,en` terms. '#' starts a comment line.
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise ModelFormatError(f"{name}: empty model")

    header = _HEADER.match(lines[0])
    if not header:
        raise ModelFormatError(f"{name}: bad header {lines[0]!r}")
    n = int(header.group(1))
    degrees = [int(d) for d in header.group(2).replace(" ", "").split(",") if d]
    form_lines = lines[1:]
    if len(form_lines) != len(degrees):
        raise ModelFormatError(f"{name}: {len(degrees)} degrees declared, {len(form_lines)} forms given")

    gens = sp.symbols(f"x0:{n + 1}")
    forms: List[sp.Poly] = []
    for line, degree in zip(form_lines, degrees):
        terms: Dict[Tuple[int, ...], sp.Rational] = {}
        for token in line.split():
            exponents, coeff = _parse_term(token, n + 1)
            if sum(exponents) != degree:
                raise ModelFormatError(f"{name}: term {token!r} is not of degree {degree}")
            terms[exponents] = terms.get(exponents, 0) + sp.Rational(coeff.numerator, coeff.denominator)
        poly = sp.Poly.from_dict(terms, *gens, domain=sp.QQ)
        if poly.is_zero:
            raise ModelFormatError(f"{name}: form of degree {degree} is zero")
        forms.append(poly)

    return GradedQuotient(n, forms, name=name)


class ModelRepository:
    """Loads plain-text surface models, one GradedQuotient per file"""

    def __init__(self, model_dir: Optional[Path] = None):
        self.model_dir = Path(model_dir or settings.model_dir)
        self._cache: Dict[K3Type, GradedQuotient] = {}
        self._lock = Lock()

    @staticmethod
    def surfaces() -> List[K3Type]:
        return list(K3Type)

    def path_for(self, surface: K3Type) -> Path:
        return self.model_dir / surface.model_file

    def load(self, surface: K3Type) -> GradedQuotient:
        with self._lock:
            if surface not in self._cache:
                path = self.path_for(surface)
                try:
                    quotient = parse_model(path.read_text(), name=path.name)
                except OSError as e:
                    logger.error(f"❌ Cannot read model {path}: {str(e)}")
                    raise ModelFormatError(f"cannot read model {path}: {e}")
                if quotient.surface != surface.surface:
                    raise ModelFormatError(
                        f"{path.name} defines {quotient.surface.name}, expected {surface.surface.name}"
                    )
                logger.info(f"✅ Loaded {surface.value} model from {path}")
                self._cache[surface] = quotient
            return self._cache[surface]
