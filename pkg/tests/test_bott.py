# tests/test_bott.py
import random

import pytest

from src.core.arith import binomial
from src.core.exceptions import DomainError
from src.schemas.sheaves import AmbientSheaf, SheafExpr, SheafKind
from src.services import bott


@pytest.mark.parametrize("n,q,k,expected", [
    (3, 0, 2, 10),
    (3, 0, -1, 0),
    (3, 3, -4, 1),
    (3, 3, -5, 4),
    (3, 1, 0, 0),
    (5, 0, 2, 21),
])
def test_structure_sheaf(n, q, k, expected):
    assert bott.coh_structure(n, q, k) == expected


@pytest.mark.parametrize("n,q,k,expected", [
    (3, 0, 2, 6),
    (3, 0, 1, 0),
    (3, 1, 0, 1),
    (3, 2, 0, 0),
    (3, 3, -4, 15),
    (3, 3, -3, 4),
    (3, 3, -2, 0),
    (4, 0, 3, 40),
])
def test_cotangent_sheaf(n, q, k, expected):
    assert bott.coh_omega1(n, q, k) == expected


def test_tangent_sheaf_sections():
    assert bott.coh_tangent(3, 0, -1) == 4
    assert bott.coh_tangent(3, 0, 0) == 15
    assert bott.coh_tangent(3, 2, -4) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_tangent_sections_agree_with_euler_sequence(n):
    for k in range(-1, 8):
        assert bott.coh_tangent(n, 0, k) == bott.h0_tangent_via_euler(n, k)


@pytest.mark.parametrize("k", range(-8, 6))
def test_euler_characteristic_is_hilbert_polynomial(k):
    assert bott.euler_characteristic(3, k) * 6 == (k + 1) * (k + 2) * (k + 3)


def test_domain_errors():
    with pytest.raises(DomainError):
        bott.coh_structure(1, 0, 0)
    with pytest.raises(DomainError):
        bott.coh_omega1(3, 4, 0)
    with pytest.raises(DomainError):
        bott.h0_tangent_via_euler(3, -2)


def test_profile_of_direct_sum():
    n = 3
    expr = SheafExpr.direct_sum(n, [
        AmbientSheaf(SheafKind.STRUCTURE, -4, n),
        AmbientSheaf(SheafKind.STRUCTURE, -4, n),
        AmbientSheaf(SheafKind.COTANGENT, 0, n),
    ])
    profile = bott.profile(expr)
    assert [str(d) for d in profile.dims] == ["0", "1", "0", "2"]
    assert profile.label == "O(-4)^2+Omega1(0)"


def test_profile_refuses_non_ambient_sheaves():
    with pytest.raises(DomainError):
        bott.profile(SheafExpr.line(3, 0).pullback())


@pytest.mark.parametrize("d", range(0, 7))
def test_plane_foliations(d):
    assert bott.projective_foliation_space_dim(2, d) == (d + 1) * (d + 3)


def test_space_foliations_of_degree_one():
    assert bott.projective_foliation_space_dim(3, 1) == 15


def test_pascal_identity():
    rng = random.Random(7)
    for _ in range(10_000):
        n = rng.randrange(1, 80)
        k = rng.randrange(0, n + 1)
        assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_serre_duality_of_line_bundles(n):
    for k in range(-12, 13):
        for q in range(n + 1):
            assert bott.coh_structure(n, q, k) == bott.coh_structure(n, n - q, -k - n - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cotangent_vanishing_band(n):
    for k in range(-12, 13):
        for q in range(1, n):
            expected = 1 if (q, k) == (1, 0) else 0
            assert bott.coh_omega1(n, q, k) == expected


def test_tangent_vanishing_fails_only_in_degree_one():
    assert bott.coh_omega1(3, 0, 4) == 45
    assert bott.coh_tangent(3, 2, -4) != 0
    for d in range(2, 12):
        assert bott.coh_tangent(3, 2, -3 - d) == 0
        assert bott.coh_tangent(3, 1, 1 - d) == 0
