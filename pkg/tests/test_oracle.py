# tests/test_oracle.py
from fractions import Fraction

import pytest
import sympy as sp

from src.core.exceptions import (
    DomainError, EngineConsistencyError, InconsistentInputError, ModelFormatError, RegularSequenceError,
    UndeterminedError,
)
from src.repositories.model_repository import ModelRepository, parse_model
from src.schemas.cohomology import CohProfile, Dim
from src.schemas.reports import ResultStatus
from src.schemas.sheaves import AmbientSheaf, SheafExpr, SheafKind
from src.schemas.surfaces import K3Type
from src.services import ci_engine
from src.services.seqchase import ChaseTrace
from src.services.oracle import (
    GradedMap, GradedQuotient, HomogeneousVectorField, conormal_map, euler_kernel_dim, euler_map,
    foliation_dim_oracle, hamiltonian_fields, hilbert_function, is_invariant, section_space_dim,
    singular_scheme_ideal, spot_check_smoothness,
)


def koszul_matches(Q: GradedQuotient, degrees) -> None:
    for m in degrees:
        assert Q.dim(m) == ci_engine.hilbert_function(Q.surface, m), f"{Q.name} m={m}"


class TestHilbertFunction:
    def test_quartic_model(self, quartic_model):
        koszul_matches(quartic_model, range(-3, 9))
        assert hilbert_function(quartic_model, 5) == 52

    def test_quadric_cubic_model(self, quadric_cubic_model):
        koszul_matches(quadric_cubic_model, range(-3, 7))

    def test_three_quadrics_model(self, three_quadrics_model):
        koszul_matches(three_quadrics_model, range(-3, 6))
        assert hilbert_function(three_quadrics_model, 2) == 18

    @pytest.mark.slow
    @pytest.mark.parametrize("surface", list(K3Type))
    def test_models_up_to_degree_twelve(self, repository, surface):
        koszul_matches(repository.load(surface), range(-3, 13))

    def test_non_regular_forms_are_caught(self):
        x = sp.symbols("x0:4")
        Q = GradedQuotient(3, [x[0] * x[1], x[0] * x[2]], name="reducible")
        assert hilbert_function(Q, 2) == 8
        with pytest.raises(RegularSequenceError):
            hilbert_function(Q, 3)


class TestFoliationOracle:
    @pytest.mark.parametrize("model,k,expected", [
        ("quartic_model", 2, 6),
        ("quartic_model", 5, 84),
        ("quadric_cubic_model", 2, 11),
        ("quartic_model", 0, 0),
    ])
    def test_euler_kernel(self, request, model, k, expected):
        assert euler_kernel_dim(request.getfixturevalue(model), k) == expected

    @pytest.mark.parametrize("model,d,expected", [
        ("quartic_model", 3, 6),
        ("quartic_model", 6, 80),
        ("three_quadrics_model", 4, 52),
        ("quadric_cubic_model", 3, 10),
    ])
    def test_foliation_dimension(self, request, model, d, expected):
        assert foliation_dim_oracle(request.getfixturevalue(model), d) == expected

    @pytest.mark.parametrize("surface,d_max", [(K3Type.QUARTIC, 8), (K3Type.QUADRIC_CUBIC, 6), (K3Type.THREE_QUADRICS, 5)])
    def test_oracle_agrees_with_chase(self, repository, engine, surface, d_max):
        Q = repository.load(surface)
        for d in range(3, d_max + 1):
            result = engine.foliation_space_dim(surface, d)
            assert foliation_dim_oracle(Q, d) == result.h0, f"{surface.value} d={d}"
            assert euler_kernel_dim(Q, d - 1) == result.h0_omega1_pullback, f"{surface.value} d={d}"

    @pytest.mark.parametrize("surface", list(K3Type))
    def test_no_twisted_one_forms_in_degree_one(self, repository, surface):
        assert euler_kernel_dim(repository.load(surface), 1) == 0

    def test_graded_map_apply_drops_cancelled_entries(self):
        graded = GradedMap(
            source_degrees=(0, 0), target_degree=0, target_dim=2,
            columns=[{0: Fraction(1)}, {0: Fraction(-1), 1: Fraction(2)}],
        )
        assert graded.apply({0: Fraction(1), 1: Fraction(1)}) == {1: Fraction(2)}
        assert graded.apply({}) == {}

    @pytest.mark.parametrize("model,d", [("quartic_model", 6), ("quadric_cubic_model", 3), ("three_quadrics_model", 4)])
    def test_conormal_image_lies_in_the_euler_kernel(self, request, model, d):
        Q = request.getfixturevalue(model)
        conormal = conormal_map(Q, d)
        euler = euler_map(Q, d - 1)

        assert conormal.source_dim > 0
        assert all(euler.apply(column) == {} for column in conormal.columns)

    def test_degree_zero_is_rejected(self, quartic_model):
        with pytest.raises(DomainError):
            foliation_dim_oracle(quartic_model, 0)

    def test_oracle_backed_engine_prefers_the_chase(self, oracle_engine):
        result = oracle_engine.foliation_space_dim(K3Type.QUARTIC, 4)
        assert result.h0 == 20
        assert result.provenance == "chase"


class TestOracleFallback:
    @pytest.fixture
    def open_cotangent_slot(self, monkeypatch):
        """Leaves h0 of i*Omega1(5) on the quartic bounded by the given interval"""
        chased = ci_engine.pullback_chase

        def install(bound: Dim):
            target = SheafExpr.of(AmbientSheaf(SheafKind.COTANGENT, 5, 3))

            def partial_chase(X, F):
                if F == target:
                    return CohProfile.unknown(F.pullback().label, 3).with_dim(0, bound), ChaseTrace()
                return chased(X, F)

            monkeypatch.setattr(ci_engine, "pullback_chase", partial_chase)

        return install

    def test_open_slot_is_resolved_by_the_oracle(self, oracle_engine, quartic_model, open_cotangent_slot):
        open_cotangent_slot(Dim.unknown())

        assert oracle_engine.coh_pullback_omega1(K3Type.QUARTIC, 5) == euler_kernel_dim(quartic_model, 5) == 84
        result = oracle_engine.foliation_space_dim(K3Type.QUARTIC, 6)
        assert result.status is ResultStatus.NEEDED_ORACLE
        assert result.provenance == "oracle:quartic.txt"
        assert result.h0 == 80

    def test_oracle_value_outside_the_chase_bound_is_rejected(self, oracle_engine, open_cotangent_slot):
        open_cotangent_slot(Dim.unknown(0, 10))

        with pytest.raises(EngineConsistencyError):
            oracle_engine.coh_pullback_omega1(K3Type.QUARTIC, 5)

    def test_open_slot_without_fallback_stays_undetermined(self, engine, open_cotangent_slot):
        open_cotangent_slot(Dim.unknown())

        with pytest.raises(UndeterminedError):
            engine.coh_pullback_omega1(K3Type.QUARTIC, 5)
        assert engine.foliation_space_dim(K3Type.QUARTIC, 6).status is ResultStatus.UNDETERMINED


class TestVectorFields:
    def test_hamiltonian_fields_span_degree_three(self, quartic_model):
        fields = hamiltonian_fields(quartic_model)
        assert len(fields) == 6
        assert all(is_invariant(F, quartic_model) for F in fields)
        assert section_space_dim(fields, quartic_model) == foliation_dim_oracle(quartic_model, 3)

    def test_radial_field_is_invariant_and_trivial(self, quartic_model):
        radial = HomogeneousVectorField.radial(quartic_model.gens)
        assert is_invariant(radial, quartic_model)
        assert all(m.is_zero for m in singular_scheme_ideal(radial).minors)

    def test_constant_field_is_not_invariant(self, quartic_model):
        field = HomogeneousVectorField.from_exprs([1, 0, 0, 0], quartic_model.gens)
        assert not is_invariant(field, quartic_model)

    def test_shear_field_is_not_invariant(self, quartic_model):
        x = quartic_model.gens
        field = HomogeneousVectorField.from_exprs([x[1], 0, 0, 0], x)
        assert not is_invariant(field, quartic_model)

    def test_plane_minors(self):
        x = sp.symbols("x0:3")
        ideal = singular_scheme_ideal(HomogeneousVectorField.from_exprs([x[1], 0, 0], x))
        assert [m.as_expr() for m in ideal.minors] == [-x[1] ** 2, -x[1] * x[2], 0]
        assert ideal.common_factor.as_expr() == x[1]

    def test_hamiltonian_minors_have_no_common_factor(self, quartic_model):
        field = HomogeneousVectorField.hamiltonian(quartic_model.forms[0], 0, 1)
        ideal = singular_scheme_ideal(field)
        x = quartic_model.gens
        assert ideal.minors[0].as_expr() == sp.expand(x[0] * (-4 * x[0] ** 3) - x[1] * 4 * x[1] ** 3)
        assert ideal.common_factor.as_expr() == 1

    def test_singular_scheme_common_factor(self):
        x = sp.symbols("x0:4")
        field = HomogeneousVectorField.from_exprs([x[0] * x[1], x[0] ** 2, 0, 0], x)
        ideal = singular_scheme_ideal(field)
        assert len(ideal.minors) == 6
        assert ideal.common_factor.as_expr() == x[0]

    def test_mixed_degrees_are_rejected(self):
        x = sp.symbols("x0:4")
        with pytest.raises(DomainError):
            HomogeneousVectorField.from_exprs([x[0], x[1] ** 2, 0, 0], x)

    def test_hamiltonian_fields_need_a_hypersurface(self, quadric_cubic_model):
        with pytest.raises(DomainError):
            hamiltonian_fields(quadric_cubic_model)


class TestSmoothness:
    def test_fermat_quartic_is_smooth_mod_13(self, quartic_model):
        assert spot_check_smoothness(quartic_model, samples=20) == 20

    def test_three_quadrics_are_smooth_mod_13(self, three_quadrics_model):
        assert spot_check_smoothness(three_quadrics_model, samples=10) == 10

    def test_singular_model_is_rejected(self):
        x = sp.symbols("x0:4")
        with pytest.raises(InconsistentInputError):
            spot_check_smoothness(GradedQuotient(3, [x[0] ** 4], name="double"), samples=5)


class TestModelFiles:
    def test_parse_model(self):
        Q = parse_model("# comment\nn=3 degrees=[4]\n1:4,0,0,0 -1:0,4,0,0 1/2:0,0,2,2\n")
        assert Q.degrees == (4,)
        assert Q.surface.name == "4 in P3"

    @pytest.mark.parametrize("text", [
        "",
        "degrees=[4]\n1:4,0,0,0",
        "n=3 degrees=[4]\n1:3,0,0,0",
        "n=3 degrees=[4]\n1:4,0,0",
        "n=3 degrees=[2,2]\n1:2,0,0,0",
        "n=3 degrees=[4]\nx:4,0,0,0",
        "n=3 degrees=[4]\n1:4,0,0,0 -1:4,0,0,0",
    ])
    def test_malformed_models(self, text):
        with pytest.raises(ModelFormatError):
            parse_model(text)

    def test_repository_checks_the_catalog(self, tmp_path):
        (tmp_path / "quadric_cubic.txt").write_text("n=3 degrees=[4]\n1:4,0,0,0 1:0,4,0,0 1:0,0,4,0 1:0,0,0,4\n")
        with pytest.raises(ModelFormatError):
            ModelRepository(tmp_path).load(K3Type.QUADRIC_CUBIC)

    def test_missing_model_file(self, tmp_path):
        with pytest.raises(ModelFormatError):
            ModelRepository(tmp_path).load(K3Type.QUARTIC)

    def test_repository_caches(self, repository):
        assert repository.load(K3Type.QUARTIC) is repository.load(K3Type.QUARTIC)
