import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gvc_atlas.core import (
    ICIOTable,
    Mode,
    NodeIndex,
    TechCoefficients,
    leontief_inverse,
    power_series,
    technical_coefficients,
    validate_table,
)
from gvc_atlas.errors import ConditioningError, NonViableError, StructuralError
from gvc_atlas.ingest import SynthParams, synth_economy

from conftest import worked


def one_node(z, x, va, f=None):
    f = x - z if f is None else f
    return ICIOTable((NodeIndex("A", "S"),), [[z]], [[f]], [va], [x])


class TestValidate:
    def test_worked_table_balances(self, worked_table):
        report = validate_table(worked_table, Mode.STRICT)
        assert report.ok and report.violations == ()

    def test_perturbed_intermediate_breaks_column_b(self):
        t = worked()
        Z = np.array(t.Z)
        Z[0, 1] += 0.01 * t.x[1]
        bad = ICIOTable(t.nodes, Z, t.F, t.va, t.x)
        report = validate_table(bad)
        cols = [v for v in report.violations if v.kind == "column_balance"]
        assert len(cols) == 1 and cols[0].node == "B_M"
        assert cols[0].magnitude == pytest.approx(-1.2)
        # the same cell also sits in row A
        assert [v.node for v in report.violations if v.kind == "row_balance"] == ["A_M"]

    def test_negative_z_strict_vs_lenient(self):
        t = ICIOTable((NodeIndex("A", "S"),), [[-5.0]], [[105.0]], [105.0], [100.0])
        strict = validate_table(t, "strict")
        assert [v.kind for v in strict.violations] == ["negative_z"]
        lenient = validate_table(t, "lenient")
        assert lenient.ok and [w.kind for w in lenient.warnings] == ["negative_z"]

    def test_negative_final_demand_allowed_in_lenient(self):
        nodes = (NodeIndex("A", "S"), NodeIndex("B", "S"))
        t = ICIOTable(nodes, np.zeros((2, 2)), [[110.0, -10.0], [0.0, 50.0]], [100.0, 50.0], [100.0, 50.0])
        assert [v.kind for v in validate_table(t, "strict").violations] == ["negative_final"]
        assert validate_table(t, "lenient").ok

    def test_tolerance_is_relative(self):
        ok = one_node(20.0, 100.0, 80.0 + 5e-5)
        assert validate_table(ok).ok
        bad = one_node(20.0, 100.0, 80.0 + 5e-4)
        assert [v.kind for v in validate_table(bad).violations] == ["column_balance"]

    def test_idempotent(self, three_country_table):
        assert validate_table(three_country_table) == validate_table(three_country_table)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"Z": np.zeros((2, 3))},
            {"F": np.zeros((2, 3))},
            {"va": np.zeros(3)},
            {"x": np.zeros(1)},
        ],
    )
    def test_dimension_mismatch_is_structural(self, kwargs):
        t = worked()
        args = {"Z": t.Z, "F": t.F, "va": t.va, "x": t.x, **kwargs}
        with pytest.raises(StructuralError):
            ICIOTable(t.nodes, **args)

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(StructuralError, match="duplicate"):
            ICIOTable((NodeIndex("A", "S"), NodeIndex("A", "S")), np.zeros((2, 2)), np.zeros((2, 1)), [0, 0], [0, 0])


class TestTechnicalCoefficients:
    def test_no_intermediates(self):
        c = technical_coefficients(one_node(0.0, 10.0, 10.0))
        assert c.A.tolist() == [[0.0]] and c.v.tolist() == [1.0]

    def test_definition(self):
        c = technical_coefficients(one_node(20.0, 100.0, 80.0))
        assert c.A[0, 0] == pytest.approx(0.2) and c.v[0] == pytest.approx(0.8)

    def test_zero_output_column_zeroed(self):
        nodes = (NodeIndex("A", "S1"), NodeIndex("A", "S2"))
        t = ICIOTable(nodes, [[10.0, 0.0], [0.0, 0.0]], [[90.0], [0.0]], [90.0, 0.0], [100.0, 0.0])
        c = technical_coefficients(t)
        assert c.A[:, 1].tolist() == [0.0, 0.0] and c.v[1] == 0.0
        assert len(c.diagnostics) == 1 and "A_S2" in c.diagnostics[0]

    def test_coefficient_identity_on_balanced_tables(self, synth_table):
        c = technical_coefficients(synth_table)
        assert np.all(c.A >= 0)
        np.testing.assert_allclose(c.A.sum(axis=0) + c.v, 1.0, atol=1e-9, rtol=0)

    def test_reconstruct_z(self, synth_table):
        c = technical_coefficients(synth_table)
        Z = c.A * synth_table.x[None, :]
        np.testing.assert_allclose(Z, synth_table.Z, rtol=1e-9, atol=0)


def coeffs(A):
    A = np.asarray(A, dtype=float)
    return TechCoefficients(A, 1.0 - A.sum(axis=0))


class TestLeontief:
    def test_zero(self):
        assert leontief_inverse(coeffs([[0.0]])).B.tolist() == [[1.0]]

    def test_half(self):
        assert leontief_inverse(coeffs([[0.5]])).B[0, 0] == pytest.approx(2.0, abs=1e-15)

    def test_two_by_two_closed_form(self):
        A = [[0.2, 0.3], [0.4, 0.1]]
        # (I - A)^-1 = adj / det, det = 0.8 * 0.9 - 0.3 * 0.4 = 0.6
        expected = np.array([[0.9, 0.3], [0.4, 0.8]]) / 0.6
        leo = leontief_inverse(coeffs(A))
        np.testing.assert_allclose(leo.B, expected, atol=1e-12)
        np.testing.assert_allclose(leo.B, [[1.5, 0.5], [0.6667, 1.3333]], atol=1e-4)
        np.testing.assert_allclose(power_series(np.array(A), 200), expected, atol=1e-12)
        assert leo.residual_norm < 1e-8

    def test_non_viable_names_nodes(self):
        nodes = (NodeIndex("A", "S1"), NodeIndex("A", "S2"))
        c = TechCoefficients(np.array([[0.5, 0.1], [0.6, 0.1]]), np.array([0.0, 0.8]), nodes)
        with pytest.raises(NonViableError) as err:
            leontief_inverse(c)
        assert err.value.nodes == ("A_S1",)

    def test_conditioning_error(self):
        with pytest.raises(ConditioningError) as err:
            leontief_inverse(coeffs([[0.2, 0.3], [0.4, 0.1]]), tol=0.0)
        assert err.value.residual >= 0.0

    def test_nonnegative_and_value_added_row_identity(self, synth_table):
        c = technical_coefficients(synth_table)
        leo = leontief_inverse(c)
        assert leo.residual_norm < 1e-8
        assert leo.B.min() >= -1e-10
        np.testing.assert_allclose(c.v @ leo.B, 1.0, atol=1e-9, rtol=0)

    @settings(max_examples=30, deadline=None)
    @given(
        g=st.integers(1, 5),
        n=st.integers(1, 4),
        seed=st.integers(0, 2**32),
        rho=st.floats(0.05, 0.7),
        openness=st.floats(0.0, 0.5),
    )
    def test_matches_power_series(self, g, n, seed, rho, openness):
        t = synth_economy(SynthParams(g, n, seed, openness, rho))
        A = technical_coefficients(t).A
        assert A.sum(axis=0).max() <= 0.7 + 1e-12
        B = leontief_inverse(technical_coefficients(t)).B
        assert np.abs(B - power_series(A, 200)).max() < 1e-8
