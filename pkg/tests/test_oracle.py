import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgopt.oracle import (
    GRID_ARCS,
    OracleError,
    binary_spec,
    capped_simplex_spec,
    capped_simplex_vertices,
    diameter_bound,
    enumerate_grid_paths,
    enumerated_spec,
    grid_path_spec,
    interval_spec,
    is_feasible,
    right_arc,
    solve,
    solve_batch,
    solve_capped_simplex,
    solve_enumerated,
    solve_grid_path,
    solve_interval,
)


class TestBinary:
    def test_positive_cost_stays_at_zero(self):
        sol = solve(binary_spec(1), [1.0])
        assert sol.decision.tolist() == [0.0] and sol.value == 0.0

    def test_negative_cost_activates(self):
        sol = solve(binary_spec(1), [-1.0])
        assert sol.decision.tolist() == [1.0] and sol.value == -1.0

    def test_tie_breaks_to_smaller_decision(self):
        sol = solve(binary_spec(1), [0.0])
        assert sol.decision.tolist() == [0.0] and sol.value == 0.0


class TestInterval:
    @pytest.mark.parametrize("t,z,v", [(0.5, -1.0, -0.5), (-2.0, 1.0, -2.0), (0.0, -1.0, 0.0)])
    def test_sign_rule(self, t, z, v):
        sol = solve_interval([t])
        assert sol.decision.tolist() == [z]
        assert sol.value == pytest.approx(v, abs=0)


class TestGridPath:
    def test_uniform_costs(self):
        sol = solve_grid_path(np.ones(GRID_ARCS))
        assert sol.value == 8.0
        assert sol.decision.sum() == 8.0
        # tie-break: all rights first, then down the last column
        assert np.nonzero(sol.decision)[0].tolist() == [0, 1, 2, 3, 36, 37, 38, 39]

    def test_forced_negative_arc(self):
        t = np.zeros(GRID_ARCS)
        t[right_arc(0, 2)] = -5.0
        sol = solve_grid_path(t)
        assert sol.value == -5.0
        assert sol.decision[right_arc(0, 2)] == 1.0

    def test_matches_brute_force_enumeration(self, rng):
        paths = enumerate_grid_paths()
        assert paths.shape == (70, GRID_ARCS)
        T = rng.uniform(-5.0, 5.0, size=(1000, GRID_ARCS))
        Z, v = solve_batch(grid_path_spec(), T)
        all_vals = T @ paths.T
        idx = np.argmin(all_vals, axis=1)
        brute_v = np.einsum("ij,ij->i", T, paths[idx])
        assert np.array_equal(v, brute_v)

    def test_wrong_dimension_rejected(self):
        with pytest.raises(OracleError):
            solve_grid_path(np.ones(39))


class TestCappedSimplex:
    def test_uncapped_picks_cheapest(self):
        sol = solve_capped_simplex([3.0, 1.0, 2.0], 1.0)
        assert sol.decision.tolist() == [0.0, 1.0, 0.0] and sol.value == 1.0

    def test_cap_spreads_mass(self):
        sol = solve_capped_simplex([3.0, 1.0, 2.0], 0.5)
        assert sol.decision.tolist() == [0.0, 0.5, 0.5]
        assert sol.value == pytest.approx(1.5)

    def test_unique_feasible_point(self, rng):
        for _ in range(5):
            sol = solve_capped_simplex(rng.normal(size=2), 0.5)
            assert sol.decision.tolist() == [0.5, 0.5]

    def test_infeasible_rejected(self):
        with pytest.raises(OracleError):
            capped_simplex_spec(3, 0.2)

    @pytest.mark.parametrize("d,u", [(3, 0.5), (4, 0.3), (4, 0.25), (2, 0.9)])
    def test_matches_vertex_enumeration(self, d, u, rng):
        spec = capped_simplex_spec(d, u)
        verts = capped_simplex_vertices(d, u)
        T = rng.normal(size=(300, d))
        _, v = solve_batch(spec, T)
        assert np.allclose(v, (T @ verts.T).min(axis=1), atol=1e-12)


class TestEnumerated:
    def test_equals_binary(self):
        sol = solve_enumerated([[0.0], [1.0]], [1.0])
        assert sol.decision.tolist() == [0.0] and sol.value == 0.0

    def test_equals_interval(self):
        sol = solve_enumerated([[-1.0], [1.0]], [0.5])
        assert sol.decision.tolist() == [-1.0] and sol.value == -0.5

    def test_equals_grid_path_oracle(self, rng):
        spec = enumerated_spec(enumerate_grid_paths())
        T = rng.uniform(-2.0, 2.0, size=(50, GRID_ARCS))
        _, v_enum = solve_batch(spec, T)
        _, v_dp = solve_batch(grid_path_spec(), T)
        assert np.allclose(v_enum, v_dp, atol=1e-12)

    def test_empty_list_rejected(self):
        with pytest.raises(OracleError):
            enumerated_spec([])


class TestDiameterBound:
    def test_known_values(self):
        assert diameter_bound(binary_spec(1)) == 1.0
        assert diameter_bound(interval_spec()) == 1.0
        assert diameter_bound(grid_path_spec()) == pytest.approx(np.sqrt(8.0))

    def test_capped_simplex_from_vertices(self):
        spec = capped_simplex_spec(3, 0.5)
        verts = capped_simplex_vertices(3, 0.5)
        assert diameter_bound(spec) == pytest.approx(np.linalg.norm(verts, axis=1).max())
        assert diameter_bound(spec) == pytest.approx(np.sqrt(0.5))

    def test_bound_holds_for_solutions(self, rng):
        for spec in (binary_spec(4), grid_path_spec(), capped_simplex_spec(5, 0.3)):
            Z, _ = solve_batch(spec, rng.normal(size=(200, spec.d)))
            assert np.all(np.linalg.norm(Z, axis=1) <= diameter_bound(spec) + 1e-12)


class TestInvariants:
    @pytest.mark.parametrize(
        "spec",
        [binary_spec(4), interval_spec(), grid_path_spec(), capped_simplex_spec(6, 0.3)],
        ids=lambda s: s.kind,
    )
    def test_value_consistency_and_feasibility(self, spec, rng):
        T = rng.normal(size=(10_000, spec.d)) * 3.0
        Z, v = solve_batch(spec, T)
        dots = np.einsum("ij,ij->i", T, Z)
        assert np.allclose(v, dots, rtol=1e-9, atol=1e-12)
        for i in range(0, len(T), 500):
            assert is_feasible(spec, Z[i])

    @pytest.mark.parametrize(
        "spec",
        [binary_spec(3), interval_spec(), grid_path_spec(), capped_simplex_spec(5, 0.4)],
        ids=lambda s: s.kind,
    )
    def test_value_concave_and_lipschitz(self, spec, rng):
        B = diameter_bound(spec)
        T = rng.normal(size=(2000, spec.d)) * 2.0
        S = rng.normal(size=(2000, spec.d)) * 2.0
        _, vt = solve_batch(spec, T)
        _, vs = solve_batch(spec, S)
        _, vmid = solve_batch(spec, 0.5 * (T + S))
        assert np.all(vmid >= 0.5 * vt + 0.5 * vs - 1e-9)
        assert np.all(np.abs(vt - vs) <= B * np.linalg.norm(T - S, axis=1) + 1e-9)

    def test_determinism(self, rng):
        for spec in (binary_spec(4), grid_path_spec(), capped_simplex_spec(6, 0.3)):
            T = rng.normal(size=(100, spec.d))
            Z1, v1 = solve_batch(spec, T)
            Z2, v2 = solve_batch(spec, T)
            assert np.array_equal(Z1, Z2) and np.array_equal(v1, v2)

    def test_nonfinite_rejected(self):
        with pytest.raises(OracleError):
            solve(binary_spec(2), [np.nan, 0.0])

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_binary_value_consistency_property(self, costs):
        sol = solve(binary_spec(len(costs)), costs)
        assert sol.value == pytest.approx(float(np.dot(costs, sol.decision)), rel=1e-9, abs=1e-12)
        assert is_feasible(binary_spec(len(costs)), sol.decision)

    @given(st.floats(-50, 50))
    @settings(max_examples=200, deadline=None)
    def test_interval_property(self, t):
        sol = solve_interval([t])
        assert sol.value == pytest.approx(-abs(t), rel=1e-12, abs=1e-12)
        assert abs(sol.decision[0]) == 1.0
