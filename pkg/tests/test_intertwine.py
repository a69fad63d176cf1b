"""Riccati solver, single steps and the iterated design loop."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import revivals as rv
from revivals.grids import Grid, Wavefunction
from revivals.intertwine import (
    DegenerateLevelError,
    DesignStepError,
    LevelOrderError,
    PoleDetectedError,
)

import oracles


def riccati_residual(u, v_prev, level) -> float:
    """Max interior defect of U' + U^2 - 2(V - E), with U' by centered FD."""
    du = np.gradient(u.values, u.grid.dx, edge_order=2)
    res = du + u.values**2 - 2.0 * (v_prev.values - float(level))
    return float(np.abs(res[1:-1]).max())


@pytest.fixture(scope="module")
def pt_step():
    """Constant base at 1 with one level inserted at 0 (exactly solvable)."""
    grid = rv.suggest_grid_constant_base([0], 1.0, eigen_tolerance=1e-5)
    base = rv.constant_potential(grid, 1.0)
    u = rv.solve_riccati(base, 0)
    v1 = rv.intertwine_step(base, 0)
    return grid, base, u, v1


class TestSolveRiccati:
    def test_constant_base_gives_tanh(self, pt_step):
        grid, base, u, _ = pt_step
        k = math.sqrt(2.0)
        assert np.abs(u.values - k * np.tanh(k * grid.x)).max() < 1e-8

    def test_initial_slope_matches_equation(self):
        # U'(0) = 2 (V(0) - E) when U(0) = 0
        grid = Grid(6.0, 4001)
        v0 = rv.harmonic_potential(grid)
        u = rv.solve_riccati(v0, -1)
        c = grid.center_index
        slope = (u.values[c + 1] - u.values[c - 1]) / (2 * grid.dx)
        assert slope == pytest.approx(2.0, abs=1e-5)

    def test_alpha_zero_gives_odd_superpotential(self):
        grid = Grid(6.0, 2001)
        u = rv.solve_riccati(rv.harmonic_potential(grid), -1)
        assert np.array_equal(u.values, -u.values[::-1])

    def test_against_renormalized_schrodinger_oracle(self):
        grid = Grid(6.0, 1201)
        u = rv.solve_riccati(rv.harmonic_potential(grid), -1)
        c = grid.center_index
        reference = oracles.log_derivative_by_renormalized_schrodinger(
            lambda x: 0.5 * x * x, -1.0, grid.x[c:]
        )
        assert np.abs(u.values[c:] - reference).max() < 1e-8

    def test_riccati_defect_small(self, pt_step):
        grid, base, u, _ = pt_step
        # centered-difference U' limits the defect to O(dx^2)
        assert riccati_residual(u, base, 0) < 2e-4

    def test_nonzero_alpha_initial_value(self):
        grid = Grid(8.0, 2001)
        base = rv.constant_potential(grid, 1.0)
        u = rv.solve_riccati(base, 0, alpha=0.2)
        assert u.values[grid.center_index] == 0.2
        assert not np.array_equal(u.values, -u.values[::-1])

    def test_level_above_base_hits_pole(self):
        grid = Grid(12.0, 2001)
        base = rv.constant_potential(grid, 0.0)
        with pytest.raises(PoleDetectedError) as err:
            rv.solve_riccati(base, 1)  # inside the continuum: tan-like blow-up
        assert 0 < err.value.x_blowup <= grid.half_width

    def test_large_alpha_hits_pole(self):
        # |alpha| > k plants a zero of the auxiliary solution on one side
        grid = Grid(12.0, 2001)
        base = rv.constant_potential(grid, 1.0)
        with pytest.raises(PoleDetectedError):
            rv.solve_riccati(base, 0, alpha=-3.0)

    def test_degenerate_level_rejected(self):
        grid = Grid(8.0, 1001)
        v1 = rv.intertwine_step(rv.constant_potential(grid, 1.0), 0)
        with pytest.raises(DegenerateLevelError):
            rv.solve_riccati(v1, 0)

    def test_wrong_order_rejected(self):
        grid = Grid(8.0, 1001)
        v1 = rv.intertwine_step(rv.constant_potential(grid, 1.0), 0)
        with pytest.raises(LevelOrderError):
            rv.solve_riccati(v1, Fraction(1, 4))


class TestIntertwineStep:
    def test_poschl_teller_form(self, pt_step):
        grid, _, _, v1 = pt_step
        assert np.abs(v1.values - oracles.poschl_teller_potential(grid.x, 1.0, 0.0)).max() < 1e-8

    def test_shallow_level_gives_shallow_well(self):
        # E just below the flat base: depth k^2 = 2 (c - E) is small
        grid = Grid(40.0, 4001)
        v1 = rv.intertwine_step(rv.constant_potential(grid, 1.0), Fraction(99, 100))
        depth = 1.0 - v1.values.min()
        assert depth == pytest.approx(2.0 * 0.01, rel=1e-6)

    def test_even_base_stays_exactly_even(self, mini_biperiodic_case):
        assert mini_biperiodic_case.potential.is_even()

    def test_two_forms_of_partner_potential_agree(self, pt_step):
        grid, base, u, v1 = pt_step
        du = np.gradient(u.values, grid.dx, edge_order=2)
        diff = np.abs((base.values - du) - v1.values)
        assert diff[1:-1].max() < 2e-4

    def test_injected_levels_recorded_descending(self, mini_biperiodic_case):
        assert mini_biperiodic_case.potential.injected_levels == mini_biperiodic_case.added_desc

    def test_spectrum_preserved_and_ground_inserted(self):
        grid = rv.suggest_grid_harmonic_base([-1], kept_top=4.5, eigen_tolerance=1e-4)
        v0 = rv.harmonic_potential(grid)
        before = rv.lowest_eigenvalues(rv.discretize(v0), 4)
        v1 = rv.intertwine_step(v0, -1)
        after = rv.lowest_eigenvalues(rv.discretize(v1), 5)
        assert after[0] == pytest.approx(-1.0, abs=1e-4)
        assert np.abs(after[1:] - before).max() < 1e-4


class TestDesignLoop:
    def test_empty_add_list_returns_base(self):
        grid = Grid(5.0, 501)
        v0 = rv.harmonic_potential(grid)
        out = rv.design_potential(v0, [])
        assert np.array_equal(out.values, v0.values)
        assert out.injected_levels == ()

    def test_bottom_up_equals_reversed_top_down(self):
        grid = rv.suggest_grid_constant_base([2, 3, 5], 7.0, eigen_tolerance=1e-3)
        base = rv.constant_potential(grid, 7.0)
        down = rv.design_potential(base, [5, 3, 2])
        up = rv.design_bottom_up([2, 3, 5], base)
        assert np.array_equal(down.values, up.values)
        assert down.injected_levels == up.injected_levels

    def test_single_level_bottom_up_is_poschl_teller(self):
        grid = rv.suggest_grid_constant_base([0], 1.0, eigen_tolerance=1e-4)
        base = rv.constant_potential(grid, 1.0)
        out = rv.design_bottom_up([0], base)
        assert np.abs(out.values - oracles.poschl_teller_potential(grid.x, 1.0, 0.0)).max() < 1e-7

    def test_unsorted_add_list_rejected(self):
        grid = Grid(5.0, 501)
        with pytest.raises(LevelOrderError):
            rv.design_potential(rv.harmonic_potential(grid), [-3, -1])

    def test_failing_step_names_index(self):
        # first level sits inside the base continuum: pole at step 0
        grid = Grid(10.0, 1001)
        base = rv.constant_potential(grid, 0.0)
        with pytest.raises(DesignStepError) as err:
            rv.design_potential(base, [2, 1])
        assert err.value.index == 0
        assert isinstance(err.value.__cause__, PoleDetectedError)

    def test_failure_index_points_at_bad_level(self):
        # a tight blow-up threshold trips on the deep second level only
        grid = Grid(10.0, 1001)
        base = rv.constant_potential(grid, 1.0)
        with pytest.raises(DesignStepError) as err:
            rv.design_potential(base, [0, -50], blowup_threshold=5.0)
        assert err.value.index == 1
        assert isinstance(err.value.__cause__, PoleDetectedError)

    def test_design_error_wraps_degenerate(self):
        grid = Grid(8.0, 1001)
        base = rv.constant_potential(grid, 1.0)
        v1 = rv.design_potential(base, [0])
        with pytest.raises(DesignStepError) as err:
            rv.design_potential(v1, [0, -1])
        assert err.value.index == 0
        assert isinstance(err.value.__cause__, DegenerateLevelError)


class TestApplyIntertwiner:
    def test_zero_superpotential_flips_parity(self):
        grid = Grid(5.0, 1001)
        u = rv.Superpotential(grid, np.zeros(grid.n_points), Fraction(0), 0.0)
        even = Wavefunction(grid, np.exp(-grid.x**2, dtype=complex))
        out = rv.apply_intertwiner(u, even, +1)
        inner = out.amplitudes[2:-2]
        assert np.abs(inner + inner[::-1]).max() < 1e-8

    def test_grid_mismatch_rejected(self):
        u = rv.Superpotential(Grid(5.0, 1001), np.zeros(1001), Fraction(0), 0.0)
        psi = Wavefunction(Grid(5.0, 501), np.ones(501, dtype=complex))
        with pytest.raises(ValueError):
            rv.apply_intertwiner(u, psi)

    def test_ground_state_annihilated(self):
        grid = rv.suggest_grid_constant_base([0], 1.0, eigen_tolerance=1e-5)
        base = rv.constant_potential(grid, 1.0)
        u = rv.solve_riccati(base, 0)
        v1 = rv.intertwine_step(base, 0)
        ground = rv.eigenstates(rv.discretize(v1), 1)[0]
        assert rv.apply_intertwiner(u, ground.state, +1).norm() < 1e-5

    def test_intertwining_relation_on_compact_bump(self):
        # A+ H1 = H0 A+ applied to a smooth, exactly compactly-supported psi
        grid = rv.suggest_grid_harmonic_base([-1], kept_top=4.5, eigen_tolerance=1e-4)
        v0 = rv.harmonic_potential(grid)
        u = rv.solve_riccati(v0, -1)
        v1 = rv.intertwine_step(v0, -1)
        x = grid.x
        support = 0.6 * grid.half_width
        window = np.zeros(grid.n_points)
        inside = np.abs(x) < support
        window[inside] = np.exp(-1.0 / (1.0 - (x[inside] / support) ** 2))
        psi = Wavefunction(grid, window * (np.sin(1.3 * x) + 0.5 * np.cos(0.7 * x)) + 0j)

        h0, h1 = rv.discretize(v0), rv.discretize(v1)

        def apply_h(h, w):
            out = np.zeros(grid.n_points, dtype=complex)
            out[1:-1] = h.apply(w.amplitudes[1:-1])
            return Wavefunction(grid, out)

        lhs = rv.apply_intertwiner(u, apply_h(h1, psi), +1)
        rhs = apply_h(h0, rv.apply_intertwiner(u, psi, +1))
        defect = (lhs + (-1.0) * rhs).norm()
        assert defect < 1e-3 * max(1.0, lhs.norm())


class TestDeepDesignResiduals:
    def test_riccati_defect_on_deep_step(self, mini_biperiodic_case):
        # re-solve the last level on top of the penultimate potential
        case = mini_biperiodic_case
        v_prev = rv.design_potential(
            rv.harmonic_potential(case.grid), case.added_desc[:-1]
        )
        u = rv.solve_riccati(v_prev, case.added_desc[-1])
        assert riccati_residual(u, v_prev, case.added_desc[-1]) < 1e-3
