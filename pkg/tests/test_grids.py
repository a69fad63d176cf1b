"""Grid, potential and wavefunction value types."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

import revivals as rv
from revivals.grids import Grid, SampledPotential, Wavefunction, trapezoid_weights


class TestGrid:
    def test_spacing_and_center(self):
        g = Grid(2.0, 5)
        assert g.dx == 1.0
        assert g.center_index == 2
        assert np.allclose(g.x, [-2, -1, 0, 1, 2])

    def test_x_is_exactly_antisymmetric(self):
        g = Grid(13.7, 4097)
        assert np.array_equal(g.x, -g.x[::-1])
        assert g.x[g.center_index] == 0.0

    def test_rejects_even_count(self):
        with pytest.raises(ValueError):
            Grid(1.0, 4096)

    def test_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            Grid(0.0, 5)

    def test_refined_halves_dx(self):
        g = Grid(3.0, 11)
        g2 = g.refined(2)
        assert g2.n_points == 21
        assert g2.dx == pytest.approx(g.dx / 2)

    def test_trapezoid_weights(self):
        g = Grid(2.0, 5)
        assert np.allclose(trapezoid_weights(g), [0.5, 1, 1, 1, 0.5])


class TestSampledPotential:
    def test_harmonic_base_is_even(self):
        v = rv.harmonic_potential(Grid(5.0, 101))
        assert v.is_even()
        assert v.base_tag == "harmonic"

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            SampledPotential(Grid(1.0, 5), np.zeros(4))

    def test_rejects_nonfinite(self):
        values = np.zeros(5)
        values[2] = np.inf
        with pytest.raises(ValueError):
            SampledPotential(Grid(1.0, 5), values)

    def test_rejects_unordered_injections(self):
        with pytest.raises(ValueError):
            SampledPotential(
                Grid(1.0, 5), np.zeros(5), injected_levels=(Fraction(-3), Fraction(-1))
            )

    def test_csv_round_trip_is_exact(self):
        v = rv.harmonic_potential(Grid(4.0, 33))
        v2 = SampledPotential.from_csv(v.to_csv())
        assert np.array_equal(v.values, v2.values)
        assert v2.grid.n_points == 33
        assert v2.grid.half_width == 4.0

    def test_csv_rejects_missing_header(self):
        with pytest.raises(ValueError):
            SampledPotential.from_csv("0.0,1.0\n")

    def test_values_are_read_only(self):
        v = rv.constant_potential(Grid(1.0, 5), 2.0)
        with pytest.raises(ValueError):
            v.values[0] = 3.0

    def test_metadata_lists_levels(self):
        v = rv.constant_potential(Grid(1.0, 5), 2.0)
        v2 = v.with_level(v.values + 1.0, Fraction(1, 2))
        meta = v2.metadata(generated_by="test")
        assert meta["injected_levels"] == ["1/2"]
        assert meta["generated_by"] == "test"


class TestWavefunction:
    def test_norm_and_normalized(self):
        g = Grid(10.0, 2001)
        psi = Wavefunction(g, np.exp(-g.x**2, dtype=complex))
        n = psi.norm()
        assert n == pytest.approx((np.pi / 2) ** 0.25, rel=1e-8)
        assert psi.normalized().norm() == pytest.approx(1.0, abs=1e-12)

    def test_inner_is_conjugate_linear_in_first(self):
        g = Grid(5.0, 101)
        a = Wavefunction(g, np.full(g.n_points, 1j))
        b = Wavefunction(g, np.ones(g.n_points, dtype=complex))
        assert a.inner(b) == pytest.approx(complex(0, -10.0))

    def test_grid_mismatch_raises(self):
        a = Wavefunction(Grid(1.0, 5), np.ones(5, dtype=complex))
        b = Wavefunction(Grid(1.0, 7), np.ones(7, dtype=complex))
        with pytest.raises(ValueError):
            a.inner(b)
        with pytest.raises(ValueError):
            a + b

    def test_linear_combination(self):
        g = Grid(1.0, 5)
        a = Wavefunction(g, np.ones(5, dtype=complex))
        c = (2.0 * a + (-1j) * a).amplitudes
        assert np.allclose(c, 2.0 - 1j)

    def test_zero_normalization_rejected(self):
        g = Grid(1.0, 5)
        with pytest.raises(ValueError):
            Wavefunction(g, np.zeros(5, dtype=complex)).normalized()


class TestGridSuggestions:
    def test_harmonic_rule_covers_turning_points(self):
        g = rv.suggest_grid_harmonic_base([-9, -7, -5, -3, -1], kept_top=9.5)
        # outermost turning point of the top kept level after the tail drop
        assert g.half_width > np.sqrt(2 * (9.5 + 5))
        assert g.n_points % 2 == 1

    def test_constant_rule_respects_base(self):
        with pytest.raises(ValueError):
            rv.suggest_grid_constant_base([3, 5], 4.0)
        g = rv.suggest_grid_constant_base([2, 3, 5], 7.0)
        assert g.n_points % 2 == 1

    def test_tighter_tolerance_refines(self):
        coarse = rv.suggest_grid_harmonic_base([], kept_top=9.5, eigen_tolerance=1e-4)
        fine = rv.suggest_grid_harmonic_base([], kept_top=9.5, eigen_tolerance=1e-5)
        assert fine.n_points > coarse.n_points
        assert fine.half_width == coarse.half_width
