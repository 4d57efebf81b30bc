import numpy as np
import pytest

from burgerslab.spectral import (
    SQRT_2PI,
    GridField,
    ResolutionError,
    SpectralField,
    band_project,
    embed,
    evaluate_on_grid,
    from_grid,
    l2_inner,
    project,
    smallest_odd_at_least,
    sobolev_norm,
    sup_norm,
    to_grid,
    to_grid_direct,
    write_grid_csv,
)
from conftest import random_field


class TestToGrid:
    def test_constant_field(self):
        u = SpectralField.constant(3.25, K=6)
        g = to_grid(u, 13)
        assert np.allclose(g.values, 3.25, atol=1e-14)

    def test_single_mode_cosine_pair(self):
        # coeffs[+-1] = 1 is the reality pair of a pure cosine
        u = SpectralField.from_modes(K=2, entries={1: 1.0})
        g = to_grid(u, 5)
        expected = 2.0 / SQRT_2PI * np.cos(2.0 * np.pi * np.arange(5) / 5)
        assert np.allclose(g.values[0], expected, atol=1e-14)

    def test_round_trip(self, rng):
        u = random_field(rng, K=33, n=2)
        v = from_grid(to_grid(u, 67), 33)
        assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-12

    def test_rejects_even_or_coarse_grid(self):
        u = SpectralField.zeros(4)
        with pytest.raises(ResolutionError):
            to_grid(u, 10)
        with pytest.raises(ResolutionError):
            to_grid(u, 7)

    def test_matches_direct_evaluation(self, rng):
        # the O(K*M) sum is the oracle for the FFT path
        u = random_field(rng, K=17, n=3)
        g_fast = to_grid(u, 41)
        g_ref = to_grid_direct(u, 41)
        assert np.max(np.abs(g_fast.values - g_ref.values)) < 1e-12


class TestFromGrid:
    def test_constant_grid(self):
        g = GridField(9, np.full((1, 9), 2.5))
        u = from_grid(g, 4)
        assert abs(u.mode(0)[0] - 2.5 * SQRT_2PI) < 1e-13
        others = np.delete(u.coeffs[0], 4)
        assert np.max(np.abs(others)) < 1e-14

    def test_inverse_pair(self, rng):
        u = random_field(rng, K=12)
        g = to_grid(u, 25)
        v = from_grid(g, 12)
        assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-13

    def test_sine_coefficients(self):
        # under e_k = (2pi)^(-1/2) e^{ikx}: sin(x) has coeffs[+-1] = -+ i sqrt(pi/2)
        M = 33
        x = 2.0 * np.pi * np.arange(M) / M
        u = from_grid(GridField(M, np.sin(x)[None, :]), 8)
        assert abs(u.mode(1)[0] - (-1j * np.sqrt(np.pi / 2))) < 1e-13
        assert abs(u.mode(-1)[0] - (1j * np.sqrt(np.pi / 2))) < 1e-13
        others = np.abs(u.coeffs[0]).copy()
        others[[7, 9]] = 0.0
        assert np.max(others) < 1e-12

    def test_lowpass_on_fine_grid(self, rng):
        u = random_field(rng, K=5)
        g = to_grid(embed(u, 20), 41)
        v = from_grid(g, 5)
        assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-13


class TestProjections:
    def test_full_band_is_identity(self, rng):
        u = random_field(rng, K=9)
        assert np.array_equal(project(u, 9).coeffs, u.coeffs)

    def test_project_zero_keeps_mean(self, rng):
        u = random_field(rng, K=9)
        v = project(u, 0)
        assert v.mode(0)[0] == u.mode(0)[0]
        assert np.count_nonzero(v.coeffs) <= 1

    def test_empty_band_is_zero(self, rng):
        u = random_field(rng, K=9)
        v = band_project(u, 4, 4)
        assert np.all(v.coeffs == 0)

    def test_band_edges(self, rng):
        u = random_field(rng, K=9)
        v = band_project(u, 2, 5)
        kept = np.abs(v.modes)
        expect = (kept > 2) & (kept <= 5)
        assert np.all((np.abs(v.coeffs[0]) > 0) == expect)

    def test_idempotent_and_self_adjoint(self, rng):
        u = random_field(rng, K=16, n=2)
        v = random_field(rng, K=16, n=2)
        p = project(u, 7)
        assert np.max(np.abs(project(p, 7).coeffs - p.coeffs)) < 1e-15
        lhs = l2_inner(project(u, 7), v)
        rhs = l2_inner(u, project(v, 7))
        assert abs(lhs - rhs) < 1e-12


class TestNorms:
    @pytest.mark.parametrize("s", [-0.75, 0.0, 1.5])
    def test_single_mode_sobolev(self, s):
        u = SpectralField.from_modes(K=3, entries={1: np.exp(0.3j)})
        assert abs(sobolev_norm(u, s) - np.sqrt(2.0) * 2.0 ** (s / 2)) < 1e-14

    def test_zero_field(self):
        assert sobolev_norm(SpectralField.zeros(5, n=2), 0.7) == 0.0

    def test_l2_norm_matches_trapezoid_quadrature(self, rng):
        # Parseval: the L2 norm of the trig polynomial over [0, 2pi] equals
        # sobolev_norm(u, 0); the grid integral of |u|^2 is exact at M >= 2K+1.
        u = random_field(rng, K=21, n=2)
        g = to_grid(u, 129)
        quad = np.sqrt(np.sum(g.values**2) * 2.0 * np.pi / g.M)
        assert abs(quad - sobolev_norm(u, 0.0)) < 1e-10

    def test_sup_norm_constant(self):
        assert abs(sup_norm(SpectralField.constant(-1.75, K=4)) - 1.75) < 1e-12

    def test_sup_norm_sine(self):
        M = 17
        x = 2.0 * np.pi * np.arange(M) / M
        u = from_grid(GridField(M, np.sin(x)[None, :]), 3)
        assert abs(sup_norm(u) - 1.0) < 1e-6

    def test_sup_norm_against_dense_sampling(self, rng):
        # band-limited bump: compare against brute force max on 1e5 points
        u = random_field(rng, K=12, decay=2.0)
        xs = np.linspace(0.0, 2.0 * np.pi, 100_000, endpoint=False)
        vals = (u.coeffs @ (np.exp(1j * np.outer(u.modes, xs)) / SQRT_2PI)).real
        assert abs(sup_norm(u) - np.max(np.abs(vals))) < 1e-4


class TestInvariants:
    def test_round_trip_large_band(self, rng):
        u = random_field(rng, K=512)
        v = from_grid(to_grid(u, 1025), 512)
        assert np.max(np.abs(v.coeffs - u.coeffs)) < 1e-12

    def test_reality_preserved_by_operations(self, rng):
        u = random_field(rng, K=14, n=2)
        ops = [
            lambda w: project(w, 6),
            lambda w: band_project(w, 2, 9),
            lambda w: w.apply_multiplier(1j * w.modes.astype(complex)),
            lambda w: 2.5 * w + w,
            lambda w: from_grid(to_grid(w, 29), 14),
        ]
        for op in ops:
            w = op(u)
            g = evaluate_on_grid(w, 61)  # raises if imag residue > 1e-10
            assert np.all(np.isfinite(g))
            assert np.max(np.abs(w.coeffs - np.conj(w.coeffs[:, ::-1]))) == 0.0

    def test_constructor_rejects_broken_reality(self):
        c = np.zeros((1, 5), dtype=complex)
        c[0, 3] = 1.0  # no conjugate partner
        with pytest.raises(ValueError):
            SpectralField(2, 1, c)

    def test_evaluate_on_grid_allows_coarse_grids(self, rng):
        # aliased point evaluation agrees with the direct sum for M < 2K+1
        u = random_field(rng, K=10)
        M = 7
        xs = 2.0 * np.pi * np.arange(M) / M
        direct = (u.coeffs @ (np.exp(1j * np.outer(u.modes, xs)) / SQRT_2PI)).real
        assert np.max(np.abs(evaluate_on_grid(u, M) - direct)) < 1e-12


def test_smallest_odd_at_least():
    assert smallest_odd_at_least(10) == 11
    assert smallest_odd_at_least(11) == 11
    assert smallest_odd_at_least(10.2) == 11


def test_grid_csv_dump(tmp_path, rng):
    u = random_field(rng, K=4, n=2)
    g = to_grid(u, 9)
    path = tmp_path / "field.csv"
    write_grid_csv(g, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "x,comp0,comp1"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (9, 3)
    assert np.max(np.abs(data[:, 1:].T - g.values)) == 0.0
