import numpy as np
import pytest

from burgerslab.schemes import (
    InfiniteSymbolError,
    Scheme,
    SchemeValidationError,
    apply_D_eps,
    apply_Delta_eps,
    apply_hatD,
    apply_Q_eps,
    atoms_one_sided,
    derivative_symbol,
    finite_difference_scheme,
    galerkin_scheme,
    identity_scheme,
    load_scheme_file,
    parse_mu,
    shift_minus,
    tabulated_symbol,
    validate,
)
from burgerslab.spectral import (
    SpectralField,
    evaluate_on_grid,
    from_grid,
    project,
    sobolev_norm,
    to_grid,
)
from conftest import random_field


class TestValidation:
    def test_identity_scheme_passes(self):
        report = identity_scheme(1, 0).validate()
        assert report.ok, report.summary()

    @pytest.mark.parametrize("make", [finite_difference_scheme, galerkin_scheme])
    def test_builtins_pass(self, make):
        report = make(1, 0).validate()
        assert report.ok, report.summary()

    def test_mu_without_zero_mass_fails(self):
        s = identity_scheme(1, 0)
        s.mu = ((1.0, 1.0),)  # delta_1: total mass 1, not 0
        report = validate(s)
        assert not report["mu_total_mass_zero"].passed
        with pytest.raises(SchemeValidationError):
            s.validate()
            s.require_valid()

    def test_wrong_first_moment_fails(self):
        s = identity_scheme(1, 0)
        s.mu = ((2.0, 0.5), (-2.0, -0.5))  # first moment 2
        report = validate(s)
        assert report["mu_total_mass_zero"].passed
        assert not report["mu_first_moment_one"].passed
        assert abs(report["mu_first_moment_one"].value - 2.0) < 1e-15

    def test_sloped_f_fails_derivative_check(self):
        s = identity_scheme(1, 0)
        s.f = lambda t: 1.0 + np.asarray(t)
        report = validate(s)
        assert not report["f_derivative_zero_at_zero"].passed

    def test_noise_on_killed_modes_fails(self):
        s = galerkin_scheme(1, 0)
        s.h = lambda t: np.ones_like(np.asarray(t, dtype=float))
        report = validate(s)
        assert not report["h_vanishes_where_f_infinite"].passed

    def test_sampled_variation_recorded(self):
        report = finite_difference_scheme(1, 0).validate()
        bv = report["h2_over_f_sampled_variation"]
        assert bv.passed  # informational, never a failure
        assert bv.value > 0.5  # the indicator jump alone contributes ~pi^2/4 / ...


class TestDerivativeSymbol:
    def test_zero_frequency(self):
        assert derivative_symbol(identity_scheme(1, 0), 0.0) == 0.0

    def test_unit_first_moment_small_kappa(self):
        kappa = 1e-3
        sym = derivative_symbol(identity_scheme(1, 0), kappa)
        assert abs(sym / (1j * kappa) - 1.0) <= kappa

    def test_centered_vanishes_at_pi(self):
        s = identity_scheme(1, 1)  # mu = (delta_1 - delta_{-1})/2
        assert abs(derivative_symbol(s, np.pi)) < 1e-15


class TestApplyDeps:
    def test_constant_field_annihilated(self):
        u = SpectralField.constant(4.0, K=5)
        v = apply_D_eps(identity_scheme(1, 0), u, 0.1)
        assert np.max(np.abs(v.coeffs)) < 1e-14

    def test_forward_difference_multiplier(self):
        s = identity_scheme(1, 0)
        u = SpectralField.from_modes(K=6, entries={3: 0.7 - 0.2j})
        eps = 0.05
        v = apply_D_eps(s, u, eps)
        expected = (np.exp(3j * eps) - 1.0) / eps * (0.7 - 0.2j)
        assert abs(v.mode(3)[0] - expected) < 1e-14

    def test_first_order_convergence_to_derivative(self):
        # smooth test field: sin(x); exact spectral derivative is the ik multiplier
        u = SpectralField.from_modes(K=4, entries={1: -1j * np.sqrt(np.pi / 2)})
        s = identity_scheme(1, 0)
        du = u.apply_multiplier(1j * u.modes.astype(complex))
        errs = [
            sobolev_norm(apply_D_eps(s, u, e) - du, 0.0) for e in (0.1, 0.05, 0.025)
        ]
        for e0, e1 in zip(errs, errs[1:]):
            assert 2.0 * 0.8 <= e0 / e1 <= 2.0 * 1.2

    def test_per_mode_symbol_error_bound(self):
        # |(1/eps) sum w e^{ik eps y} - ik| <= C eps k^2 with C = sum |w| y^2 / 2
        for s in (identity_scheme(1, 0), identity_scheme(2, 1), identity_scheme(1, 1)):
            C = 0.5 * sum(abs(w) * y * y for y, w in s.mu)
            ks = np.arange(1, 65, dtype=float)
            for eps in (0.1, 0.05, 0.01, 0.002):
                sym = derivative_symbol(s, eps * ks) / eps
                assert np.all(np.abs(sym - 1j * ks) <= C * eps * ks**2 + 1e-12)

    def test_integer_stencil_matches_grid_difference(self, rng):
        # on the matched grid eps = 2pi/M, D_eps is the literal stencil
        a, b, K = 2, 1, 21
        M = 2 * K + 1
        eps = 2.0 * np.pi / M
        u = random_field(rng, K)
        g = to_grid(u, M).values[0]
        stencil = (np.roll(g, -a) - np.roll(g, b)) / ((a + b) * eps)
        v = to_grid(apply_D_eps(identity_scheme(a, b), u, eps), M).values[0]
        assert np.max(np.abs(v - stencil)) < 1e-12


class TestApplyDeltaEps:
    def test_identity_scheme_exact_second_derivative(self, rng):
        u = random_field(rng, K=8)
        v = apply_Delta_eps(identity_scheme(1, 0), u, 0.3)
        k = u.modes.astype(float)
        assert np.max(np.abs(v.coeffs - u.coeffs * -(k**2))) < 1e-12

    def test_finite_difference_symbol(self):
        eps = 0.2
        k = 7  # eps*k = 1.4 in (0, pi)
        u = SpectralField.from_modes(K=8, entries={k: 1.0})
        v = apply_Delta_eps(finite_difference_scheme(1, 0), u, eps)
        expected = -((2.0 / eps) ** 2) * np.sin(eps * k / 2.0) ** 2
        assert abs(v.mode(k)[0] - expected) < 1e-12

    def test_mean_mode_untouched(self):
        u = SpectralField.constant(2.0, K=3)
        v = apply_Delta_eps(finite_difference_scheme(1, 0), u, 0.1)
        assert np.max(np.abs(v.coeffs)) < 1e-14

    def test_active_infinite_mode_raises(self):
        u = SpectralField.from_modes(K=40, entries={35: 1.0})
        with pytest.raises(InfiniteSymbolError):
            apply_Delta_eps(finite_difference_scheme(1, 0), u, 0.1)  # eps*k > pi

    def test_inactive_infinite_modes_ignored(self):
        u = SpectralField.from_modes(K=40, entries={2: 1.0})
        v = apply_Delta_eps(finite_difference_scheme(1, 0), u, 0.1)
        f = 4.0 * np.sin(0.1) ** 2 / 0.2**2
        assert abs(v.mode(2)[0] - (-4.0 * f)) < 1e-12


class TestApplyQeps:
    def test_identity_scheme_is_identity(self, rng):
        u = random_field(rng, K=9)
        v = apply_Q_eps(identity_scheme(1, 0), u, 0.4)
        assert np.array_equal(v.coeffs, u.coeffs)

    def test_galerkin_cuts_high_modes(self):
        u = SpectralField.from_modes(K=20, entries={16: 1.0, 2: 1.0})
        v = apply_Q_eps(galerkin_scheme(1, 0), u, 0.25)  # cut at |k| >= 4pi ~ 12.6
        assert v.mode(16)[0] == 0.0
        assert v.mode(2)[0] == 1.0

    def test_indicator_filter_idempotent(self, rng):
        u = random_field(rng, K=30)
        s = galerkin_scheme(1, 0)
        once = apply_Q_eps(s, u, 0.2)
        twice = apply_Q_eps(s, once, 0.2)
        assert np.array_equal(once.coeffs, twice.coeffs)


class TestHatD:
    def test_constant_annihilated(self):
        u = SpectralField.constant(1.5, K=4)
        assert np.max(np.abs(apply_hatD(u, 0.7).coeffs)) < 1e-14

    def test_full_period_shift_vanishes(self):
        k = 5
        u = SpectralField.from_modes(K=6, entries={k: 1.0 + 0.5j})
        v = apply_hatD(u, 2.0 * np.pi / k)
        assert abs(v.mode(k)[0]) < 1e-13

    def test_small_delta_first_order_to_derivative(self, rng):
        u = random_field(rng, K=6, decay=2.0)
        du = u.apply_multiplier(1j * u.modes.astype(complex))
        errs = [sobolev_norm(apply_hatD(u, d) - du, 0.0) for d in (0.02, 0.01, 0.005)]
        for e0, e1 in zip(errs, errs[1:]):
            assert 1.6 <= e0 / e1 <= 2.4

    def test_zero_delta_rejected(self):
        with pytest.raises(ValueError):
            apply_hatD(SpectralField.zeros(3), 0.0)

    def test_undivided_form_consistent(self, rng):
        u = random_field(rng, K=7)
        d = 0.31
        v = apply_hatD(u, d)
        w = shift_minus(u, d)
        assert np.max(np.abs(w.coeffs - d * v.coeffs)) < 1e-14


def test_multipliers_commute(rng):
    u = random_field(rng, K=16, n=2)
    s = finite_difference_scheme(1, 0)
    eps = 0.1
    ops = [
        lambda w: apply_D_eps(s, w, eps),
        lambda w: apply_Q_eps(s, w, eps),
        lambda w: apply_hatD(w, 0.37),
        lambda w: project(w, 6),
    ]
    for i, op1 in enumerate(ops):
        for op2 in ops[i + 1 :]:
            x = op1(op2(u))
            y = op2(op1(u))
            assert np.max(np.abs(x.coeffs - y.coeffs)) < 1e-12


def test_real_weights_preserve_reality(rng):
    u = random_field(rng, K=12)
    s = identity_scheme(2, 1)
    v = apply_D_eps(s, u, 0.07)
    evaluate_on_grid(v, 51)  # raises if imaginary residue exceeds 1e-10


class TestSchemeFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "scheme.txt"
        path.write_text(
            "# forward-difference derivative, spectral Laplacian cutoff\n"
            "name = demo\n"
            "f = galerkin\n"
            "h = indicator_pi\n"
            "mu = (1,1);(0,-1)\n"
            "q = 1\n"
        )
        s = load_scheme_file(path)
        assert s.name == "demo"
        assert s.builtin == ("galerkin", 1.0, 0.0)
        assert s.validate().ok

    def test_tabulated_symbol(self, tmp_path):
        table = tmp_path / "h.csv"
        table.write_text("extrapolate = 0\n0,1\n1,1\n2,0\n")
        path = tmp_path / "scheme.txt"
        path.write_text(
            f"name = tab\nf = identity\nh = table:{table}\nmu = (1,1);(0,-1)\nq = 1\n"
        )
        s = load_scheme_file(path)
        assert s.h_kind == "table"
        assert s.h_support == 2.0
        assert np.allclose(s.h_at([0.5, 1.5, 3.0]), [1.0, 0.5, 0.0])

    def test_table_requires_extrapolation(self, tmp_path):
        table = tmp_path / "h.csv"
        table.write_text("0,1\n1,0\n")
        path = tmp_path / "scheme.txt"
        path.write_text(
            f"name = bad\nf = identity\nh = table:{table}\nmu = (1,1);(0,-1)\nq = 1\n"
        )
        with pytest.raises(ValueError, match="extrapolate"):
            load_scheme_file(path)

    def test_parse_mu(self):
        assert parse_mu("(1,1);(0,-1)") == ((1.0, 1.0), (0.0, -1.0))
        assert parse_mu("(0.5, 2.0)") == ((0.5, 2.0),)


def test_builtin_mu_shapes():
    assert atoms_one_sided(1, 0) == ((1.0, 1.0), (0.0, -1.0))
    assert atoms_one_sided(1, 1) == ((1.0, 0.5), (-1.0, -0.5))
    with pytest.raises(ValueError):
        atoms_one_sided(0, 0)
