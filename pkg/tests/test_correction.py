import numpy as np
import pytest
from scipy.integrate import quad

from burgerslab.correction import (
    LambdaResult,
    QuadratureError,
    corrected_drift,
    lambda_closed_form,
    lambda_closed_form_for_scheme,
    lambda_eps,
    lambda_eps_y,
    lambda_quadrature,
    sine_integral,
)
from burgerslab.nonlin import PolynomialMap, evaluate, parse_polynomial_map
from burgerslab.schemes import (
    finite_difference_scheme,
    galerkin_scheme,
    identity_scheme,
)


class TestSineIntegral:
    def test_at_pi_against_quadrature(self):
        # series regime cross-checked by an independent quadrature oracle
        oracle, _ = quad(lambda x: np.sinc(x / np.pi), 0.0, np.pi, epsabs=1e-14)
        assert abs(sine_integral(np.pi) - oracle) < 1e-12

    @pytest.mark.parametrize("t", [0.3, 2.0, 3.9, 4.1, 7.0, 12.5, 40.0])
    def test_against_quadrature_both_regimes(self, t):
        oracle, _ = quad(
            lambda x: np.sinc(x / np.pi), 0.0, t, epsabs=1e-14, limit=300
        )
        assert abs(sine_integral(t) - oracle) < 1e-12

    def test_odd(self):
        assert sine_integral(-2.0) == -sine_integral(2.0)

    def test_zero(self):
        assert sine_integral(0.0) == 0.0


class TestLambdaQuadrature:
    def test_identity_forward_difference(self):
        res = lambda_quadrature(identity_scheme(1, 0), nu=1.0, tol=1e-10)
        assert abs(res.value - 0.25) < 1e-10
        assert res.method == "quadrature"

    def test_symmetric_measure_vanishes(self):
        res = lambda_quadrature(identity_scheme(1, 1), nu=1.0, tol=1e-10)
        assert abs(res.value) < 1e-10

    def test_galerkin_matches_closed_form(self):
        s = galerkin_scheme(1, 0)
        res = lambda_quadrature(s, nu=1.0, tol=1e-8)
        oracle = lambda_closed_form_for_scheme(s, nu=1.0)
        assert abs(res.value - oracle.value) < 1e-6

    def test_unreachable_tolerance_raises_with_partial(self):
        with pytest.raises(QuadratureError) as exc:
            lambda_quadrature(identity_scheme(1, 0), nu=1.0, tol=1e-18)
        partial = exc.value.partial
        assert partial is not None
        assert abs(partial.value - 0.25) < 1e-8

    def test_scaling_in_nu(self):
        s = galerkin_scheme(2, 1)
        vals = {nu: lambda_quadrature(s, nu=nu, tol=1e-10).value for nu in (0.5, 1.0, 2.0)}
        assert abs(vals[0.5] - 2.0 * vals[1.0]) < 1e-8
        assert abs(vals[2.0] - 0.5 * vals[1.0]) < 1e-8


class TestClosedForms:
    def test_identity_values(self):
        assert abs(lambda_closed_form("identity", 2, 1, 1.0).value - 1.0 / 12.0) < 1e-15
        assert abs(lambda_closed_form("identity", 1, 0, 1.0).value - 0.25) < 1e-15

    def test_galerkin_antisymmetric_diagonal(self):
        assert lambda_closed_form("galerkin", 2, 2, 1.0).value == 0.0

    def test_finite_difference_requires_integer_offsets(self):
        assert abs(lambda_closed_form("finite_difference", 3, 1, 1.0).value - 0.125) < 1e-15
        with pytest.raises(ValueError, match="integer"):
            lambda_closed_form("finite_difference", 0.5, 0.5, 1.0)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            lambda_closed_form("midpoint", 1, 0, 1.0)

    def test_degenerate_offsets(self):
        with pytest.raises(ValueError):
            lambda_closed_form("identity", 0, 0, 1.0)


@pytest.mark.parametrize(
    "make", [identity_scheme, finite_difference_scheme, galerkin_scheme]
)
class TestQuadratureVsClosedForm:
    def test_agreement_on_small_grid(self, make):
        for a, b in ((1, 0), (0, 1), (2, 1), (1, 2)):
            s = make(a, b)
            got = lambda_quadrature(s, nu=1.0, tol=1e-8).value
            want = lambda_closed_form_for_scheme(s, nu=1.0).value
            assert abs(got - want) <= 1e-8, (make.__name__, a, b)

    def test_antisymmetry_in_offsets(self, make):
        for a, b in ((1, 0), (2, 1), (3, 1)):
            plus = lambda_quadrature(make(a, b), nu=0.7, tol=1e-9).value
            minus = lambda_quadrature(make(b, a), nu=0.7, tol=1e-9).value
            assert abs(plus + minus) < 1e-8


class TestLambdaEps:
    def test_zero_atom_contributes_nothing(self):
        s = identity_scheme(1, 0)
        assert lambda_eps_y(s, 0.01, y=0.0) == 0.0

    def test_identity_mode_sum_converges(self):
        s = identity_scheme(1, 0)
        val = lambda_eps_y(s, 1e-3, nu=1.0, y=1.0)
        assert abs(val - 0.25) <= 0.02

    def test_galerkin_sum_truncates_automatically(self):
        # summand vanishes once eps*k >= pi, whatever chi says
        s = galerkin_scheme(1, 0)
        eps = 0.01
        tight = lambda_eps_y(s, eps, gamma=1 / 3, chi=1.2, nu=1.0, y=1.0)
        wide = lambda_eps_y(s, eps, gamma=1 / 3, chi=1.5, nu=1.0, y=1.0)
        # chi = 1.2 keeps modes up to 251 < pi/eps ~ 314, so they differ a bit;
        # extending chi beyond the h cutoff adds exactly nothing
        wider = lambda_eps_y(s, eps, gamma=1 / 3, chi=2.0, nu=1.0, y=1.0)
        assert wide != tight
        # added summands are exactly zero; only summation grouping may differ
        assert abs(wider - wide) < 1e-15

    def test_empty_range_warns_and_returns_zero(self):
        s = identity_scheme(1, 0)
        with pytest.warns(UserWarning, match="empty"):
            assert lambda_eps_y(s, 0.9, gamma=0.05, chi=0.1, nu=1.0, y=1.0) == 0.0

    def test_monotone_under_chi_extension(self):
        # nonnegative summands for the builtin families
        for s in (identity_scheme(1, 0), finite_difference_scheme(1, 0), galerkin_scheme(2, 1)):
            vals = [lambda_eps_y(s, 0.02, gamma=1 / 3, chi=chi, nu=1.0, y=1.0)
                    for chi in (1.1, 1.3, 1.5, 1.8)]
            assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_symmetric_measure_cancels_exactly(self):
        s = identity_scheme(1, 1)
        assert lambda_eps(s, 0.01, nu=1.0) == 0.0

    def test_matches_quadrature_limit(self):
        s = identity_scheme(1, 0)
        target = lambda_quadrature(s, nu=1.0, tol=1e-10).value
        assert abs(lambda_eps(s, 1e-3, nu=1.0) - target) <= 0.02

    def test_finite_difference_same_limit_as_identity(self):
        s = finite_difference_scheme(1, 0)
        assert abs(lambda_eps(s, 1e-3, nu=1.0) - 0.25) <= 0.02


class TestCorrectedDrift:
    def test_burgers_quarter(self):
        F = PolynomialMap.zero(1)
        G = parse_polynomial_map("0.5*u1^2", 1)
        Ft = corrected_drift(F, G, 0.25)
        assert np.allclose(evaluate(Ft, np.array([[3.0, -1.0]])), -0.25)

    def test_zero_lambda_returns_f_exactly(self):
        F = parse_polynomial_map("u1 - 2", 1)
        G = parse_polynomial_map("0.5*u1^2", 1)
        assert corrected_drift(F, G, 0.0) is F

    def test_linear_flux_unchanged(self):
        F = parse_polynomial_map("u1; -u2", 2)
        G = PolynomialMap.identity(2)
        Ft = corrected_drift(F, G, 5.0)
        assert all(a.terms == b.terms for a, b in zip(Ft.components, F.components))


def test_lambda_result_rejects_bad_values():
    with pytest.raises(ValueError):
        LambdaResult(np.inf, 0.0, "x", 1.0, "quadrature")
    with pytest.raises(ValueError):
        LambdaResult(0.1, -1.0, "x", 1.0, "quadrature")
