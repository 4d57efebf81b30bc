"""The drift-correction constant and its finite-resolution counterparts.

The asymmetric discrete derivative makes approximations of the gradient
nonlinearity converge to a drift-corrected limit; the size of that
correction is the constant

    Lambda = (1/(2 pi nu)) * sum_i w_i * I(y_i),
    I(y)   = int_0^inf (1 - cos(y t)) h(t)^2 / (t^2 f(t)) dt,

for a scheme with symbols (f, h) and derivative measure mu = sum w_i d_{y_i}.
This module evaluates Lambda by adaptive quadrature (with analytic handling
of the oscillatory tail when h has unbounded support), provides the closed
forms available for the builtin scheme families as independent oracles, and
computes the mode sums that play the same role at finite resolution.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .nonlin import PolynomialMap, laplacian

DEFAULT_GAMMA = 1.0 / 3.0  # low band exponent: modes below eps^-gamma are dropped
DEFAULT_CHI = 1.5  # high band exponent: modes above eps^-chi are dropped


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class LambdaResult:
    value: float
    abs_error_estimate: float
    scheme: str
    nu: float
    method: str  # "quadrature" or "closed_form"

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError("correction constant must be finite")
        if self.abs_error_estimate < 0:
            raise ValueError("error estimate must be nonnegative")

    def to_dict(self):
        return {
            "value": self.value,
            "abs_error_estimate": self.abs_error_estimate,
            "method": self.method,
            "scheme": self.scheme,
            "nu": self.nu,
        }


# -- sine integral -------------------------------------------------------------

_SI_SWITCH = 4.0


def _si_series(t):
    # Maclaurin series sum (-1)^m t^(2m+1) / ((2m+1)(2m+1)!)
    term = t
    total = t
    t2 = t * t
    m = 0
    while abs(term) > 1e-18 * max(1.0, abs(total)):
        m += 1
        term *= -t2 / (2 * m * (2 * m + 1))
        total += term / (2 * m + 1)
        if m > 60:
            break
    return total


def _si_auxiliary(t):
    # Si(t) = pi/2 - f(t) cos t - g(t) sin t with the auxiliary integrals
    # f(t) = int_0^inf e^{-tu}/(1+u^2) du,  g(t) = int_0^inf u e^{-tu}/(1+u^2) du,
    # which decay fast enough for plain adaptive quadrature at t > 4.
    fa, _ = quad(lambda u: np.exp(-t * u) / (1 + u * u), 0.0, np.inf, epsabs=1e-14, epsrel=1e-13)
    ga, _ = quad(lambda u: u * np.exp(-t * u) / (1 + u * u), 0.0, np.inf, epsabs=1e-14, epsrel=1e-13)
    return np.pi / 2 - fa * np.cos(t) - ga * np.sin(t)


def sine_integral(t):
    """Si(t) = int_0^t sin(x)/x dx, accurate to about 1e-13.

    Two regimes: a Maclaurin series for |t| <= 4, the auxiliary-function
    representation (evaluated by quadrature) beyond.  Odd in t.
    """
    t = float(t)
    if t < 0:
        return -sine_integral(-t)
    if t <= _SI_SWITCH:
        return _si_series(t)
    return _si_auxiliary(t)


# -- quadrature for Lambda -------------------------------------------------------


def _integrand_factory(scheme, y):
    ay = abs(y)

    def integrand(t):
        if t == 0.0:
            return 0.5 * y * y  # limit of (1-cos(yt)) h^2/(t^2 f) with h(0)=f(0)=1
        fv = float(scheme.f_at(t))
        if not np.isfinite(fv):
            return 0.0
        hv = float(scheme.h_at(t))
        return (1.0 - np.cos(ay * t)) * hv * hv / (t * t * fv)

    return integrand


def _tail_identity(y, T):
    """int_T^inf (1-cos(yt))/t^2 dt for f = h = 1, by parts with a Si remainder."""
    ay = abs(y)
    if ay == 0.0:
        return 0.0
    return (1.0 - np.cos(ay * T)) / T + ay * (np.pi / 2 - sine_integral(ay * T))


def _atom_integral(scheme, y, epsabs):
    """Return (I(y), error_estimate) for one atom location y."""
    if y == 0.0:
        return 0.0, 0.0
    integrand = _integrand_factory(scheme, y)
    ay = abs(y)

    if scheme.h_support is not None:
        # h vanishes beyond h_support: the tail drops exactly.  Integrate up
        # to the support edge, splitting panels at table breakpoints and at
        # oscillation periods so the indicator jump is never straddled.
        S = float(scheme.h_support)
        pts = {0.0, S}
        if scheme.h_kind == "table":
            pts.update(float(t) for t in getattr(scheme.h, "knots", ()) if 0.0 < t < S)
        if scheme.f_kind == "table":
            pts.update(float(t) for t in getattr(scheme.f, "knots", ()) if 0.0 < t < S)
        period = 2.0 * np.pi / ay
        k = period
        while k < S:
            pts.add(k)
            k += period
        knots = sorted(pts)
        total, err = 0.0, 0.0
        for a, b in zip(knots, knots[1:]):
            v, e = quad(integrand, a, b, epsabs=epsabs / max(1, len(knots)), epsrel=1e-12, limit=200)
            total += v
            err += e
        return total, err

    if scheme.f_kind == "identity" and scheme.h_kind == "one":
        # unbounded support: integrate a few periods, then the analytic tail
        periods = max(4, int(np.ceil(10.0 * ay / (2.0 * np.pi))))
        T = periods * 2.0 * np.pi / ay
        v, e = quad(integrand, 0.0, T, epsabs=epsabs, epsrel=1e-12, limit=400)
        return v + _tail_identity(y, T), e + 1e-13 * ay

    raise QuadratureError(
        f"no tail handling for scheme '{scheme.name}': h has unbounded support "
        "and (f, h) is not the undiscretized pair"
    )


def lambda_quadrature(scheme, nu, tol=1e-10):
    """Correction constant by adaptive quadrature of the defining integral.

    Raises QuadratureError (carrying the partial result) if the accumulated
    error estimate exceeds tol.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scheme.require_valid()
    pref = 1.0 / (2.0 * np.pi * nu)
    total, err = 0.0, 0.0
    for y, w in scheme.mu:
        if w == 0.0:
            continue
        v, e = _atom_integral(scheme, y, epsabs=tol / (4.0 * max(1.0, abs(w))))
        total += w * v
        err += abs(w) * e
    result = LambdaResult(pref * total, pref * err, scheme.name, float(nu), "quadrature")
    if result.abs_error_estimate > tol:
        raise QuadratureError(
            f"quadrature error estimate {result.abs_error_estimate:.3e} exceeds tol {tol:.3e}",
            partial=result,
        )
    return result


# -- closed forms ----------------------------------------------------------------


def lambda_closed_form(builtin, a, b, nu):
    """Closed-form correction constant for the builtin scheme families.

    identity and finite_difference (integer offsets): (a-b)/(4 nu (a+b)).
    galerkin: [cos(pi a) + pi a Si(pi a) - cos(pi b) - pi b Si(pi b)]
              / (2 pi^2 nu (a+b)).
    """
    a, b, nu = float(a), float(b), float(nu)
    if nu <= 0:
        raise ValueError("nu must be positive")
    if a < 0 or b < 0 or a + b <= 0:
        raise ValueError("need a, b >= 0 with a + b > 0")
    name = f"{builtin}(a={a},b={b})"
    if builtin in ("identity", "finite_difference"):
        if builtin == "finite_difference" and not (a.is_integer() and b.is_integer()):
            raise ValueError(
                "the finite-difference closed form holds only for integer offsets "
                "(the derivative stencil must live on the gridpoints)"
            )
        value = (a - b) / (4.0 * nu * (a + b))
        return LambdaResult(value, 1e-16, name, nu, "closed_form")
    if builtin == "galerkin":
        num = (
            np.cos(np.pi * a)
            + np.pi * a * sine_integral(np.pi * a)
            - np.cos(np.pi * b)
            - np.pi * b * sine_integral(np.pi * b)
        )
        value = num / (2.0 * np.pi**2 * nu * (a + b))
        return LambdaResult(value, 1e-12, name, nu, "closed_form")
    raise ValueError(f"no closed form for scheme family {builtin!r}")


def lambda_closed_form_for_scheme(scheme, nu):
    if scheme.builtin is None:
        raise ValueError(f"scheme '{scheme.name}' is not a builtin family; no closed form")
    tag, a, b = scheme.builtin
    return lambda_closed_form(tag, a, b, nu)


# -- finite-resolution mode sums --------------------------------------------------


def lambda_eps_y(scheme, eps, gamma=DEFAULT_GAMMA, chi=DEFAULT_CHI, nu=1.0, y=1.0):
    """Mode sum over eps^-gamma < k < eps^-chi approximating the per-atom integral.

    Exact finite sum (1 - cos(eps k y)) h(eps k)^2 / (2 pi eps (1 + nu k^2 f(eps k)))
    over integer k; modes with f = +inf contribute zero since h vanishes there.
    """
    if not 0 < gamma < chi:
        raise ValueError("need 0 < gamma < chi")
    if not 0 < eps < 1:
        raise ValueError("need eps in (0, 1)")
    scheme.require_valid()
    k_lo = int(np.floor(eps**-gamma)) + 1
    k_hi = int(np.ceil(eps**-chi)) - 1
    if k_lo > k_hi:
        warnings.warn("empty mode range in lambda_eps_y; returning 0", stacklevel=2)
        return 0.0
    k = np.arange(k_lo, k_hi + 1, dtype=float)
    t = eps * k
    fv = scheme.f_at(t)
    hv = scheme.h_at(t)
    finite = np.isfinite(fv)
    summand = np.zeros_like(t)
    summand[finite] = (
        (1.0 - np.cos(t[finite] * y))
        * hv[finite] ** 2
        / (2.0 * np.pi * eps * (1.0 + nu * k[finite] ** 2 * fv[finite]))
    )
    return float(np.sum(summand))


def lambda_eps(scheme, eps, gamma=DEFAULT_GAMMA, chi=DEFAULT_CHI, nu=1.0):
    """Finite-resolution correction constant: mu-weighted sum of lambda_eps_y."""
    scheme.require_valid()
    return float(
        sum(
            w * lambda_eps_y(scheme, eps, gamma, chi, nu, y)
            for y, w in scheme.mu
            if w != 0.0
        )
    )


# -- corrected drift ---------------------------------------------------------------


def corrected_drift(F, G, lam):
    """The drift F - lam * (componentwise Laplacian of G), symbolically."""
    if F.n != G.n:
        raise ValueError("F and G must share the component count")
    if lam == 0.0:
        return F
    lap = laplacian(G)
    comps = tuple(f - l.scale(lam) for f, l in zip(F.components, lap.components))
    return PolynomialMap(F.n, comps)
