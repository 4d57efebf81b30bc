"""Polynomial maps R^n -> R^n with exact symbolic derivatives.

Drift and flux nonlinearities are restricted to polynomials: the Jacobian,
Laplacian and Hessian are then exact symbolic objects, so differentiation
error never contaminates the experiments downstream.  Evaluation on fields
is pseudospectral: transform to an oversampled grid, apply the map
pointwise, transform back and truncate.
"""

import re
from dataclasses import dataclass

import numpy as np

from .spectral import GridField, evaluate_on_grid, from_grid, smooth_odd_at_least


@dataclass(frozen=True)
class Polynomial:
    """Sparse real polynomial in nvars variables: terms maps exponent tuples to coefficients."""

    nvars: int
    terms: tuple  # ((exponents, coeff), ...), canonically sorted, no zero coeffs

    @staticmethod
    def from_terms(nvars, terms):
        acc = {}
        for expo, coeff in terms:
            expo = tuple(int(e) for e in expo)
            if len(expo) != nvars or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent tuple {expo} for {nvars} variables")
            acc[expo] = acc.get(expo, 0.0) + float(coeff)
        cleaned = tuple(sorted((e, c) for e, c in acc.items() if c != 0.0))
        return Polynomial(nvars, cleaned)

    @staticmethod
    def zero(nvars):
        return Polynomial(nvars, ())

    @staticmethod
    def constant(nvars, c):
        return Polynomial.from_terms(nvars, [((0,) * nvars, c)])

    @property
    def degree(self):
        return max((sum(e) for e, _ in self.terms), default=0)

    def __call__(self, v):
        """Evaluate at v of shape (nvars,) or (nvars, M); returns scalar or (M,)."""
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape[1:] if v.ndim > 1 else ())
        for expo, coeff in self.terms:
            term = np.full_like(out, coeff) if out.ndim else coeff
            for j, e in enumerate(expo):
                if e:
                    term = term * v[j] ** e
            out = out + term
        return out

    def diff(self, j):
        terms = []
        for expo, coeff in self.terms:
            if expo[j] == 0:
                continue
            new = list(expo)
            new[j] -= 1
            terms.append((tuple(new), coeff * expo[j]))
        return Polynomial.from_terms(self.nvars, terms)

    def scale(self, s):
        return Polynomial.from_terms(self.nvars, [(e, s * c) for e, c in self.terms])

    def __add__(self, other):
        return Polynomial.from_terms(self.nvars, self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for expo, coeff in self.terms:
            factors = [f"{coeff:g}"]
            for j, e in enumerate(expo):
                if e == 1:
                    factors.append(f"u{j + 1}")
                elif e > 1:
                    factors.append(f"u{j + 1}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


@dataclass(frozen=True)
class PolynomialMap:
    """A map R^n -> R^n given by one polynomial per component."""

    n: int
    components: tuple

    @staticmethod
    def from_components(components):
        components = tuple(components)
        n = len(components)
        if any(p.nvars != n for p in components):
            raise ValueError("every component must be a polynomial in n variables")
        return PolynomialMap(n, components)

    @staticmethod
    def zero(n):
        return PolynomialMap(n, tuple(Polynomial.zero(n) for _ in range(n)))

    @staticmethod
    def identity(n):
        comps = []
        for i in range(n):
            expo = tuple(1 if j == i else 0 for j in range(n))
            comps.append(Polynomial.from_terms(n, [(expo, 1.0)]))
        return PolynomialMap(n, tuple(comps))

    @property
    def degree(self):
        return max(p.degree for p in self.components)

    def is_zero(self):
        return all(not p.terms for p in self.components)

    def __str__(self):
        return "; ".join(str(p) for p in self.components)


def evaluate(P, v):
    """Componentwise evaluation; v of shape (n,) or (n, M)."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != P.n:
        raise ValueError(f"expected {P.n} components, got {v.shape[0]}")
    return np.stack([p(v) for p in P.components])


def jacobian(P):
    """Matrix of symbolic partial derivatives, entry (i, j) = dP_i/du_j."""
    return tuple(tuple(p.diff(j) for j in range(P.n)) for p in P.components)


def laplacian(P):
    """Componentwise sum of second derivatives, as a new PolynomialMap."""
    comps = []
    for p in P.components:
        acc = Polynomial.zero(P.n)
        for j in range(P.n):
            acc = acc + p.diff(j).diff(j)
        comps.append(acc)
    return PolynomialMap(P.n, tuple(comps))


def hessian(P):
    """Second-derivative tensor: hessian(P)[i][j][l] = d^2 P_i / du_j du_l."""
    return tuple(
        tuple(tuple(p.diff(j).diff(l) for l in range(P.n)) for j in range(P.n))
        for p in P.components
    )


# -- pseudospectral application ----------------------------------------------


def padded_grid_size(K, pad):
    # odd and FFT-friendly; only the lower bound matters for alias control
    if pad < 1:
        raise ValueError("pad ratio must be >= 1")
    return smooth_odd_at_least(pad * (2 * K + 1))


def grid_values(u, M_pad):
    return evaluate_on_grid(u, M_pad)


def apply_pointwise(P, u, pad=2.0):
    """Evaluate P(u(x)) pseudospectrally and truncate back to u's band."""
    M = padded_grid_size(u.K, pad)
    vals = evaluate(P, evaluate_on_grid(u, M))
    return from_grid(GridField(M, vals), u.K)


def apply_bilinear(jac, u, w, pad=2.0):
    """Evaluate the matrix field jac(u(x)) acting on w(x), pointwise.

    jac is a jacobian() result; u supplies the point where the entries are
    evaluated and w the vector they multiply.
    """
    n = len(jac)
    if u.n != n or w.n != n or u.K != w.K:
        raise ValueError("field shape mismatch")
    M = padded_grid_size(u.K, pad)
    ug = evaluate_on_grid(u, M)
    wg = evaluate_on_grid(w, M)
    out = np.zeros_like(wg)
    for i in range(n):
        for j in range(n):
            entry = jac[i][j]
            if entry.terms:
                out[i] += entry(ug) * wg[j]
    return from_grid(GridField(M, out), u.K)


def apply_hessian_form(hess, u, v, w, pad=2.0):
    """Pointwise quadratic form sum_{j,l} (d^2 P_i/du_j du_l)(u(x)) v_j(x) w_l(x)."""
    n = len(hess)
    if not (u.n == v.n == w.n == n) or not (u.K == v.K == w.K):
        raise ValueError("field shape mismatch")
    M = padded_grid_size(u.K, pad)
    ug = evaluate_on_grid(u, M)
    vg = evaluate_on_grid(v, M)
    wg = evaluate_on_grid(w, M)
    out = np.zeros_like(vg)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                entry = hess[i][j][l]
                if entry.terms:
                    out[i] += entry(ug) * vg[j] * wg[l]
    return from_grid(GridField(M, out), u.K)


# -- text format ---------------------------------------------------------------

_TOKEN = re.compile(r"^u(\d+)(?:\^(\d+))?$")


def parse_polynomial(text, nvars):
    """Parse a sum of coef*u1^a*u2^b terms, e.g. '0.5*u1^2 - u1*u2 + 3'."""
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise ValueError("empty polynomial")
    # split before +/- signs at term boundaries (not exponents like 1e-3)
    terms = []
    for chunk in re.split(r"(?<![eE])(?=[+-])", cleaned):
        if not chunk:
            continue
        if chunk in "+-":
            raise ValueError(f"dangling sign in polynomial {text!r}")
        coeff = 1.0
        expo = [0] * nvars
        if chunk[0] in "+-":
            coeff = -1.0 if chunk[0] == "-" else 1.0
            chunk = chunk[1:]
        for factor in chunk.split("*"):
            m = _TOKEN.match(factor)
            if m:
                idx = int(m.group(1)) - 1
                if not 0 <= idx < nvars:
                    raise ValueError(f"variable u{idx + 1} out of range in {text!r}")
                expo[idx] += int(m.group(2) or 1)
            else:
                try:
                    coeff *= float(factor)
                except ValueError:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}") from None
        terms.append((tuple(expo), coeff))
    return Polynomial.from_terms(nvars, terms)


def parse_polynomial_map(spec, n):
    """Parse one polynomial per component; spec is a ';'-joined string or a list."""
    parts = spec.split(";") if isinstance(spec, str) else list(spec)
    if len(parts) != n:
        raise ValueError(f"expected {n} components, got {len(parts)}")
    return PolynomialMap(n, tuple(parse_polynomial(p, n) for p in parts))
