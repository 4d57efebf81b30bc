"""Gaussian inputs: stationary linear-equation samples and Wiener increments.

The stationary solution of the damped linear equation has independent
per-mode complex amplitudes with variance 1/(2(1 + nu k^2)); its discretized
counterpart has variance h(eps|k|)^2 / (2(1 + nu k^2 f(eps|k|))).  Sampling
both from one shared set of standard normals (comonotone per mode) couples
them optimally for single-time marginals and keeps the sampler exact and
stateless; this replaces a shared-driving-noise time integral and changes
only constants, not scaling exponents.

Random streams are derived from (seed, replicate, purpose) through a seed
sequence, so ensembles parallelize without any shared mutable state and
results cannot depend on thread scheduling.
"""

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField


def derive_stream(seed, replicate, purpose):
    """Deterministic, independent generator for one (replicate, purpose) pair."""
    entropy = (int(seed) & 0xFFFFFFFFFFFFFFFF, int(replicate)) + tuple(
        purpose.encode("utf-8")
    )
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class ModeGaussianDraw:
    """One standard normal pair per mode k = 0..K and component.

    z0 is the (real) mode-0 draw; zre/zim hold the real and imaginary draws
    for k = 1..K.  The complex unit-variance amplitude of mode k >= 1 is
    (zre + i*zim)/sqrt(2); negative modes are conjugates, never drawn.
    """

    K: int
    n: int
    z0: np.ndarray  # (n,)
    zre: np.ndarray  # (n, K)
    zim: np.ndarray  # (n, K)
    lineage: str = ""

    @staticmethod
    def sample(K, n, rng, lineage=""):
        z0 = rng.standard_normal(n)
        zz = rng.standard_normal((n, K, 2))
        return ModeGaussianDraw(K, n, z0, zz[:, :, 0], zz[:, :, 1], lineage)

    def field_coeffs(self, sigma):
        """Raw coefficient array with mode-k entry sigma[k] * zeta_k."""
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (self.K + 1,):
            raise ValueError("sigma must have one entry per mode k = 0..K")
        c = np.zeros((self.n, 2 * self.K + 1), dtype=np.complex128)
        c[:, self.K] = sigma[0] * self.z0
        pos = sigma[1:] * (self.zre + 1j * self.zim) / np.sqrt(2.0)
        c[:, self.K + 1 :] = pos
        c[:, : self.K] = np.conj(pos)[:, ::-1]
        return c

    def field(self, sigma):
        """Field with mode-k coefficient sigma[k] * zeta_k (reality built in).

        sigma is a real array over k = 0..K; E|coefficient_k|^2 = sigma[k]^2.
        """
        return SpectralField(self.K, self.n, self.field_coeffs(sigma))


@dataclass(frozen=True)
class CoupledStationaryPair:
    """Stationary samples of the limit and discretized linear equations,
    built from one shared draw."""

    psi: SpectralField
    psi_tilde: SpectralField
    draw: ModeGaussianDraw


def stationary_sigmas(K, nu):
    """Per-mode standard deviations (2(1 + nu k^2))^(-1/2) of the limit equation."""
    k = np.arange(K + 1, dtype=float)
    return 1.0 / np.sqrt(2.0 * (1.0 + nu * k * k))


def discrete_sigmas(scheme, eps, nu, K):
    """Per-mode standard deviations of the discretized stationary solution.

    h(eps k) / sqrt(2(1 + nu k^2 f(eps k))); zero on modes where f = +inf
    (validated schemes have h = 0 there).
    """
    k = np.arange(K + 1, dtype=float)
    fv = scheme.f_at(eps * k)
    hv = scheme.h_at(eps * k)
    finite = np.isfinite(fv)
    out = np.zeros(K + 1)
    out[finite] = hv[finite] / np.sqrt(2.0 * (1.0 + nu * k[finite] ** 2 * fv[finite]))
    return out


def sample_stationary_pair(scheme, eps, nu, K, rng, n=1, lineage=""):
    """Draw the coupled pair (psi, psi_tilde) from one set of mode normals."""
    if K < 1 or nu <= 0 or eps <= 0:
        raise ValueError("need K >= 1, nu > 0, eps > 0")
    scheme.require_valid()
    draw = ModeGaussianDraw.sample(K, n, rng, lineage)
    psi = draw.field(stationary_sigmas(K, nu))
    psi_tilde = draw.field(discrete_sigmas(scheme, eps, nu, K))
    return CoupledStationaryPair(psi, psi_tilde, draw)


def coupling_l2_distance_sq(scheme, eps, nu, K, n=1):
    """Exact E||psi_tilde - psi||_{L^2}^2 under the shared-draw coupling.

    Equals sum over two-sided modes and components of (sigma_tilde - sigma)^2.
    """
    s = stationary_sigmas(K, nu)
    st = discrete_sigmas(scheme, eps, nu, K)
    d2 = (st - s) ** 2
    return float(n * (d2[0] + 2.0 * np.sum(d2[1:])))


def wiener_increment_coeffs(K, n, dt, rng):
    """Raw coefficient array of one Wiener increment (single source of the
    draw order, so coupled runs that re-derive the stream stay in lockstep)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    draw = ModeGaussianDraw.sample(K, n, rng)
    return draw.field_coeffs(np.full(K + 1, np.sqrt(dt)))


def wiener_increment(K, n, dt, rng):
    """One cylindrical-Wiener increment over a step dt, as a spectral field.

    Per component, E|increment_k|^2 = dt for every mode; modes k and -k are
    conjugate.  The same object is meant to be consumed by every coupled run
    within a step (the discretized run filters it afterwards).
    """
    return SpectralField(K, n, wiener_increment_coeffs(K, n, dt, rng))
