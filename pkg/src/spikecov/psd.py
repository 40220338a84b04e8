"""Population spectral distribution (PSD) models.

A PSD describes the limiting distribution of population covariance
eigenvalues in the noise block.  Three families are supported: a point
mass (white noise), a Gamma law truncated at an upper quantile and
renormalized (right-skewed noise), and a finite discrete mixture.

All models expose moments, quantiles, i.i.d. sampling, and the two
resolvent-type integrals needed by the random-matrix computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConvergenceError, NoVarianceError

__all__ = [
    "PointMass",
    "TruncatedGamma",
    "Discrete",
    "psd_from_json",
    "solve_gamma_from_moments",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PointMass:
    """Degenerate PSD: all population noise eigenvalues equal ``sigma2``."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def model(self):
        return "point_mass"

    @property
    def support_upper(self):
        return self.sigma2

    @property
    def support_lower(self):
        return self.sigma2

    def moment(self, j):
        if j < 1:
            raise ValueError("moment order must be >= 1")
        return self.sigma2 ** j

    def quantile(self, p):
        _check_prob(p)
        return self.sigma2

    def sample(self, d, rng):
        # Consumes no randomness: exact scale equivariance with a shared
        # stream relies on this.
        return np.full(d, self.sigma2)

    def in_support(self, alpha):
        return alpha == self.sigma2

    def support_blocks(self):
        return [(self.sigma2, self.sigma2)]

    def integral_t_over(self, alpha):
        """``int t/(alpha - t) dH``, alpha outside the support."""
        return self.sigma2 / (alpha - self.sigma2)

    def integral_t2_over_sq(self, alpha):
        """``int t^2/(alpha - t)^2 dH``, alpha outside the support."""
        return (self.sigma2 / (alpha - self.sigma2)) ** 2

    integral_t_over_batch = integral_t_over
    integral_t2_over_sq_batch = integral_t2_over_sq

    def to_json_dict(self):
        return {"model": "point_mass", "params": {"sigma2": self.sigma2}}


@dataclass(frozen=True)
class TruncatedGamma:
    """Gamma(shape, rate) cut at the untruncated law's ``trunc_q``-quantile.

    The density is renormalized on ``[0, upper]`` where ``upper`` is the
    quantile of the *untruncated* Gamma.  ``trunc_q = 1`` recovers the
    plain Gamma law (unbounded support; moments stay finite but support
    scans reject it).
    """

    shape: float
    rate: float
    trunc_q: float = 0.995
    _gl_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.shape > 0:
            raise ValueError(f"shape must be positive, got {self.shape}")
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if not 0 < self.trunc_q <= 1:
            raise ValueError(f"trunc_q must be in (0, 1], got {self.trunc_q}")

    @property
    def model(self):
        return "truncated_gamma"

    @property
    def support_upper(self):
        if self.trunc_q == 1:
            return math.inf
        return special.gammaincinv(self.shape, self.trunc_q) / self.rate

    @property
    def support_lower(self):
        return 0.0

    def moment(self, j):
        if j < 1:
            raise ValueError("moment order must be >= 1")
        # Ratio of regularized lower incomplete Gamma functions; exact.
        log_ratio = special.gammaln(self.shape + j) - special.gammaln(self.shape)
        base = math.exp(log_ratio) / self.rate ** j
        if self.trunc_q == 1:
            return base
        cut = self.rate * self.support_upper
        return base * special.gammainc(self.shape + j, cut) / self.trunc_q

    def quantile(self, p):
        _check_prob(p)
        return float(special.gammaincinv(self.shape, p * self.trunc_q)) / self.rate

    def sample(self, d, rng):
        # Inverse-CDF sampling keeps draws scale-equivariant in 1/rate.
        u = rng.random(d)
        return special.gammaincinv(self.shape, u * self.trunc_q) / self.rate

    def in_support(self, alpha):
        return 0 <= alpha <= self.support_upper

    def support_blocks(self):
        return [(0.0, self.support_upper)]

    def _expect(self, g):
        """Adaptive quadrature of ``E[g(T)]`` in quantile space."""
        val, _ = integrate.quad(
            lambda v: g(self.quantile(v)), 0.0, 1.0,
            epsabs=1e-11, epsrel=1e-11, limit=200,
        )
        return val

    def _gl_points(self, n=768):
        key = n
        if key not in self._gl_cache:
            x, w = np.polynomial.legendre.leggauss(n)
            v = 0.5 * (x + 1.0)
            t = special.gammaincinv(self.shape, v * self.trunc_q) / self.rate
            self._gl_cache[key] = (t, 0.5 * w)
        return self._gl_cache[key]

    def integral_t_over(self, alpha):
        return self._expect(lambda t: t / (alpha - t))

    def integral_t2_over_sq(self, alpha):
        return self._expect(lambda t: (t / (alpha - t)) ** 2)

    def integral_t_over_batch(self, alpha):
        t, w = self._gl_points()
        a = np.asarray(alpha, dtype=float)[..., None]
        return np.sum(w * t / (a - t), axis=-1)

    def integral_t2_over_sq_batch(self, alpha):
        t, w = self._gl_points()
        a = np.asarray(alpha, dtype=float)[..., None]
        return np.sum(w * (t / (a - t)) ** 2, axis=-1)

    def to_json_dict(self):
        return {
            "model": "truncated_gamma",
            "params": {
                "shape": self.shape,
                "rate": self.rate,
                "trunc_q": self.trunc_q,
            },
        }


class Discrete:
    """Finite mixture of atoms with positive weights summing to one."""

    def __init__(self, atoms, weights):
        atoms = np.asarray(atoms, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if atoms.ndim != 1 or atoms.shape != weights.shape:
            raise ValueError("atoms and weights must be 1-d and equal length")
        if np.any(atoms < 0):
            raise ValueError("atoms must be nonnegative")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if abs(weights.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        order = np.argsort(atoms)
        self.atoms = atoms[order]
        self.weights = weights[order]
        self._cum = np.cumsum(self.weights)

    @property
    def model(self):
        return "discrete"

    @property
    def support_upper(self):
        return float(self.atoms[-1])

    @property
    def support_lower(self):
        return float(self.atoms[0])

    def moment(self, j):
        if j < 1:
            raise ValueError("moment order must be >= 1")
        return float(np.sum(self.weights * self.atoms ** j))

    def quantile(self, p):
        _check_prob(p)
        # Left-continuous generalized inverse: smallest atom with CDF >= p.
        idx = np.searchsorted(self._cum, p, side="left")
        idx = min(idx, len(self.atoms) - 1)
        return float(self.atoms[idx])

    def sample(self, d, rng):
        u = rng.random(d)
        idx = np.searchsorted(self._cum, u, side="left")
        return self.atoms[np.minimum(idx, len(self.atoms) - 1)]

    def in_support(self, alpha):
        return bool(np.any(self.atoms == alpha))

    def support_blocks(self):
        return [(float(a), float(a)) for a in self.atoms]

    def integral_t_over(self, alpha):
        return float(np.sum(self.weights * self.atoms / (alpha - self.atoms)))

    def integral_t2_over_sq(self, alpha):
        return float(np.sum(self.weights * (self.atoms / (alpha - self.atoms)) ** 2))

    def integral_t_over_batch(self, alpha):
        a = np.asarray(alpha, dtype=float)[..., None]
        return np.sum(self.weights * self.atoms / (a - self.atoms), axis=-1)

    def integral_t2_over_sq_batch(self, alpha):
        a = np.asarray(alpha, dtype=float)[..., None]
        return np.sum(self.weights * (self.atoms / (a - self.atoms)) ** 2, axis=-1)

    def to_json_dict(self):
        return {
            "model": "discrete",
            "params": {
                "atoms": self.atoms.tolist(),
                "weights": self.weights.tolist(),
            },
        }

    def __repr__(self):
        return f"Discrete(atoms={self.atoms.tolist()}, weights={self.weights.tolist()})"

    def __eq__(self, other):
        return (
            isinstance(other, Discrete)
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.weights, other.weights)
        )


def psd_from_json(obj):
    """Inverse of ``to_json_dict``."""
    model = obj["model"]
    params = obj["params"]
    if model == "point_mass":
        return PointMass(params["sigma2"])
    if model == "truncated_gamma":
        return TruncatedGamma(params["shape"], params["rate"], params.get("trunc_q", 0.995))
    if model == "discrete":
        return Discrete(params["atoms"], params["weights"])
    raise ValueError(f"unknown PSD model {model!r}")


def solve_gamma_from_moments(beta1, beta2, trunc_q=0.995, rtol=1e-8):
    """Recover (shape, rate) of a truncated Gamma from its first two moments.

    The truncated moments are scale-equivariant in 1/rate, so the problem
    reduces to a 1-d root find in the shape: the ratio ``beta2/beta1^2``
    pins the shape, then the rate follows from the first moment.  Seeded
    and bracketed around the untruncated closed-form inversion.
    """
    if beta1 <= 0:
        raise ValueError("first moment must be positive")
    variance = beta2 - beta1 ** 2
    if variance <= 0:
        raise NoVarianceError(
            f"beta2 ({beta2}) must exceed beta1^2 ({beta1 ** 2}); no spread to fit"
        )

    target = beta2 / beta1 ** 2

    def ratio(log_shape):
        h = TruncatedGamma(math.exp(log_shape), 1.0, trunc_q)
        m1 = h.moment(1)
        return h.moment(2) / (m1 * m1) - target

    # Untruncated seed; the ratio is decreasing in the shape.
    shape0 = max(beta1 ** 2 / variance, 1e-8)
    lo = hi = math.log(shape0)
    flo = ratio(lo)
    for _ in range(200):
        if flo > 0:
            break
        lo -= 1.0
        flo = ratio(lo)
    fhi = ratio(hi)
    for _ in range(200):
        if fhi < 0:
            break
        hi += 1.0
        fhi = ratio(hi)
    if not (flo > 0 > fhi):
        raise ConvergenceError(
            f"could not bracket the shape for moments ({beta1}, {beta2})",
            residual=max(abs(flo), abs(fhi)),
        )
    log_shape = optimize.brentq(ratio, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    shape = math.exp(log_shape)
    rate = TruncatedGamma(shape, 1.0, trunc_q).moment(1) / beta1

    fit = TruncatedGamma(shape, rate, trunc_q)
    res = max(
        abs(fit.moment(1) - beta1) / beta1,
        abs(fit.moment(2) - beta2) / beta2,
    )
    if res > rtol:
        raise ConvergenceError(
            f"moment fit residual {res:.3e} exceeds {rtol:.1e}", residual=res
        )
    return shape, rate


def _check_prob(p):
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
