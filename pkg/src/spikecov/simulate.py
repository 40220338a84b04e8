"""Monte-Carlo engines: noise-eigenvalue thresholds and synthetic spectra.

Replications are driven by splittable substreams derived from a single
seed, so results are identical whether replications run serially or in a
thread pool (aggregation is by replication index, never completion order).
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateInput
from .spectrum import EigenSpectrum

__all__ = [
    "ThresholdEstimate",
    "SpikedModelSpec",
    "largest_noise_eigenvalue",
    "threshold",
    "generate_spiked_data",
    "sample_cov_spectrum",
    "default_threads",
]

MIN_REPLICATIONS = 100


def default_threads():
    """Worker cap from SPIKES_THREADS; defaults to serial execution."""
    raw = os.environ.get("SPIKES_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class ThresholdEstimate:
    """Simulated (1 - alpha)-quantile of the largest noise eigenvalue."""

    s_alpha: float
    alpha: float
    B: int
    seed: int
    lambda1_min: float
    lambda1_median: float
    lambda1_max: float
    psd_used: object
    d: int
    n: int
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.lambda1_min <= self.s_alpha <= self.lambda1_max:
            raise ValueError("threshold must lie within the simulated range")
        if self.B < MIN_REPLICATIONS:
            raise ValueError(f"B must be >= {MIN_REPLICATIONS}")

    def to_json_dict(self):
        out = {
            "s_alpha": self.s_alpha,
            "alpha": self.alpha,
            "B": self.B,
            "seed": self.seed,
            "lambda1_summary": {
                "min": self.lambda1_min,
                "median": self.lambda1_median,
                "max": self.lambda1_max,
            },
            "psd": self.psd_used.to_json_dict(),
            "d": self.d,
            "n": self.n,
        }
        return out


@dataclass
class SpikedModelSpec:
    """Population model: spike eigenvalues on top of a noise PSD."""

    spikes: list
    noise_psd: object
    d: int
    n: int

    def __post_init__(self):
        spikes = [float(s) for s in self.spikes]
        if any(s <= 0 for s in spikes):
            raise ValueError("spikes must be positive")
        if sorted(spikes, reverse=True) != spikes:
            raise ValueError("spikes must be listed in descending order")
        if len(spikes) >= self.d:
            raise ValueError("number of spikes must be below the dimension")
        upper = self.noise_psd.support_upper
        if any(s <= upper for s in spikes):
            warnings.warn(
                "some spikes lie at or below the noise support upper bound; "
                "they may not separate from the bulk",
                stacklevel=2,
            )
        self.spikes = spikes


def _top_eigenvalue(M):
    try:
        w = scipy.linalg.eigh(
            M, eigvals_only=True, subset_by_index=[M.shape[0] - 1, M.shape[0] - 1],
            driver="evr",
        )
        return float(w[0])
    except scipy.linalg.LinAlgError:
        return float(np.linalg.eigvalsh(M)[-1])


def largest_noise_eigenvalue(H, d, n, rng):
    """One replication of the noise top-eigenvalue draw.

    Samples the population diagonal from ``H``, fills a d-by-n standard
    normal matrix, and returns the top eigenvalue of the sample covariance;
    the Gram form on the smaller side keeps the cost at min(d, n)^3.
    """
    beta = H.sample(d, rng)
    Z = rng.standard_normal((d, n))
    A = np.sqrt(beta)[:, None] * Z
    if d <= n:
        M = (A @ A.T) / n
    else:
        M = (A.T @ A) / n
    return _top_eigenvalue(M)


def threshold(H, d, n, alpha, B, seed, n_jobs=None, keep_samples=False):
    """Algorithm-1 style simulated threshold.

    Runs ``B`` independent replications on substreams spawned from ``seed``
    and returns the conservative empirical (1 - alpha)-quantile (the
    ``ceil((1 - alpha) * B)``-th order statistic).
    """
    if B < MIN_REPLICATIONS:
        raise ValueError(f"B must be >= {MIN_REPLICATIONS}, got {B}")
    if not 0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha}")
    children = np.random.SeedSequence(seed).spawn(B)

    def one(b):
        return largest_noise_eigenvalue(H, d, n, np.random.default_rng(children[b]))

    n_jobs = n_jobs or default_threads()
    samples = np.empty(B)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            for b, val in enumerate(pool.map(one, range(B))):
                samples[b] = val
    else:
        for b in range(B):
            samples[b] = one(b)

    order = np.sort(samples)
    idx = math.ceil((1.0 - alpha) * B) - 1
    s_alpha = float(order[idx])
    return ThresholdEstimate(
        s_alpha=s_alpha,
        alpha=alpha,
        B=B,
        seed=seed,
        lambda1_min=float(order[0]),
        lambda1_median=float(np.median(order)),
        lambda1_max=float(order[-1]),
        psd_used=H,
        d=d,
        n=n,
        samples=samples if keep_samples else None,
    )


def generate_spiked_data(spec: SpikedModelSpec, rng, permute_rows=False):
    """Draw a d-by-n data matrix from the spiked population model."""
    d, n = spec.d, spec.n
    m = len(spec.spikes)
    diag = np.empty(d)
    diag[:m] = spec.spikes
    diag[m:] = spec.noise_psd.sample(d - m, rng)
    X = np.sqrt(diag)[:, None] * rng.standard_normal((d, n))
    if permute_rows:
        X = X[rng.permutation(d)]
    return X


def sample_cov_spectrum(X, center=False, gene_id=None):
    """Eigenvalues of ``(1/n) X X^T`` (rows are variables, columns samples)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    d, n = X.shape
    if n < 2:
        raise DegenerateInput("need at least two samples (columns)")
    if center:
        X = X - X.mean(axis=1, keepdims=True)
    if min(d, n) < 2 and not np.any(X):
        raise DegenerateInput("matrix is identically zero after centering")
    if d <= n:
        M = (X @ X.T) / n
    else:
        M = (X.T @ X) / n
    vals = np.linalg.eigvalsh(M)[::-1]
    vals = np.maximum(vals, 0.0)
    return EigenSpectrum(vals, d=d, n=n, centered=center, gene_id=gene_id)
