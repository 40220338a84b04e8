"""Scikit-learn compatible front door.

``SpikeRankSelector`` determines the number of signal components of a
data matrix and, as a transformer, projects onto that many leading
principal directions, so the estimator drops into sklearn pipelines.
Follows the sklearn convention: ``fit(X)`` takes X with shape
(n_samples, n_features); internally features are the variables.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import estimate as est
from .simulate import sample_cov_spectrum

__all__ = ["SpikeRankSelector"]


class SpikeRankSelector(TransformerMixin, BaseEstimator):
    """Estimate the number of spiked components and project onto them.

    Parameters
    ----------
    method : {"cm", "kn", "py"}
        "cm" is the sequential Monte-Carlo test under a fitted noise PSD;
        "kn" and "py" are the Tracy-Widom and spacing baselines.
    psd_model : {"truncated_gamma", "point_mass"}
        Noise model fitted at each stage of the "cm" method.
    alpha : float
        Per-stage test level for "cm" and "kn".
    B : int
        Monte-Carlo replications per stage for "cm".
    seed : int
        Seed for all simulation; fixed seed means fully deterministic fit.
    center : bool
        Subtract per-feature means before forming the covariance.
    """

    def __init__(self, method="cm", psd_model="truncated_gamma", alpha=0.01,
                 B=500, seed=0, center=True):
        self.method = method
        self.psd_model = psd_model
        self.alpha = alpha
        self.B = B
        self.seed = seed
        self.center = center

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2)
        data = X.T  # variables in rows
        self.mean_ = X.mean(axis=0) if self.center else np.zeros(X.shape[1])
        self.spectrum_ = sample_cov_spectrum(data, center=self.center)
        if self.method == "cm":
            self.result_ = est.estimate_spikes_cm(
                self.spectrum_, model=self.psd_model, alpha=self.alpha,
                B=self.B, seed=self.seed,
            )
        elif self.method == "kn":
            self.result_ = est.estimate_spikes_kn(self.spectrum_, alpha=self.alpha)
        elif self.method == "py":
            self.result_ = est.estimate_spikes_py(self.spectrum_)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.n_spikes_ = self.result_.k_hat

        centered = data - data.mean(axis=1, keepdims=True) if self.center else data
        # Leading eigenvectors via thin SVD of the (d x n) matrix.
        k = max(self.n_spikes_, 0)
        if k > 0:
            u, _, _ = np.linalg.svd(centered, full_matrices=False)
            self.components_ = u[:, :k].T
        else:
            self.components_ = np.empty((0, data.shape[0]))
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X)
        return (X - self.mean_) @ self.components_.T

    def _more_tags(self):
        return {"non_deterministic": False}
