import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

from spikecov.estimators import SpikeRankSelector


def factor_data(n_samples=300, n_features=60, k=2, strength=8.0, seed=0):
    rng = np.random.default_rng(seed)
    loadings = rng.standard_normal((n_features, k))
    loadings /= np.linalg.norm(loadings, axis=0)
    scores = rng.standard_normal((n_samples, k)) * strength
    return scores @ loadings.T + rng.standard_normal((n_samples, n_features))


class TestSpikeRankSelector:
    def test_kn_recovers_rank(self):
        X = factor_data()
        sel = SpikeRankSelector(method="kn", alpha=0.01).fit(X)
        assert sel.n_spikes_ == 2
        assert sel.components_.shape == (2, 60)

    def test_cm_point_mass_recovers_rank(self):
        X = factor_data(seed=1)
        sel = SpikeRankSelector(method="cm", psd_model="point_mass",
                               B=200, seed=3).fit(X)
        assert sel.n_spikes_ == 2

    def test_transform_projects(self):
        X = factor_data(seed=2)
        sel = SpikeRankSelector(method="kn").fit(X)
        Z = sel.transform(X)
        assert Z.shape == (300, sel.n_spikes_)
        # Components are orthonormal rows.
        G = sel.components_ @ sel.components_.T
        np.testing.assert_allclose(G, np.eye(sel.n_spikes_), atol=1e-10)

    def test_zero_spikes_transform_is_empty(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((100, 30))
        sel = SpikeRankSelector(method="kn").fit(X)
        if sel.n_spikes_ == 0:
            assert sel.transform(X).shape == (100, 0)

    def test_deterministic_fit(self):
        X = factor_data(seed=5)
        a = SpikeRankSelector(method="cm", psd_model="point_mass", B=150, seed=11).fit(X)
        b = SpikeRankSelector(method="cm", psd_model="point_mass", B=150, seed=11).fit(X)
        assert a.n_spikes_ == b.n_spikes_
        assert [s.s_alpha for s in a.result_.steps] == [s.s_alpha for s in b.result_.steps]

    def test_get_params_and_clone(self):
        sel = SpikeRankSelector(method="py", alpha=0.05, seed=2)
        params = sel.get_params()
        assert params["method"] == "py" and params["alpha"] == 0.05
        cloned = clone(sel)
        assert cloned.get_params() == params

    def test_pipeline_composition(self):
        X = factor_data(seed=6)
        pipe = Pipeline([
            ("scale", StandardScaler(with_std=False)),
            ("rank", SpikeRankSelector(method="kn")),
        ])
        Z = pipe.fit_transform(X)
        assert Z.shape[1] == pipe.named_steps["rank"].n_spikes_

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            SpikeRankSelector(method="aic").fit(factor_data(seed=7))

    def test_py_method_runs(self):
        X = factor_data(seed=8)
        sel = SpikeRankSelector(method="py").fit(X)
        assert sel.result_.method == "py"
