import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikecov.errors import CapExceeded, DomainError, NoRootError, PoleError
from spikecov.psd import Discrete, PointMass, TruncatedGamma
from spikecov.rmt import (
    build_psi_curve,
    companion_stieltjes,
    enumerate_partitions,
    invert_companion,
    invert_companion_batch,
    lsd_moment,
    lsd_support,
    mp_density,
    psi,
    psi_derivative,
)
from spikecov.spectrum import EigenSpectrum


class TestPsi:
    def test_point_mass_values(self):
        # alpha + y*alpha*sigma2/(alpha - sigma2), closed form.
        assert psi(PointMass(1.0), 2.0, 2.0) == pytest.approx(6.0, rel=1e-12)
        assert psi(PointMass(1.0), 0.25, 1.5) == pytest.approx(2.25, rel=1e-12)

    def test_asymptote(self):
        # For large alpha, psi(alpha) - alpha -> y * mean(H).
        h = PointMass(2.0)
        assert psi(h, 1.0, 1e6) - 1e6 == pytest.approx(2.0, abs=1e-4)

    def test_derivative_matches_finite_difference(self):
        h = TruncatedGamma(2.0, 10.0, 0.995)
        y, alpha, eps = 2.0, 1.3, 1e-6
        fd = (psi(h, y, alpha + eps) - psi(h, y, alpha - eps)) / (2 * eps)
        assert psi_derivative(h, y, alpha) == pytest.approx(fd, rel=1e-5)

    def test_derivative_zero_at_edge_location(self):
        # For the unit point mass, psi' vanishes at 1 + sqrt(y).
        y = 2.0
        assert psi_derivative(PointMass(1.0), y, 1.0 + math.sqrt(y)) == pytest.approx(0.0, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            psi(PointMass(1.0), 0.5, 1.0)
        with pytest.raises(DomainError):
            psi(PointMass(1.0), 0.5, 0.0)
        with pytest.raises(DomainError):
            psi_derivative(TruncatedGamma(2.0, 10.0), 0.5, 0.3)

    @given(
        sigma2=st.floats(0.1, 10.0),
        y=st.floats(0.05, 5.0),
        alpha_factor=st.floats(1.1, 50.0),
        c=st.floats(0.1, 10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_scale_equivariance(self, sigma2, y, alpha_factor, c):
        alpha = alpha_factor * sigma2
        lhs = psi(PointMass(c * sigma2), y, c * alpha)
        rhs = c * psi(PointMass(sigma2), y, alpha)
        assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_build_psi_curve_flags(self):
        h = PointMass(1.0)
        grid = np.array([0.5, 1.0, 1.5, 3.0, 10.0])
        curve = build_psi_curve(h, 2.0, grid)
        # The support point is inadmissible with NaN value.
        assert math.isnan(curve.psi_values[1]) and not curve.admissible[1]
        # psi' < 0 between the support and 1 + sqrt(2).
        assert not curve.admissible[2]
        assert curve.admissible[3] and curve.admissible[4]


class TestLsdSupport:
    @pytest.mark.parametrize("sigma2,y", [(1.0, 0.25), (0.014, 3.789), (2.0, 0.5)])
    def test_white_noise_edges(self, sigma2, y):
        sup = lsd_support(PointMass(sigma2), y)
        lo = sigma2 * (1 - math.sqrt(y)) ** 2
        hi = sigma2 * (1 + math.sqrt(y)) ** 2
        assert sup.upper_edge == pytest.approx(hi, rel=1e-8)
        # lower_edge is the continuous bulk's edge; the y > 1 zero atom is
        # reported separately.
        assert sup.lower_edge == pytest.approx(lo, rel=1e-6)
        assert sup.zero_atom == (y > 1)

    def test_zero_atom_above_one(self):
        sup = lsd_support(PointMass(1.0), 2.0)
        assert sup.zero_atom
        assert sup.intervals[0] == (0.0, 0.0)
        # Bulk edges 3 +/- 2*sqrt(2).
        lo, hi = sup.intervals[1]
        assert lo == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-8)
        assert hi == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-8)

    def test_split_bulk_two_atoms(self):
        h = Discrete([1.0, 4.0], [0.5, 0.5])
        sup = lsd_support(h, 0.05)
        assert len(sup.intervals) == 2
        (a, b), (c, d) = sup.intervals
        assert a < b < c < d
        # Separated atoms at small ratio keep two bulks near 1 and 4.
        assert b < 2.0 < c

    def test_split_bulk_matches_simulation(self):
        h = Discrete([1.0, 4.0], [0.5, 0.5])
        d, n = 500, 10_000
        sup = lsd_support(h, d / n)
        rng = np.random.default_rng(11)
        t = h.sample(d, rng)
        X = np.sqrt(t)[:, None] * rng.standard_normal((d, n))
        vals = np.linalg.eigvalsh((X @ X.T) / n)
        (a, b), (c, dd) = sup.intervals
        # Essentially no eigenvalue mass inside the gap, all within edges.
        in_gap = np.mean((vals > b * 1.02) & (vals < c * 0.98))
        assert in_gap == 0.0
        assert vals.min() > a * 0.95 and vals.max() < dd * 1.05

    def test_truncated_gamma_heavy_geometry(self):
        sup = lsd_support(TruncatedGamma(2.0, 10.0, 0.995), 2.0)
        assert sup.zero_atom
        assert sup.intervals[0] == (0.0, 0.0)
        assert sup.upper_edge > TruncatedGamma(2.0, 10.0, 0.995).support_upper

    def test_unbounded_support_rejected(self):
        with pytest.raises(DomainError):
            lsd_support(TruncatedGamma(2.0, 10.0, 1.0), 0.5)


PARTITION_COUNTS = {1: 1, 2: 2, 3: 3, 4: 5, 5: 7, 6: 11, 7: 15, 8: 22, 9: 30, 10: 42}


class TestPartitions:
    def test_counts_match_partition_numbers(self):
        for j, count in PARTITION_COUNTS.items():
            assert len(enumerate_partitions(j)) == count

    @given(j=st.integers(1, 10))
    @settings(max_examples=20, deadline=None)
    def test_each_tuple_sums_back(self, j):
        parts = enumerate_partitions(j)
        assert len(set(parts)) == len(parts)
        for part in parts:
            assert len(part) == j
            assert sum(l * i for l, i in enumerate(part, start=1)) == j

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_partitions(13)


class TestLsdMoment:
    def test_first_moments_closed_form(self):
        # First three linkage identities for any H, checked on two models.
        for h in (PointMass(1.0), TruncatedGamma(2.0, 10.0, 0.995)):
            for y in (0.5, 2.0):
                b1, b2, b3 = h.moment(1), h.moment(2), h.moment(3)
                assert lsd_moment(h, y, 1) == pytest.approx(b1, rel=1e-12)
                assert lsd_moment(h, y, 2) == pytest.approx(b2 + y * b1 ** 2, rel=1e-12)
                assert lsd_moment(h, y, 3) == pytest.approx(
                    b3 + 3 * y * b1 * b2 + y ** 2 * b1 ** 3, rel=1e-12
                )

    def test_known_values(self):
        assert lsd_moment(PointMass(1.0), 0.5, 2) == pytest.approx(1.5, rel=1e-12)
        assert lsd_moment(PointMass(1.0), 0.5, 3) == pytest.approx(2.75, rel=1e-12)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            lsd_moment(PointMass(1.0), 0.5, 13)


class TestCompanionStieltjes:
    def test_matches_direct_sum(self):
        vals = np.array([3.0, 2.0, 0.5])
        sp = EigenSpectrum(vals, d=3, n=4)
        u = 5.0
        direct = -(1 - 3 / 4) / u + np.sum(1.0 / (vals - u)) / 4
        assert companion_stieltjes(sp, u) == pytest.approx(direct, rel=1e-14)

    def test_structural_zeros_included(self):
        sp = EigenSpectrum(np.array([2.0, 1.0]), d=4, n=2)
        u = 3.0
        lam = np.array([2.0, 1.0, 0.0, 0.0])
        direct = -(1 - 2.0) / u + np.sum(1.0 / (lam - u)) / 2
        assert companion_stieltjes(sp, u) == pytest.approx(direct, rel=1e-14)

    def test_poles(self):
        sp = EigenSpectrum(np.array([2.0, 1.0]), d=2, n=2)
        with pytest.raises(PoleError):
            companion_stieltjes(sp, 0.0)
        with pytest.raises(PoleError):
            companion_stieltjes(sp, 2.0)


class TestInvertCompanion:
    def test_identity_spectrum_closed_form(self):
        # All eigenvalues 1, d = n: the root solves 1/(1-u) = -1/alpha.
        sp = EigenSpectrum(np.ones(50), d=50, n=50)
        assert invert_companion(sp, 3.0) == pytest.approx(4.0, rel=1e-9)
        assert invert_companion(sp, 1.0) == pytest.approx(2.0, rel=1e-9)

    def test_root_property(self):
        rng = np.random.default_rng(2)
        vals = np.sort(rng.uniform(0.2, 3.0, size=40))[::-1]
        sp = EigenSpectrum(vals, d=40, n=80)
        for alpha in (0.5, 2.0, 10.0):
            u = invert_companion(sp, alpha)
            assert u > vals[0]
            assert companion_stieltjes(sp, u) == pytest.approx(-1.0 / alpha, abs=1e-9)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(3)
        vals = np.sort(rng.uniform(0.2, 3.0, size=30))[::-1]
        sp = EigenSpectrum(vals, d=30, n=60)
        alphas = np.array([0.7, 1.5, 4.0, 25.0])
        batch = invert_companion_batch(sp, alphas)
        for a, u in zip(alphas, batch):
            assert u == pytest.approx(invert_companion(sp, a), rel=1e-9)

    def test_rejects_nonpositive_alpha(self):
        sp = EigenSpectrum(np.ones(5), d=5, n=5)
        with pytest.raises(NoRootError):
            invert_companion(sp, -1.0)


class TestMpDensity:
    def test_point_value(self):
        assert mp_density(1.0, 0.25, 1.0) == pytest.approx(0.61640, abs=1e-4)

    def test_integrates_to_one(self):
        from scipy import integrate
        sigma2, y = 1.0, 0.25
        a = sigma2 * (1 - math.sqrt(y)) ** 2
        b = sigma2 * (1 + math.sqrt(y)) ** 2
        total, _ = integrate.quad(lambda x: mp_density(sigma2, y, x), a, b, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_zero_outside_bulk(self):
        out = mp_density(1.0, 0.25, np.array([0.1, 3.0]))
        assert np.all(out == 0.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            mp_density(0.0, 0.25, 1.0)
