"""Calibrate the spacing-threshold constant used by the PY baseline.

The spacing test stops at the first index whose next r spacings all fall
below ``c * sigma2_hat * n**(-2/3) * (1+sqrt(y)) * (1+1/sqrt(y))**(1/3)``.
This script picks ``c`` as the 90th percentile of the smallest constant
that would stop immediately on pure white noise at d = n = 500, so the
pure-noise false-positive rate is at most 10% at that geometry.  The
chosen value is frozen as ``estimate.PY_SPACING_CONSTANT``.

Run:  python scripts/calibrate_py_spacing_constant.py [reps]
"""

import sys

import numpy as np

from spikecov.psd import PointMass
from spikecov.simulate import generate_spiked_data, sample_cov_spectrum, SpikedModelSpec


def main(reps=400, d=500, n=500, r=2, seed=20240501):
    spec = SpikedModelSpec([], PointMass(1.0), d, n)
    children = np.random.SeedSequence(seed).spawn(reps)
    y = d / n
    unit = n ** (-2.0 / 3.0) * (1.0 + np.sqrt(y)) * (1.0 + 1.0 / np.sqrt(y)) ** (1.0 / 3.0)
    needed = np.empty(reps)
    for i in range(reps):
        rng = np.random.default_rng(children[i])
        X = generate_spiked_data(spec, rng)
        vals = sample_cov_spectrum(X).nonzero_values
        sigma2 = float(np.mean(vals[len(vals) // 2:]))
        # Smallest c that makes the first r spacings all sub-threshold.
        top_gap = float(np.max(vals[:r] - vals[1:r + 1]))
        needed[i] = top_gap / (sigma2 * unit)
    for q in (0.5, 0.8, 0.9, 0.95, 0.99):
        print(f"q={q}: c={np.quantile(needed, q):.3f}")
    print(f"chosen c (90th pct, rounded up): {np.ceil(np.quantile(needed, 0.9)):.1f}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:]))
