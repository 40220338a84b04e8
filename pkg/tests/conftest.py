import csv
import zlib

import numpy as np
import pytest

# Filled by the acceptance suite; echoed after the test summary so the
# per-criterion verdict lines survive pytest's output capture.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)

from spikecov.psd import PointMass
from spikecov.simulate import SpikedModelSpec, generate_spiked_data, sample_cov_spectrum


def rng_for(tag, i=0):
    """Independent generator keyed by (tag, index); stable across runs."""
    ss = np.random.SeedSequence(entropy=zlib.crc32(tag.encode()), spawn_key=(i,))
    return np.random.default_rng(ss)


@pytest.fixture
def noise_spectrum():
    """White-noise spectrum at d=200, n=100."""
    spec = SpikedModelSpec([], PointMass(1.0), 200, 100)
    X = generate_spiked_data(spec, np.random.default_rng(42))
    return sample_cov_spectrum(X)


def write_counts_csv(path, counts, header=None, rownames=None, delimiter=","):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        if header is not None:
            writer.writerow(header)
        for i, row in enumerate(counts):
            out = list(row)
            if rownames is not None:
                out = [rownames[i]] + out
            writer.writerow(out)
    return path


@pytest.fixture
def counts_file(tmp_path):
    """Small Poisson count matrix on disk (40 positions x 25 samples)."""
    rng = np.random.default_rng(7)
    counts = rng.poisson(5.0, size=(40, 25))
    return write_counts_csv(tmp_path / "gene.csv", counts)
