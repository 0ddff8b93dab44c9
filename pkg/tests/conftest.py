import os

import hypothesis
import numpy as np
import pytest

from src.reference.lognormal import LogNormalRef, ln_sample

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

FIXTURE_SEED = 2024


@pytest.fixture(scope="session")
def reference() -> LogNormalRef:
    return LogNormalRef(1.0, 1.0)


@pytest.fixture(scope="session")
def lognormal_samples(reference):
    """300 seeded LN(1, 1) observations."""
    return ln_sample(reference, 300, FIXTURE_SEED)


def write_samples(path, values) -> None:
    path.write_text("".join(f"{v!r}\n" for v in np.asarray(values, dtype=float).tolist()))


@pytest.fixture
def samples_file(tmp_path, lognormal_samples):
    path = tmp_path / "lognormal_300.txt"
    write_samples(path, lognormal_samples.values)
    return path


@pytest.fixture
def single_sample_file(tmp_path):
    path = tmp_path / "single.txt"
    path.write_text("2.5\n")
    return path


@pytest.fixture
def malformed_file(tmp_path):
    path = tmp_path / "malformed.txt"
    path.write_text("1.5\n2.5\nnot-a-number\n")
    return path
