import numpy as np
import pytest

from src.errors import DomainError
from src.oracle.rates import fit_rate


def test_exact_power_law():
    ns = np.array([100, 400, 1600, 6400])
    assert fit_rate(ns, 3.0 * ns ** -0.8) == pytest.approx(-0.8, rel=1e-12)


def test_noisy_power_law():
    ns = np.geomspace(100, 1e5, 8)
    noise = np.exp(np.random.default_rng(42).normal(0.0, 0.01, ns.size))
    assert fit_rate(ns, 0.5 * ns ** -0.8 * noise) == pytest.approx(-0.8, abs=0.05)


@pytest.mark.parametrize("xs, ys", [
    ([1.0, 2.0], [1.0, 0.5]),
    ([1.0, 2.0, 3.0], [1.0, 0.5]),
    ([1.0, 2.0, 0.0], [1.0, 0.5, 0.2]),
    ([1.0, 2.0, 3.0], [1.0, -0.5, 0.2]),
    ([2.0, 2.0, 2.0], [1.0, 0.5, 0.2]),
])
def test_degenerate_input(xs, ys):
    with pytest.raises(DomainError):
        fit_rate(xs, ys)
