"""Shared helpers for the test suite."""

import numpy as np

from lplorentz.norms import MeasuredValues


def random_step_values(rng, max_len: int = 40, sigma: float = 1.5) -> MeasuredValues:
    """Random nonnegative step profile: lognormal values, uniform masses."""
    k = int(rng.integers(1, max_len))
    return MeasuredValues(rng.lognormal(0.0, sigma, k), rng.uniform(0.05, 3.0, k))
