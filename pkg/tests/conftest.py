"""Shared test configuration."""

import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    """Deterministic plain RNG for tests that only need reproducibility."""
    return random.Random(0xDF11)
