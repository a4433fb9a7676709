"""
Pytest configuration and fixtures for the test suite.
"""
import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

# Ensure the project root is importable when running from anywhere
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from modules.space_interface import SpaceKind  # noqa: E402
from modules.space_registry import get_space  # noqa: E402

# Property suites are reproducible run to run
settings.register_profile(
    "machine-space",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "machine-space"))

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
GOLDEN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")
SCHEMA_PATH = os.path.join(PROJECT_ROOT, "schemas", "run_report.schema.json")


@pytest.fixture
def digits():
    return get_space(SpaceKind.CANTOR_DIGITS)


@pytest.fixture
def prefix():
    return get_space(SpaceKind.CANTOR_PREFIX)


@pytest.fixture
def unit_interval():
    return get_space(SpaceKind.UNIT_INTERVAL)


@pytest.fixture
def rng():
    """Seeded generator for randomized suites that are not hypothesis-driven"""
    return random.Random(20240611)

