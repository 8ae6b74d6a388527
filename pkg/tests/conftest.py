import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

from anticanonical import scenarios  # noqa: E402
from anticanonical.pairs import interior_blowup  # noqa: E402


@pytest.fixture(scope="session")
def ex42():
    return scenarios.build("ex42")


@pytest.fixture(scope="session")
def ex43():
    return scenarios.build("ex43")


@pytest.fixture(scope="session")
def ten_points():
    return scenarios.points_on_cubic(10)


@pytest.fixture(scope="session")
def eight_points():
    return scenarios.points_on_cubic(8)


@pytest.fixture(scope="session")
def minus_two_cycle():
    """Nine -2 curves in a cycle on nine blowups (an elliptic-fibration type cycle)."""
    return interior_blowup(scenarios.infinitely_near_cubic(8), 8)[0]


@pytest.fixture(scope="session")
def family63():
    return scenarios.build("family_kN", {"k": 6, "N": 3})
