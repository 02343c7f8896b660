import os

import pytest

from weylsums.campaigns import ProfileCache


def pytest_addoption(parser):
    parser.addoption("--run-heavy", action="store_true", default=False,
                     help="run the long flag-gated checks (large-N witnesses)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-heavy"):
        return
    skip = pytest.mark.skip(reason="needs --run-heavy")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def cache():
    """Session-wide profile cache shared by all experiment-level tests.

    Set WEYLSUMS_CACHE to a directory to persist profiles across runs
    (useful while iterating; profiles are deterministic).
    """
    return ProfileCache(os.environ.get("WEYLSUMS_CACHE"))
