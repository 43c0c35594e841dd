import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "nestgeom",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("nestgeom")


def pytest_addoption(parser):
    parser.addoption("--run-slow-search", action="store_true", default=False,
                     help="run the slow deep-search tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow-search"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow-search")
    for item in items:
        if "slow_search" in item.keywords:
            item.add_marker(skip)
