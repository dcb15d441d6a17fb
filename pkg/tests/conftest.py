import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--runlong", action="store_true", default=False,
        help="also run tests that take minutes rather than seconds")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "runlong: long-running test, needs --runlong to execute")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runlong"):
        return
    skip = pytest.mark.skip(reason="needs --runlong")
    for item in items:
        if "runlong" in item.keywords:
            item.add_marker(skip)
