import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--full-tier", action="store_true", default=False,
        help="also run the minutes-scale wavepacket-oracle tests")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "full: slow full-tier checks (wavepacket oracle)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full-tier"):
        return
    skip = pytest.mark.skip(reason="full tier only (pass --full-tier)")
    for item in items:
        if "full" in item.keywords:
            item.add_marker(skip)
