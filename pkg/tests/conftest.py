#!/usr/bin/env python3
"""
Pytest configuration for reduct-atlas tests.
"""

import sys
from pathlib import Path

import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


def pytest_addoption(parser):
    """Add custom pytest command line options."""
    parser.addoption(
        "--display-results",
        action="store_true",
        default=False,
        help="Print the JSON reports the commands produce"
    )
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run the minute-scale checks (p=3, n=2 enumeration, brute-force Aut(R))"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: minute-scale check, needs --run-slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def display_results(request):
    """Fixture to check if results should be displayed."""
    return request.config.getoption("--display-results")
