import random

import pytest

from rlsheaf import fixtures as fx


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def A4():
    return fx.a4()


@pytest.fixture
def A6():
    return fx.a6()


@pytest.fixture
def A8():
    return fx.a8()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SUMMARY

    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY:
            terminalreporter.write_line(line)
