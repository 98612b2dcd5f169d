"""
conftest.py

Pytest fixtures.
"""
import pytest


def pytest_addoption(parser):
    parser.addoption("--samples", type=int, default=20,
                     help="sampling budget of the randomized identity tests")


@pytest.fixture(scope="session")
def samples(request):
    return request.config.getoption("--samples")


@pytest.fixture(scope="session")
def template():
    from hyptile.core.tiling import build_template
    return build_template(8)


@pytest.fixture(scope="session")
def atlas2(template):
    from hyptile.core.tiling import enumerate_tiling
    return enumerate_tiling(template, 2)


@pytest.fixture(scope="session")
def atlas3(template):
    from hyptile.core.tiling import enumerate_tiling
    return enumerate_tiling(template, 3)


@pytest.fixture(scope="session")
def atlas4(template):
    from hyptile.core.tiling import enumerate_tiling
    return enumerate_tiling(template, 4)
