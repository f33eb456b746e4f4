import pytest

from ctlab.ball import build_or_load
from ctlab.electric import CurveClass, ElectricSpace

CACHE = ".cache"


@pytest.fixture(scope="session")
def ball4():
    return build_or_load(4, 2, cache_dir=CACHE)


@pytest.fixture(scope="session")
def ball5():
    return build_or_load(5, 2, cache_dir=CACHE)


@pytest.fixture(scope="session")
def ball6():
    return build_or_load(6, 2, cache_dir=CACHE)


@pytest.fixture(scope="session")
def es5a(ball5):
    return ElectricSpace(ball5, CurveClass("a"))


@pytest.fixture(scope="session")
def es6a(ball6):
    return ElectricSpace(ball6, CurveClass("a"))
