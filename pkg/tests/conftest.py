import pytest

from besmodal.base import build_universe
from besmodal.lemmas import small_universe, tiny_universe

from .oracle import Oracle


@pytest.fixture(scope="session")
def tiny():
    return tiny_universe()


@pytest.fixture(scope="session")
def small():
    return small_universe()


@pytest.fixture(scope="session")
def tiny_oracle(tiny):
    return Oracle(tiny)


@pytest.fixture(scope="session")
def small_oracle(small):
    return Oracle(small)


@pytest.fixture(scope="session")
def pqr1():
    return build_universe(["p", "q", "r"], 1)
