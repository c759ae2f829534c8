import pytest

from novikov.catalog import load


@pytest.fixture(scope="session")
def cat():
    return load()
