import pytest

from psicm.precision import extended


@pytest.fixture(scope="session")
def ext30():
    return extended(30)


@pytest.fixture(scope="session")
def ext40():
    return extended(40)
