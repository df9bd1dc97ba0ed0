import pytest

from reformlab import Params, fixture_path


@pytest.fixture(scope="session")
def sanity() -> Params:
    return Params.load(fixture_path("sanity"))


@pytest.fixture(scope="session")
def part3() -> Params:
    return Params.load(fixture_path("part3"))
