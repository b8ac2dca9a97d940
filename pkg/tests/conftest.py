import pytest

from keller.groebner import BasisCache


@pytest.fixture(scope="session")
def gb_cache(tmp_path_factory):
    """One Groebner cache per test session so the degree-3 basis is built once."""
    return BasisCache(tmp_path_factory.mktemp("gb-cache"))
