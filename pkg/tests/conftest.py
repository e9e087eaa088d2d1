import pytest

from tangentcat import polycat
from tangentcat.categories import NBulletCategory, PolyCategory, WeilSelfCategory


@pytest.fixture(scope="session")
def ncat():
    return NBulletCategory()


@pytest.fixture(scope="session")
def qcat():
    return PolyCategory(polycat.Domain.rational())


@pytest.fixture(scope="session")
def z2cat():
    return PolyCategory(polycat.Domain.zp(2))


@pytest.fixture(scope="session")
def z5cat():
    return PolyCategory(polycat.Domain.zp(5))


@pytest.fixture(scope="session")
def wcat():
    return WeilSelfCategory()
