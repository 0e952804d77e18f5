import pytest

from nvrcg import manifolds


@pytest.fixture(autouse=True)
def _strict_tangent_checks():
    manifolds.set_strict_checks(True)
    yield
    manifolds.set_strict_checks(False)
