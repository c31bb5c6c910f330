import pytest

from mopasym.core.precision import PrecisionContext


@pytest.fixture
def ctx() -> PrecisionContext:
    return PrecisionContext(digits=50, guard=10)


@pytest.fixture
def low_ctx() -> PrecisionContext:
    """Cheaper context for the convergence runs."""
    return PrecisionContext(digits=30, guard=8)
