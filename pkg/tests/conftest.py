import pytest

from pcalab.k1 import K1Model
from pcalab.kernel import stdlib
from pcalab.reductions import REFUTE_FUEL


@pytest.fixture(scope="session")
def lib():
    """The K1 standard library, shared: building it costs a few hundred ms."""
    out = stdlib(K1Model(), fuel=REFUTE_FUEL)
    out.numeral(5)
    return out
