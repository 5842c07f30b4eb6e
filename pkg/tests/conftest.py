"""Common fixtures for the topological Ramsey extraction tests."""

import logging
import sys

from hypothesis import HealthCheck, settings
import pytest

from topo_ramsey.const import RECURSION_LIMIT
from topo_ramsey.convergence import TupleFunction
from topo_ramsey.fixtures import builtin
from topo_ramsey.spaces import (
    CantorDepth,
    FiniteDiscrete,
    OmegaPlusOne,
    Product,
    Space,
    UnitCube,
)
from topo_ramsey.streams import Fuel, NatStream

LOGGER: logging.Logger = logging.getLogger(__name__)


def pytest_addoption(parser: pytest.Parser) -> None:
    """Add custom command-line option for max_examples."""
    parser.addoption(
        "--max-examples",
        action="store",
        type=int,
        default=100,
        help="Set the maximum number of examples for Hypothesis tests.",
    )


def pytest_configure(config: pytest.Config) -> None:
    """Register the Hypothesis profile and raise the recursion limit as the CLI does."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), RECURSION_LIMIT))
    settings.register_profile(
        "topo_ramsey",
        max_examples=config.getoption("--max-examples"),
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("topo_ramsey")


@pytest.fixture
def fuel() -> Fuel:
    """Return the default budget."""
    return Fuel()


@pytest.fixture
def small_fuel() -> Fuel:
    """Return a budget with a short pigeonhole window for randomized runs."""
    return Fuel(window=4)


@pytest.fixture
def naturals(fuel: Fuel) -> NatStream:
    """Return 0, 1, 2, ..."""
    return NatStream.naturals(fuel)


@pytest.fixture
def min_decay() -> TupleFunction:
    """Return {k,l} -> 2^-(k+1) in the unit interval."""
    return builtin("min-decay").function(2)


@pytest.fixture
def mad_pair() -> TupleFunction:
    """Return {k,l} -> (k,l) in the square of omega+1."""
    return builtin("mad-pair").function()


@pytest.fixture(
    params=[
        UnitCube(1),
        UnitCube(2),
        OmegaPlusOne(),
        CantorDepth(),
        FiniteDiscrete(3),
        Product((OmegaPlusOne(), UnitCube(1))),
        Product.power(OmegaPlusOne()),
    ],
    ids=lambda space: space.descriptor,
)
def space_fixture(request: pytest.FixtureRequest) -> Space:
    """Return every kind of builtin space."""
    return request.param


@pytest.fixture(params=[1, 2, 3])
def arity_fixture(request: pytest.FixtureRequest) -> int:
    """Return the arities exercised by randomized extraction tests."""
    return request.param


@pytest.fixture
def omega_square() -> Product:
    """Return (omega+1)^2 with its limit point."""
    return Product((OmegaPlusOne(), OmegaPlusOne()))
