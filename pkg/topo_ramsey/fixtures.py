"""Registry of builtin tuple functions."""

from collections.abc import Callable
from dataclasses import dataclass, replace
import re
from typing import Final

from .convergence import TupleFunction
from .dyadic import ONE, ZERO, Dyadic, pow2neg
from .errors import ConfigError, UnknownFixture
from .spaces import FiniteDiscrete, OmegaPlusOne, Point, Product, Space, UnitCube

_LIFT_RE: Final[re.Pattern[str]] = re.compile(r"^lift-of\((.+)\)$")
_G_RE: Final[re.Pattern[str]] = re.compile(r"^G\((\d+)\)$")
_CONST_RE: Final[re.Pattern[str]] = re.compile(r"^const\((.+)\)$")


@dataclass(frozen=True, kw_only=True)
class Fixture:
    """Describes a builtin function of sorted tuples."""

    key: str
    arity: int
    target: Space
    value_fn: Callable[[tuple[int, ...]], Point]
    variadic: bool = False
    description: str = ""

    def function(self, arity: int | None = None) -> TupleFunction:
        """Return the fixture as a tuple function of the given arity."""
        if arity is not None and arity != self.arity:
            if not self.variadic or arity < self.arity:
                raise ConfigError(f"fixture {self.key} takes arity {self.arity}, not {arity}")
        target: Final[Space] = self.target
        value_fn: Final = self.value_fn
        return TupleFunction(
            arity=arity or self.arity,
            target=target,
            rule=lambda s: target.coerce(value_fn(s)),
            name=self.key,
        )


FIXTURE_TYPES: Final[list[Fixture]] = [
    Fixture(
        key="mad-pair",
        arity=2,
        target=Product((OmegaPlusOne(), OmegaPlusOne())),
        value_fn=lambda s: (s[0], s[1]),
        description="{k,l} -> (k,l) in the square of omega+1",
    ),
    Fixture(
        key="min-decay",
        arity=2,
        target=UnitCube(1),
        value_fn=lambda s: (pow2neg(s[0] + 1),),
        variadic=True,
        description="s -> 2^-(min s + 1)",
    ),
    Fixture(
        key="sum-decay",
        arity=2,
        target=UnitCube(1),
        value_fn=lambda s: (pow2neg(s[0] + 1) + pow2neg(s[1] + 1),),
        description="{k,l} -> 2^-(k+1) + 2^-(l+1)",
    ),
    Fixture(
        key="min-parity",
        arity=2,
        target=FiniteDiscrete(2),
        value_fn=lambda s: s[0] % 2,
        variadic=True,
        description="s -> min s mod 2",
    ),
    Fixture(
        key="pair-decay",
        arity=2,
        target=UnitCube(2),
        value_fn=lambda s: (pow2neg(s[0] + 1), pow2neg(s[-1] + 1)),
        variadic=True,
        description="s -> (2^-(min s + 1), 2^-(max s + 1))",
    ),
    Fixture(
        key="tower",
        arity=2,
        target=Product.power(OmegaPlusOne()),
        value_fn=tuple,
        variadic=True,
        description="s -> its increasing enumeration in a countable power of omega+1",
    ),
]

_REGISTRY: Final[dict[str, Fixture]] = {fixture.key: fixture for fixture in FIXTURE_TYPES}


def builtin(name: str) -> Fixture:
    """Return the fixture registered under name, building parameterized ones."""
    name = name.strip()
    if name in _REGISTRY:
        return _REGISTRY[name]
    if found := _LIFT_RE.match(name):
        inner: Fixture = builtin(found.group(1))
        inner_fn: Final = inner.value_fn
        return replace(
            inner,
            key=name,
            arity=inner.arity + 1,
            value_fn=lambda s: inner_fn(s[:-1]),
            description=f"s -> {inner.key}(s without its maximum)",
        )
    if found := _G_RE.match(name):
        r: int = int(found.group(1))
        if r < 1:
            raise UnknownFixture(f"G needs r >= 1, got {name!r}")
        return Fixture(
            key=name,
            arity=r + 1,
            target=Product((OmegaPlusOne(),) * (r + 1)),
            value_fn=tuple,
            description="increasing enumeration of an (r+1)-set",
        )
    if found := _CONST_RE.match(name):
        try:
            p: Dyadic = Dyadic.parse(found.group(1))
        except ValueError as err:
            raise UnknownFixture(f"{name!r}: {err}") from err
        if not ZERO <= p <= ONE:
            raise UnknownFixture(f"{name!r}: constant outside [0,1]")
        return Fixture(
            key=name,
            arity=1,
            target=UnitCube(1),
            value_fn=lambda _s: (p,),
            variadic=True,
            description=f"constant {p}",
        )
    raise UnknownFixture(f"no fixture named {name!r}")
