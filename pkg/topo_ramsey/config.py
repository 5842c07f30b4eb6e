"""Run configuration merged from a JSON file and command-line flags."""

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
import json
from pathlib import Path
from typing import Any, Final

import voluptuous as vol

from .const import (
    DEFAULT_LENGTH,
    DEFAULT_LEVELS,
    DEFAULT_MAX_MATERIALIZE,
    DEFAULT_MAX_ORACLE_CALLS,
    DEFAULT_WINDOW,
    ENGINES,
    LOGGER,
)
from .convergence import TupleFunction
from .dsl import parse, parse_space
from .errors import ConfigError, RamseyError
from .fixtures import builtin
from .spaces import Space
from .streams import Fuel, NatStream, parse_base

CONF_FIXTURE: Final = "fixture"
CONF_DSL: Final = "dsl"
_FUEL_KEYS: Final[tuple[str, ...]] = ("max_materialize", "max_oracle_calls", "window")


def _checked(parser: Callable[[str], object]) -> Callable[[Any], str]:
    def _validate(value: Any) -> str:
        if not isinstance(value, str):
            raise vol.Invalid(f"expected a descriptor string, got {value!r}")
        try:
            parser(value)
        except (RamseyError, ValueError) as err:
            raise vol.Invalid(str(err)) from err
        return value

    return _validate


_POSITIVE: Final = vol.All(int, vol.Range(min=1))

RUN_SCHEMA: Final[vol.Schema] = vol.Schema(
    {
        vol.Required("command"): str,
        vol.Exclusive(CONF_FIXTURE, "function"): vol.Any(None, str),
        vol.Exclusive(CONF_DSL, "function"): vol.Any(None, str),
        vol.Optional("arity"): vol.Any(None, _POSITIVE),
        vol.Optional("space"): vol.Any(None, _checked(parse_space)),
        vol.Optional("base", default="naturals"): _checked(lambda s: parse_base(s, Fuel())),
        vol.Optional("levels", default=DEFAULT_LEVELS): _POSITIVE,
        vol.Optional("length", default=DEFAULT_LENGTH): _POSITIVE,
        vol.Optional("engine", default="cover"): vol.In(ENGINES),
        vol.Optional("max_materialize", default=DEFAULT_MAX_MATERIALIZE): _POSITIVE,
        vol.Optional("max_oracle_calls", default=DEFAULT_MAX_ORACLE_CALLS): _POSITIVE,
        vol.Optional("window", default=DEFAULT_WINDOW): _POSITIVE,
        vol.Optional("seed"): vol.Any(None, int),
        vol.Optional("output"): vol.Any(None, str),
    }
)


@dataclass(frozen=True, kw_only=True)
class RunConfig:
    """Validated settings of one command."""

    command: str
    fixture: str | None = None
    dsl: str | None = None
    arity: int | None = None
    space: str | None = None
    base: str = "naturals"
    levels: int = DEFAULT_LEVELS
    length: int = DEFAULT_LENGTH
    engine: str = "cover"
    fuel: Fuel = field(default_factory=Fuel)
    seed: int | None = None
    output: str | None = None

    @property
    def source(self) -> str | None:
        """Fixture name or expression text, whichever is set."""
        return self.fixture or self.dsl

    def target(self) -> Space | None:
        """Return the parsed space descriptor, if one was given."""
        return parse_space(self.space) if self.space else None

    def base_stream(self) -> NatStream:
        """Return the base stream."""
        try:
            return parse_base(self.base, self.fuel)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def function(self) -> TupleFunction:
        """Return the tuple function named by the fixture or expression."""
        return resolve_function(self.fixture, self.dsl, self.arity, self.target())


def resolve_function(
    fixture: str | None, dsl: str | None, arity: int | None, target: Space | None
) -> TupleFunction:
    """Build a tuple function from a fixture name or an expression."""
    if fixture is not None:
        f: TupleFunction = builtin(fixture).function(arity)
        if target is not None and target != f.target:
            raise ConfigError(
                f"fixture {fixture} maps into {f.target.descriptor}, not {target.descriptor}"
            )
        return f
    if dsl is not None:
        if arity is None or target is None:
            raise ConfigError("an expression needs --arity and --space")
        return parse(dsl, arity, target).as_function()
    raise ConfigError("one of --fixture and --dsl is required")


def load_config(flags: Mapping[str, Any], path: str | None = None) -> RunConfig:
    """Merge flags over the JSON file at path and validate the result."""
    merged: dict[str, Any] = {}
    if path is not None:
        try:
            loaded: Any = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        merged.update(loaded)
    known: set[str] = {str(key) for key in RUN_SCHEMA.schema}
    merged.update(
        {key: value for key, value in flags.items() if key in known and value is not None}
    )
    try:
        valid: dict[str, Any] = RUN_SCHEMA(merged)
    except vol.Invalid as err:
        raise ConfigError(f"invalid configuration: {err}") from err
    LOGGER.debug("configuration: %s", valid)
    fuel: Fuel = Fuel(**{key: valid.pop(key) for key in _FUEL_KEYS})
    return RunConfig(fuel=fuel, **valid)
