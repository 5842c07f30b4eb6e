"""Constants for the topological Ramsey extraction package."""

import logging
from typing import Final

LOGGER: Final[logging.Logger] = logging.getLogger(__package__)

# fuel defaults
DEFAULT_MAX_MATERIALIZE: Final[int] = 4096  # [elements per stream]
DEFAULT_MAX_ORACLE_CALLS: Final[int] = 2_000_000  # [distinct evaluations]
DEFAULT_WINDOW: Final[int] = 8  # [live run of 2 * window hits wins a pigeonhole]

# engine defaults
DEFAULT_LEVELS: Final[int] = 6
DEFAULT_LENGTH: Final[int] = 32  # [certified prefix elements]
DEFAULT_SECTION_LENGTH: Final[int] = 8
DEFAULT_PIN_LEVEL: Final[int] = 6
DEFAULT_SMALL_LENGTH: Final[int] = 20
DIAGONAL_DOUBLINGS: Final[int] = 4  # [thinned prefix regrowths before giving up]
RECURSION_LIMIT: Final[int] = 20_000  # [frames] raised by cli.main for nested streams

ENGINES: Final[tuple[str, ...]] = ("cover", "inductive", "nice", "product")

# exit codes (do not change)
EXIT_OK: Final[int] = 0
EXIT_USAGE: Final[int] = 1
EXIT_FUEL: Final[int] = 2
EXIT_VERIFY: Final[int] = 3
