"""Lazy strictly increasing streams of naturals and the fuel discipline."""

from bisect import bisect_left, bisect_right
from collections.abc import Callable, Hashable, Iterable, Iterator
from dataclasses import dataclass
from itertools import count
import re
from typing import Final

from .const import (
    DEFAULT_MAX_MATERIALIZE,
    DEFAULT_MAX_ORACLE_CALLS,
    DEFAULT_WINDOW,
    LOGGER,
)
from .errors import ChainViolation, FuelExhausted, RamseyError, StreamExhausted

_ARITH_RE: Final[re.Pattern[str]] = re.compile(r"^arith:(\d+):(\d+)$")
_ABOVE_RE: Final[re.Pattern[str]] = re.compile(r"^above:(\d+)$")


@dataclass(frozen=True, kw_only=True)
class Fuel:
    """Budget turning infinite constructions into finite runs."""

    max_materialize: int = DEFAULT_MAX_MATERIALIZE
    max_oracle_calls: int = DEFAULT_MAX_ORACLE_CALLS
    window: int = DEFAULT_WINDOW

    def __post_init__(self) -> None:
        """Check that all budgets are positive."""
        for name in ("max_materialize", "max_oracle_calls", "window"):
            if getattr(self, name) < 1:
                raise ValueError(f"fuel {name} must be positive")

    def as_dict(self) -> dict[str, int]:
        """Return the budget for reports."""
        return {
            "max_materialize": self.max_materialize,
            "max_oracle_calls": self.max_oracle_calls,
            "window": self.window,
        }


class NatStream:
    """Strictly increasing, lazily materialized sequence of naturals."""

    def __init__(
        self,
        factory: Callable[[], Iterator[int]],
        *,
        fuel: Fuel,
        name: str = "stream",
    ) -> None:
        """Initialize from a generator factory; nothing is produced yet."""
        self._factory: Final[Callable[[], Iterator[int]]] = factory
        self.fuel: Final[Fuel] = fuel
        self.name: Final[str] = name
        self._iterator: Iterator[int] | None = None
        self._prefix: list[int] = []
        self._failure: RamseyError | None = None
        self.fuel_spent: int = 0

    def __repr__(self) -> str:
        """Return the name and materialized size."""
        return f"NatStream({self.name!r}, materialized={len(self._prefix)})"

    @classmethod
    def naturals(cls, fuel: Fuel) -> "NatStream":
        """Return the stream 0, 1, 2, ..."""
        return cls(count, fuel=fuel, name="naturals")

    @classmethod
    def arithmetic(cls, start: int, step: int, fuel: Fuel) -> "NatStream":
        """Return start, start + step, ..."""
        if start < 0 or step < 1:
            raise ValueError("arithmetic stream needs start >= 0 and step >= 1")
        return cls(lambda: count(start, step), fuel=fuel, name=f"arith:{start}:{step}")

    @classmethod
    def of(cls, values: Iterable[int], fuel: Fuel, name: str = "finite") -> "NatStream":
        """Return the finite stream of the given strictly increasing values."""
        frozen: tuple[int, ...] = tuple(values)
        if any(a >= b for a, b in zip(frozen, frozen[1:], strict=False)) or (
            frozen and frozen[0] < 0
        ):
            raise ValueError("finite stream values must be strictly increasing naturals")
        return cls(lambda: iter(frozen), fuel=fuel, name=name)

    @property
    def materialized(self) -> tuple[int, ...]:
        """Elements produced so far."""
        return tuple(self._prefix)

    def rerun(self) -> "NatStream":
        """Return a fresh stream running the same generator from scratch."""
        return NatStream(self._factory, fuel=self.fuel, name=self.name)

    def _pull(self, fuel: Fuel) -> None:
        if self._failure is not None:
            raise self._failure
        if self.fuel_spent >= fuel.max_materialize:
            raise FuelExhausted(
                f"{self.name}: materialization budget of {fuel.max_materialize} spent",
                prefix=tuple(self._prefix),
            )
        if self._iterator is None:
            self._iterator = self._factory()
        self.fuel_spent += 1
        try:
            value: int = next(self._iterator)
        except StopIteration:
            self._failure = StreamExhausted(
                f"{self.name}: finite stream ended after {len(self._prefix)} elements",
                prefix=tuple(self._prefix),
            )
            raise self._failure from None
        except RamseyError as err:
            self._failure = err
            raise
        if self._prefix and value <= self._prefix[-1]:
            raise RamseyError(f"{self.name}: generator is not strictly increasing")
        self._prefix.append(value)

    def _extend_to(self, m: int, fuel: Fuel | None) -> None:
        while len(self._prefix) < m:
            self._pull(fuel or self.fuel)

    def materialize(self, m: int, fuel: Fuel | None = None) -> list[int]:
        """Return the first m elements, producing them if needed."""
        if m < 0:
            raise ValueError("cannot materialize a negative count")
        self._extend_to(m, fuel)
        return self._prefix[:m]

    def element(self, i: int) -> int:
        """Return the element at position i."""
        self._extend_to(i + 1, None)
        return self._prefix[i]

    def iterate(self, start: int = 0) -> Iterator[int]:
        """Yield elements from position start on."""
        for i in count(start):
            yield self.element(i)

    def index_above(self, x: int) -> int:
        """Return the position of the least element greater than x."""
        try:
            while not self._prefix or self._prefix[-1] <= x:
                self._extend_to(len(self._prefix) + 1, None)
        except StreamExhausted:
            pass
        return bisect_right(self._prefix, x)

    def contains(self, x: int) -> bool:
        """Return whether x is an element, materializing up to x."""
        try:
            while not self._prefix or self._prefix[-1] < x:
                self._extend_to(len(self._prefix) + 1, None)
        except StreamExhausted:
            pass
        pos: int = bisect_left(self._prefix, x)
        return pos < len(self._prefix) and self._prefix[pos] == x

    def after(self, x: int, name: str | None = None) -> "NatStream":
        """Return the substream of elements greater than x."""

        def _gen() -> Iterator[int]:
            yield from self.iterate(self.index_above(x))

        return NatStream(_gen, fuel=self.fuel, name=name or f"{self.name}>{x}")

    def skip(self, k: int) -> "NatStream":
        """Return the substream from position k on."""
        return NatStream(lambda: self.iterate(k), fuel=self.fuel, name=f"{self.name}[{k}:]")

    def filter(self, pred: Callable[[int], bool], name: str | None = None) -> "NatStream":
        """Return the substream of elements satisfying pred."""

        def _gen() -> Iterator[int]:
            return (value for value in self.iterate() if pred(value))

        return NatStream(_gen, fuel=self.fuel, name=name or f"{self.name}|filter")


def materialize(s: NatStream, m: int, fuel: Fuel | None = None) -> list[int]:
    """Return the first m elements of s."""
    return s.materialize(m, fuel)


class MemoChain(Iterable[NatStream]):
    """Re-iterable lazy chain of streams, each link computed once."""

    def __init__(self, links: Iterator[NatStream]) -> None:
        """Initialize from a (possibly infinite) iterator of links."""
        self._links: Final[Iterator[NatStream]] = links
        self._cache: list[NatStream] = []
        self._ended: bool = False

    def __iter__(self) -> Iterator[NatStream]:
        """Yield cached links, then compute further ones."""
        for i in count():
            if i == len(self._cache):
                if self._ended:
                    return
                try:
                    self._cache.append(next(self._links))
                except StopIteration:
                    self._ended = True
                    return
            yield self._cache[i]

    def __getitem__(self, i: int) -> NatStream:
        """Return link i, computing the chain up to it."""
        for k, link in enumerate(self):
            if k == i:
                return link
        raise IndexError(f"chain has fewer than {i + 1} links")


def pseudo_intersection(
    chain: Iterable[NatStream], fuel: Fuel, name: str = "pseudo-intersection"
) -> NatStream:
    """Return the greedy diagonal B of a decreasing chain A_0, A_1, ...

    b_n is the least element of A_n above b_{n-1}; after the chain ends its last
    link repeats. Each chosen element is checked for membership in the previous
    link. The chain must be re-iterable for rerun() to reproduce the stream.
    """

    def _gen() -> Iterator[int]:
        links: Iterator[NatStream] = iter(chain)
        if (current := next(links, None)) is None:
            raise ChainViolation("pseudo-intersection of an empty chain")
        previous: NatStream | None = None
        last: int = -1
        for n in count():
            value: int = current.element(current.index_above(last))
            if previous is not None and not previous.contains(value):
                raise ChainViolation(
                    f"{value} in link {n} ({current.name}) is missing from link {n - 1} ({previous.name})"
                )
            yield value
            last = value
            previous, current = current, next(links, current)

    return NatStream(_gen, fuel=fuel, name=name)


def parse_base(descriptor: str, fuel: Fuel) -> NatStream:
    """Return the base stream for a CLI descriptor."""
    match descriptor.strip():
        case "naturals" | "nat":
            return NatStream.naturals(fuel)
        case "evens":
            return NatStream.arithmetic(0, 2, fuel)
        case "odds":
            return NatStream.arithmetic(1, 2, fuel)
        case text if found := _ARITH_RE.match(text):
            return NatStream.arithmetic(int(found.group(1)), int(found.group(2)), fuel)
        case text if found := _ABOVE_RE.match(text):
            return NatStream.arithmetic(int(found.group(1)) + 1, 1, fuel)
    raise ValueError(f"unknown base stream {descriptor!r}")


class Oracle[K: Hashable, V]:
    """Memoizing evaluator counting distinct calls against the fuel budget."""

    def __init__(self, rule: Callable[[K], V], fuel: Fuel, name: str = "oracle") -> None:
        """Initialize around a deterministic rule."""
        self._rule: Final[Callable[[K], V]] = rule
        self._fuel: Final[Fuel] = fuel
        self._cache: dict[K, V] = {}
        self.name: Final[str] = name

    @property
    def calls(self) -> int:
        """Number of distinct evaluations."""
        return len(self._cache)

    def __call__(self, key: K) -> V:
        """Return the memoized value of rule(key)."""
        try:
            return self._cache[key]
        except KeyError:
            pass
        if len(self._cache) >= self._fuel.max_oracle_calls:
            LOGGER.debug("%s: oracle budget spent", self.name)
            raise FuelExhausted(
                f"{self.name}: oracle budget of {self._fuel.max_oracle_calls} calls spent"
            )
        value: V = self._rule(key)
        self._cache[key] = value
        return value

