"""Built-in compact metric spaces with exact dyadic metrics and level covers."""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import count
from math import prod
from typing import Any, Final, overload

from .dyadic import ONE, ZERO, Dyadic, pow2neg
from .errors import NotCovered, SpaceMismatch


class Omega(Enum):
    """The point at infinity of omega + 1."""

    INF = "inf"

    def __repr__(self) -> str:
        """Return the wire name."""
        return "inf"


INF: Final[Omega] = Omega.INF


@dataclass(frozen=True, slots=True)
class CantorPoint:
    """Eventually constant 0/1 sequence: prefix followed by tail repeated."""

    prefix: tuple[int, ...] = ()
    tail: int = 0

    def __post_init__(self) -> None:
        """Validate bits and strip the prefix to canonical form."""
        if self.tail not in (0, 1) or any(bit not in (0, 1) for bit in self.prefix):
            raise SpaceMismatch(f"not a 0/1 sequence: {self.prefix!r}, tail {self.tail!r}")
        end: int = len(self.prefix)
        while end and self.prefix[end - 1] == self.tail:
            end -= 1
        object.__setattr__(self, "prefix", tuple(self.prefix[:end]))

    def bit(self, i: int) -> int:
        """Return the i-th bit."""
        return self.prefix[i] if i < len(self.prefix) else self.tail


type Point = Dyadic | int | Omega | CantorPoint | tuple[Point, ...]


def _is_nat(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


@dataclass(frozen=True, kw_only=True)
class CoverLevel:
    """Finite cover of a space by balls of radius 2**-level around centers."""

    space: "Space"
    level: int
    centers: Sequence[Point] = field(compare=False)
    canonical: bool = False

    @property
    def radius(self) -> Dyadic:
        """Radius of every ball."""
        return pow2neg(self.level)

    def __len__(self) -> int:
        """Return the number of centers."""
        return len(self.centers)


class Space(ABC):
    """Compact metric space of diameter at most 1 with dyadic-valued metric."""

    @property
    @abstractmethod
    def descriptor(self) -> str:
        """Return the CLI descriptor of the space."""

    @property
    @abstractmethod
    def base_point(self) -> Point:
        """Return the distinguished point used to pad truncated coordinates."""

    @abstractmethod
    def contains(self, p: object) -> bool:
        """Return whether p is a point of the space."""

    @abstractmethod
    def coerce(self, value: Any) -> Point:
        """Turn a raw value (e.g. a DSL result) into a point or raise SpaceMismatch."""

    @abstractmethod
    def _distance(self, p: Any, q: Any) -> Dyadic: ...

    @abstractmethod
    def centers(self, n: int) -> Sequence[Point]:
        """Return the centers of the level-n cover in canonical order."""

    @abstractmethod
    def first_match(self, p: Any, n: int) -> int:
        """Return the index of the first level-n center whose ball contains p."""

    def center_count(self, n: int) -> int:
        """Return the number of level-n centers."""
        return len(self.centers(n))

    def check(self, p: object) -> None:
        """Raise SpaceMismatch unless p belongs to the space."""
        if not self.contains(p):
            raise SpaceMismatch(f"{p!r} is not a point of {self.descriptor}")

    def distance(self, p: Point, q: Point) -> Dyadic:
        """Return the exact distance of two points."""
        self.check(p)
        self.check(q)
        return self._distance(p, q)

    def cover(self, n: int) -> CoverLevel:
        """Return the canonical level-n cover."""
        if n < 0:
            raise ValueError("cover level must be nonnegative")
        return CoverLevel(space=self, level=n, centers=self.centers(n), canonical=True)

    def __str__(self) -> str:
        """Return the descriptor."""
        return self.descriptor


class _GridCenters(Sequence[Point]):
    """Dyadic grid of spacing 2**-n in [0,1]^d, lexicographic order."""

    def __init__(self, dimension: int, level: int) -> None:
        self._dim: Final[int] = dimension
        self._level: Final[int] = level
        self._side: Final[int] = (1 << level) + 1

    def __len__(self) -> int:
        return self._side**self._dim

    @overload
    def __getitem__(self, index: int) -> Point: ...
    @overload
    def __getitem__(self, index: slice) -> Sequence[Point]: ...
    def __getitem__(self, index: int | slice) -> Point | Sequence[Point]:
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if not -len(self) <= index < len(self):
            raise IndexError(index)
        index %= len(self)
        digits: list[Dyadic] = []
        for _ in range(self._dim):
            index, digit = divmod(index, self._side)
            digits.append(Dyadic(digit, self._level))
        return tuple(reversed(digits))


@dataclass(frozen=True)
class UnitCube(Space):
    """[0,1]^d with the max metric."""

    dimension: int = 1

    def __post_init__(self) -> None:
        """Check the dimension."""
        if self.dimension < 1:
            raise ValueError("unit cube dimension must be positive")

    @property
    def descriptor(self) -> str:
        """Return 'unit-cube:d'."""
        return f"unit-cube:{self.dimension}"

    @property
    def base_point(self) -> Point:
        """Return the origin."""
        return (ZERO,) * self.dimension

    def contains(self, p: object) -> bool:
        """Return whether p is a d-tuple of dyadics in [0,1]."""
        return (
            isinstance(p, tuple)
            and len(p) == self.dimension
            and all(isinstance(x, Dyadic) and ZERO <= x <= ONE for x in p)
        )

    def coerce(self, value: Any) -> Point:
        """Accept a scalar for d=1, otherwise a d-tuple of integers or dyadics."""
        raw: tuple[Any, ...] = (
            value if isinstance(value, tuple) else (value,)
        )
        try:
            point: tuple[Dyadic, ...] = tuple(Dyadic.coerce(x) for x in raw)
        except TypeError as err:
            raise SpaceMismatch(f"{value!r} is not a point of {self.descriptor}") from err
        self.check(point)
        return point

    def _distance(self, p: Any, q: Any) -> Dyadic:
        return max(abs(x - y) for x, y in zip(p, q, strict=True))

    def centers(self, n: int) -> Sequence[Point]:
        """Return the grid of spacing 2**-n."""
        return _GridCenters(self.dimension, n)

    def center_count(self, n: int) -> int:
        """Return (2**n + 1)**d."""
        return ((1 << n) + 1) ** self.dimension

    def first_match(self, p: Any, n: int) -> int:
        """Return the rank of the per-coordinate least grid point within 2**-n."""
        side: int = (1 << n) + 1
        rank: int = 0
        for x in p:
            rank = rank * side + max(0, x.ceil_scaled(n) - 1)
        return rank


@dataclass(frozen=True)
class OmegaPlusOne(Space):
    """omega + 1 with d(m, n) = |2**-m - 2**-n| and d(m, inf) = 2**-m."""

    @property
    def descriptor(self) -> str:
        """Return 'omega1'."""
        return "omega1"

    @property
    def base_point(self) -> Point:
        """Return infinity."""
        return INF

    def contains(self, p: object) -> bool:
        """Return whether p is a natural or infinity."""
        return p is INF or _is_nat(p)

    def coerce(self, value: Any) -> Point:
        """Accept naturals and infinity."""
        if isinstance(value, Dyadic) and value.exponent == 0:
            value = value.numerator
        self.check(value)
        return value  # type: ignore[no-any-return]

    @staticmethod
    def _weight(p: Any) -> Dyadic:
        return ZERO if p is INF else pow2neg(p)

    def _distance(self, p: Any, q: Any) -> Dyadic:
        return abs(self._weight(p) - self._weight(q))

    def centers(self, n: int) -> Sequence[Point]:
        """Return 0, ..., n-1 and infinity."""
        return [*range(n), INF]

    def center_count(self, n: int) -> int:
        """Return n + 1."""
        return n + 1

    def first_match(self, p: Any, n: int) -> int:
        """Return m for m < n, n - 1 for m = n, else the index of infinity."""
        if n == 0 or p is INF or p > n:
            return n
        return p if p < n else n - 1  # type: ignore[no-any-return]


class _CantorCenters(Sequence[Point]):
    """All 0/1 words of length n padded with zeros, lexicographic order."""

    def __init__(self, level: int) -> None:
        self._level: Final[int] = level

    def __len__(self) -> int:
        return 1 << self._level

    @overload
    def __getitem__(self, index: int) -> Point: ...
    @overload
    def __getitem__(self, index: slice) -> Sequence[Point]: ...
    def __getitem__(self, index: int | slice) -> Point | Sequence[Point]:
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if not -len(self) <= index < len(self):
            raise IndexError(index)
        index %= len(self)
        return CantorPoint(
            tuple((index >> (self._level - 1 - i)) & 1 for i in range(self._level))
        )


@dataclass(frozen=True)
class CantorDepth(Space):
    """0/1 sequences with d(x, y) = 2**-(first index where they differ)."""

    @property
    def descriptor(self) -> str:
        """Return 'cantor'."""
        return "cantor"

    @property
    def base_point(self) -> Point:
        """Return the all-zero sequence."""
        return CantorPoint()

    def contains(self, p: object) -> bool:
        """Return whether p is a CantorPoint."""
        return isinstance(p, CantorPoint)

    def coerce(self, value: Any) -> Point:
        """Accept CantorPoints, 0/1 tuples (zero tail) and single bits."""
        if isinstance(value, CantorPoint):
            return value
        bits: tuple[Any, ...] = value if isinstance(value, tuple) else (value,)
        if not all(isinstance(bit, int) for bit in bits):
            raise SpaceMismatch(f"{value!r} is not a point of {self.descriptor}")
        return CantorPoint(bits)

    def _distance(self, p: Any, q: Any) -> Dyadic:
        for i in count():
            if p.bit(i) != q.bit(i):
                return pow2neg(i)
            if i >= max(len(p.prefix), len(q.prefix)):
                return ZERO
        raise AssertionError  # pragma: no cover

    def centers(self, n: int) -> Sequence[Point]:
        """Return all words of length n."""
        return _CantorCenters(n)

    def center_count(self, n: int) -> int:
        """Return 2**n."""
        return 1 << n

    def first_match(self, p: Any, n: int) -> int:
        """Return the word formed by the first n bits."""
        rank: int = 0
        for i in range(n):
            rank = (rank << 1) | p.bit(i)
        return rank


@dataclass(frozen=True)
class FiniteDiscrete(Space):
    """{0, ..., k-1} with the discrete metric."""

    size: int = 2

    def __post_init__(self) -> None:
        """Check the size."""
        if self.size < 1:
            raise ValueError("discrete space needs at least one point")

    @property
    def descriptor(self) -> str:
        """Return 'discrete:k'."""
        return f"discrete:{self.size}"

    @property
    def base_point(self) -> Point:
        """Return 0."""
        return 0

    def contains(self, p: object) -> bool:
        """Return whether p is in range."""
        return _is_nat(p) and p < self.size  # type: ignore[operator]

    def coerce(self, value: Any) -> Point:
        """Accept integers in range."""
        self.check(value)
        return value  # type: ignore[no-any-return]

    def _distance(self, p: Any, q: Any) -> Dyadic:
        return ZERO if p == q else ONE

    def centers(self, n: int) -> Sequence[Point]:
        """Return every point."""
        return list(range(self.size))

    def first_match(self, p: Any, n: int) -> int:
        """Return 0 at level 0 (radius 1 covers everything), else p."""
        return 0 if n == 0 else p  # type: ignore[no-any-return]


class _ProductCenters(Sequence[Point]):
    """Mixed-radix enumeration of per-coordinate centers, first coordinate major."""

    def __init__(self, product: "Product", level: int) -> None:
        self._product: Final[Product] = product
        self._level: Final[int] = level
        self._covered: Final[list[Sequence[Point]]] = [
            product.coordinate_space(i).centers(level)
            for i in range(product.covered_coordinates(level))
        ]

    def __len__(self) -> int:
        return prod(len(centers) for centers in self._covered)

    @overload
    def __getitem__(self, index: int) -> Point: ...
    @overload
    def __getitem__(self, index: slice) -> Sequence[Point]: ...
    def __getitem__(self, index: int | slice) -> Point | Sequence[Point]:
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if not -len(self) <= index < len(self):
            raise IndexError(index)
        index %= len(self)
        coords: list[Point] = []
        for centers in reversed(self._covered):
            index, digit = divmod(index, len(centers))
            coords.append(centers[digit])
        coords.reverse()
        return self._product.pad(tuple(coords))


@dataclass(frozen=True)
class Product(Space):
    """Finite or countable product with d = sup_i min(2**-i, d_i).

    A countable product (power) has no explicit factors and repeats its tail
    space; its points are finite tuples, implicitly padded with base points.
    """

    factors: tuple[Space, ...] = ()
    tail: Space | None = None

    def __post_init__(self) -> None:
        """Require exactly one of a nonempty factor list and a tail."""
        if bool(self.factors) == (self.tail is not None):
            raise ValueError("product needs either factors or a repeated tail space")

    @classmethod
    def power(cls, space: Space) -> "Product":
        """Return the countable product of copies of space."""
        return cls((), space)

    @property
    def countable(self) -> bool:
        """Whether the product has infinitely many coordinates."""
        return self.tail is not None

    @property
    def descriptor(self) -> str:
        """Return 'product(...)' or 'power(...)'."""
        if self.tail is not None:
            return f"power({self.tail.descriptor})"
        return f"product({','.join(factor.descriptor for factor in self.factors)})"

    def coordinate_space(self, i: int) -> Space:
        """Return the space of coordinate i."""
        if self.tail is not None:
            return self.tail
        return self.factors[i]

    def coordinate(self, p: Any, i: int) -> Point:
        """Return coordinate i of p, padding with the base point."""
        return p[i] if i < len(p) else self.coordinate_space(i).base_point  # type: ignore[no-any-return]

    def covered_coordinates(self, n: int) -> int:
        """Coordinates i < n are covered at level n; the rest are free."""
        return n if self.countable else min(n, len(self.factors))

    def pad(self, coords: tuple[Point, ...]) -> Point:
        """Return the canonical point with the given leading coordinates."""
        if not self.countable:
            return coords + tuple(
                self.factors[i].base_point for i in range(len(coords), len(self.factors))
            )
        end: int = len(coords)
        while end and coords[end - 1] == self.coordinate_space(end - 1).base_point:
            end -= 1
        return coords[:end]

    @property
    def base_point(self) -> Point:
        """Return the tuple of base points."""
        return self.pad(())

    def contains(self, p: object) -> bool:
        """Return whether p is a tuple of coordinate points."""
        if not isinstance(p, tuple):
            return False
        if not self.countable and len(p) != len(self.factors):
            return False
        return all(self.coordinate_space(i).contains(x) for i, x in enumerate(p))

    def coerce(self, value: Any) -> Point:
        """Coerce coordinatewise."""
        if not isinstance(value, tuple) or (
            not self.countable and len(value) != len(self.factors)
        ):
            raise SpaceMismatch(f"{value!r} is not a point of {self.descriptor}")
        return self.pad(
            tuple(self.coordinate_space(i).coerce(x) for i, x in enumerate(value))
        )

    def _distance(self, p: Any, q: Any) -> Dyadic:
        worst: Dyadic = ZERO
        for i in range(max(len(p), len(q))):
            space: Space = self.coordinate_space(i)
            worst = max(
                worst,
                min(pow2neg(i), space.distance(self.coordinate(p, i), self.coordinate(q, i))),
            )
        return worst

    def centers(self, n: int) -> Sequence[Point]:
        """Return the lazy mixed-radix center list."""
        return _ProductCenters(self, n)

    def center_count(self, n: int) -> int:
        """Return the product of the covered coordinate counts."""
        return prod(
            self.coordinate_space(i).center_count(n) for i in range(self.covered_coordinates(n))
        )

    def first_match(self, p: Any, n: int) -> int:
        """Return the rank of the tuple of per-coordinate first matches."""
        rank: int = 0
        for i in range(self.covered_coordinates(n)):
            space: Space = self.coordinate_space(i)
            rank = rank * space.center_count(n) + space.first_match(self.coordinate(p, i), n)
        return rank


def distance(sp: Space, p: Point, q: Point) -> Dyadic:
    """Return the exact distance of p and q in sp."""
    return sp.distance(p, q)


def cover(sp: Space, n: int) -> CoverLevel:
    """Return the canonical level-n cover of sp."""
    return sp.cover(n)


def locate(sp: Space, p: Point, cv: CoverLevel) -> int:
    """Return the index of the first center of cv whose ball contains p."""
    if cv.space != sp:
        raise SpaceMismatch(f"cover of {cv.space.descriptor} used with {sp.descriptor}")
    sp.check(p)
    if cv.canonical:
        return sp.first_match(p, cv.level)
    for index, center in enumerate(cv.centers):
        if sp.distance(p, center) <= cv.radius:
            return index
    raise NotCovered(f"{p!r} lies in no level-{cv.level} ball of {sp.descriptor}")
