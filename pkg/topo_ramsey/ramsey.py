"""Finite and infinite Ramsey extraction for colorings of r-sets of naturals."""

from collections import Counter
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Final

from .const import DEFAULT_LENGTH, LOGGER
from .errors import FuelExhausted
from .streams import Fuel, NatStream, pseudo_intersection

type Rule = Callable[[tuple[int, ...]], int]


@dataclass(frozen=True, kw_only=True)
class Coloring:
    """Total deterministic map from sorted r-tuples to {0, ..., palette-1}."""

    arity: int
    palette: int
    rule: Rule
    name: str = "coloring"

    def __post_init__(self) -> None:
        """Check arity and palette."""
        if self.arity < 1 or self.palette < 1:
            raise ValueError("coloring needs arity >= 1 and palette >= 1")

    def __call__(self, s: tuple[int, ...]) -> int:
        """Return the color of the sorted tuple s."""
        return self.rule(s)

    def section(self, head: tuple[int, ...]) -> "Coloring":
        """Return the coloring s -> c(head + s) of arity r - len(head)."""
        rule: Final[Rule] = self.rule
        return Coloring(
            arity=self.arity - len(head),
            palette=self.palette,
            rule=lambda s: rule(head + s),
            name=f"{self.name}{list(head)}",
        )

    @classmethod
    def constant(cls, arity: int, color: int = 0, palette: int = 1) -> "Coloring":
        """Return the constant coloring."""
        return cls(arity=arity, palette=palette, rule=lambda _s: color, name=f"const-{color}")

    @classmethod
    def from_table(
        cls, arity: int, palette: int, table: Mapping[tuple[int, ...], int]
    ) -> "Coloring":
        """Return a coloring given by an explicit table of r-tuples."""
        return cls(arity=arity, palette=palette, rule=table.__getitem__, name="table")


@dataclass(frozen=True, kw_only=True)
class HomogeneityWitness:
    """Subset whose r-subsets past the first discard_bound elements share a color."""

    subset: tuple[int, ...]
    color: int
    discard_bound: int = 0

    @property
    def core(self) -> tuple[int, ...]:
        """Elements past the discard bound."""
        return self.subset[self.discard_bound :]


def check_witness(c: Coloring, w: HomogeneityWitness) -> bool:
    """Return whether every r-subset of the witness core has the stated color."""
    return all(c(s) == w.color for s in combinations(w.core, c.arity))


def find_homogeneous_exact(c: Coloring, n_points: int, size: int) -> HomogeneityWitness | None:
    """Return the lexicographically least homogeneous size-subset of [0, n_points)."""
    if n_points < c.arity or size < c.arity:
        raise ValueError("need n_points >= arity and size >= arity")
    for subset in combinations(range(n_points), size):
        faces: Iterator[tuple[int, ...]] = combinations(subset, c.arity)
        color: int = c(next(faces))
        if all(c(face) == color for face in faces):
            return HomogeneityWitness(subset=subset, color=color)
    return None


def pigeonhole(
    elements: Iterator[int], color_of: Callable[[int], int], window: int, name: str
) -> int:
    """Return the first color whose live run reaches 2 * window hits.

    A class stays live while its last hit lies within window * (classes seen)
    scanned elements. A hit on a dead class restarts its run.
    """
    runs: Counter[int] = Counter()
    last: dict[int, int] = {}
    scanned: int = 0

    def live_span() -> int:
        return window * max(1, len(last))

    try:
        for x in elements:
            color: int = color_of(x)
            if color in last and scanned - last[color] > live_span():
                LOGGER.debug("%s: color %d went dead before %d", name, color, x)
                runs[color] = 0
            last[color] = scanned
            runs[color] += 1
            scanned += 1
            if runs[color] >= 2 * window:
                LOGGER.debug("%s: color %d wins at %d (%s)", name, color, x, dict(runs))
                return color
    except FuelExhausted as err:
        raise FuelExhausted(
            f"{name}: no live color reached {2 * window} hits: {err}",
            prefix=err.prefix,
            live={c: n for c, n in runs.items() if scanned - last[c] <= live_span()},
        ) from err
    raise AssertionError  # pragma: no cover


def _extract_unary(c: Coloring, base: NatStream, fuel: Fuel) -> tuple[NatStream, int]:
    color: int = pigeonhole(
        base.iterate(), lambda x: c((x,)), fuel.window, f"{c.name} on {base.name}"
    )
    return base.filter(lambda x: c((x,)) == color, name=f"{base.name}|{c.name}={color}"), color


def _pairs_flat(c: Coloring, base: NatStream, fuel: Fuel, colors: dict[int, int]) -> Iterator[int]:
    """Pre-homogeneous sequence for pairs without nesting the candidate streams."""
    guards: list[tuple[int, int]] = []
    last: int = -1
    while True:
        snapshot: tuple[tuple[int, int], ...] = tuple(guards)
        candidates: NatStream = base.after(last).filter(
            lambda x, g=snapshot: all(c((a, x)) == j for a, j in g),  # type: ignore[misc]
            name=f"{base.name}|S{len(snapshot)}",
        )
        a: int = candidates.element(0)
        _, j = _extract_unary(c.section((a,)), candidates.after(a), fuel)
        colors[a] = j
        guards.append((a, j))
        last = a
        yield a


def _prehomogeneous(
    c: Coloring, base: NatStream, fuel: Fuel, colors: dict[int, int]
) -> Iterator[int]:
    """Yield a_0 < a_1 < ... where the color of an r-set depends only on its minimum."""
    if c.arity == 2:
        yield from _pairs_flat(c, base, fuel, colors)
        return
    current: NatStream = base
    while True:
        a: int = current.element(0)
        current, j = infinite_ramsey_extract(c.section((a,)), current.after(a), fuel)
        colors[a] = j
        yield a


def infinite_ramsey_extract(c: Coloring, base: NatStream, fuel: Fuel) -> tuple[NatStream, int]:
    """Return a substream H of base and a color j with [H]^r monochromatic in j.

    r = 1 is the pigeonhole: the first color whose live run reaches
    2 * fuel.window hits wins and H is its color class. For r > 1 a
    pre-homogeneous sequence is built and the pigeonhole runs on the colors of
    its minima.
    """
    if c.arity == 1:
        return _extract_unary(c, base, fuel)
    colors: dict[int, int] = {}
    pre: NatStream = NatStream(
        lambda: _prehomogeneous(c, base, fuel, colors),
        fuel=fuel,
        name=f"{base.name}|pre({c.name})",
    )
    color: int = pigeonhole(pre.iterate(), colors.__getitem__, fuel.window, pre.name)
    return pre.filter(lambda a: colors[a] == color, name=f"{pre.name}={color}"), color


def almost_homogeneous_family(
    cs: Sequence[Coloring], base: NatStream, fuel: Fuel, length: int = DEFAULT_LENGTH
) -> tuple[NatStream, list[HomogeneityWitness]]:
    """Return one stream almost homogeneous for every coloring of the family.

    Coloring i is extracted inside the result for coloring i - 1; the stream is
    the pseudo-intersection of that chain, so only its first i elements may
    violate coloring i.
    """
    if not cs:
        raise ValueError("empty family of colorings")
    if len({c.arity for c in cs}) != 1:
        raise ValueError("colorings of a family must share their arity")
    links: list[NatStream] = []
    colors: list[int] = []
    current: NatStream = base
    for c in cs:
        current, color = infinite_ramsey_extract(c, current, fuel)
        links.append(current)
        colors.append(color)
    stream: NatStream = pseudo_intersection(links, fuel, name=f"{base.name}|family")
    prefix: tuple[int, ...] = tuple(stream.materialize(length))
    return stream, [
        HomogeneityWitness(subset=prefix, color=color, discard_bound=min(i, len(prefix)))
        for i, color in enumerate(colors)
    ]
