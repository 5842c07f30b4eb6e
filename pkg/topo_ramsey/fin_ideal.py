"""Smallness for the Fubini powers of the ideal of finite sets, finitized by splitting trees."""

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Final

from .const import DEFAULT_PIN_LEVEL, DEFAULT_SMALL_LENGTH, LOGGER
from .convergence import ConvergenceCertificate, TupleFunction, extract_convergent
from .errors import DimensionMismatch, EvaluationError, InsufficientLength
from .ramsey import pigeonhole
from .spaces import OmegaPlusOne, Point, Product
from .streams import Fuel, NatStream

type Node = tuple[int, ...]


@dataclass(frozen=True)
class TupleSet:
    """Finite set of n-tuples of naturals."""

    dimension: int
    elements: frozenset[Node] = frozenset()

    def __post_init__(self) -> None:
        """Check the dimension of every tuple."""
        if self.dimension < 1:
            raise DimensionMismatch("tuple sets need dimension >= 1")
        if any(len(t) != self.dimension for t in self.elements):
            raise DimensionMismatch(f"tuples of a {self.dimension}-dimensional set differ in length")

    @classmethod
    def of(cls, tuples: Iterable[Sequence[int]], dimension: int | None = None) -> "TupleSet":
        """Build from any iterable of integer sequences."""
        elements: frozenset[Node] = frozenset(tuple(t) for t in tuples)
        if dimension is None:
            if not elements:
                raise DimensionMismatch("the dimension of an empty set must be given")
            dimension = len(next(iter(elements)))
        return cls(dimension, elements)

    def __len__(self) -> int:
        """Return the number of tuples."""
        return len(self.elements)

    def __contains__(self, t: object) -> bool:
        """Return membership."""
        return t in self.elements

    def __iter__(self) -> Iterator[Node]:
        """Iterate in lexicographic order."""
        return iter(sorted(self.elements))

    def heads(self) -> list[int]:
        """Return the sorted first coordinates."""
        return sorted({t[0] for t in self.elements})

    def section(self, k: int) -> "TupleSet":
        """Return {t : (k,) + t in X} of one lower dimension."""
        return TupleSet(self.dimension - 1, frozenset(t[1:] for t in self.elements if t[0] == k))


@dataclass(frozen=True)
class SplittingTree:
    """Prefix-closed set of nodes where every internal node has >= branching children."""

    branching: int
    depth: int
    nodes: frozenset[Node]

    @property
    def leaves(self) -> list[Node]:
        """Nodes of full depth, sorted."""
        return sorted(node for node in self.nodes if len(node) == self.depth)

    def children(self, node: Node) -> list[Node]:
        """Return the sorted children of node."""
        return sorted(
            child
            for child in self.nodes
            if len(child) == len(node) + 1 and child[: len(node)] == node
        )


def validate_tree(tree: SplittingTree, within: TupleSet | None = None) -> bool:
    """Check root, prefix closure, depth, branching and leaves inside within."""
    if () not in tree.nodes or tree.branching < 1:
        return False
    if within is not None and within.dimension != tree.depth:
        return False
    for node in tree.nodes:
        if len(node) > tree.depth or (node and node[:-1] not in tree.nodes):
            return False
        if len(node) < tree.depth and len(tree.children(node)) < tree.branching:
            return False
        if within is not None and len(node) == tree.depth and node not in within:
            return False
    return True


def _least_tree(x: TupleSet, b: int) -> frozenset[Node] | None:
    if x.dimension == 1:
        heads: list[int] = x.heads()
        if len(heads) < b:
            return None
        return frozenset({(), *((k,) for k in heads[:b])})
    chosen: list[tuple[int, frozenset[Node]]] = []
    for k in x.heads():
        if (sub := _least_tree(x.section(k), b)) is not None:
            chosen.append((k, sub))
            if len(chosen) == b:
                return frozenset({(), *((k, *node) for k, sub in chosen for node in sub)})
    return None


def has_splitting_tree(x: TupleSet, b: int) -> SplittingTree | None:
    """Return the lexicographically least b-splitting tree inside x, if any.

    Dimension 1 needs b points; dimension n needs b first coordinates whose
    sections carry a tree of depth n - 1. The least b such heads are used.
    """
    if b < 1:
        raise ValueError("branching must be at least 1")
    nodes: frozenset[Node] | None = _least_tree(x, b)
    return None if nodes is None else SplittingTree(branching=b, depth=x.dimension, nodes=nodes)


def is_small(x: TupleSet, b: int) -> bool:
    """Return whether x carries no b-splitting tree."""
    return has_splitting_tree(x, b) is None


def g_function(r: int) -> TupleFunction:
    """Return the map of an (r+1)-set to its increasing enumeration."""
    if r < 1:
        raise ValueError("G needs r >= 1")
    return TupleFunction(
        arity=r + 1,
        target=Product((OmegaPlusOne(),) * (r + 1)),
        rule=lambda s: s,
        name=f"G({r})",
    )


def up_arrow(b: Sequence[int], n: int) -> TupleSet:
    """Return the strictly increasing n-tuples from b."""
    if any(x >= y for x, y in zip(b, b[1:], strict=False)):
        raise ValueError("up_arrow needs a strictly increasing list")
    return TupleSet(n, frozenset(combinations(b, n)))


def check_avoidance(a: TupleSet, b: Sequence[int], n: int, arity: int | None = None) -> bool:
    """Return whether a misses every increasing tuple of b with all entries >= n."""
    if arity is not None and arity != a.dimension:
        raise DimensionMismatch(f"expected {arity}-tuples, got dimension {a.dimension}")
    tail: frozenset[int] = frozenset(x for x in b if x >= n)
    return not any(
        all(x in tail for x in t) and all(x < y for x, y in zip(t, t[1:], strict=False))
        for t in a.elements
    )


def mad_diagnostic(b: Sequence[int], r: int) -> SplittingTree:
    """Return a splitting tree inside the increasing (r+1)-tuples of b.

    b is cut into r + 1 consecutive blocks of length m // (r + 1); level i + 1
    nodes extend by any element of block i, so the tree is (m // (r + 1))-splitting.
    """
    m: int = len(b)
    if m < 2 * (r + 1):
        raise InsufficientLength(f"need at least {2 * (r + 1)} elements, got {m}")
    if any(x >= y for x, y in zip(b, b[1:], strict=False)):
        raise ValueError("mad_diagnostic needs a strictly increasing list")
    h: int = m // (r + 1)
    blocks: list[Sequence[int]] = [b[i * h : (i + 1) * h] for i in range(r + 1)]
    nodes: set[Node] = {()}
    for depth in range(1, r + 2):
        nodes.update(product(*blocks[:depth]))
    LOGGER.debug("mad diagnostic: %d-splitting tree of depth %d, %d nodes", h, r + 1, len(nodes))
    return SplittingTree(branching=h, depth=r + 1, nodes=frozenset(nodes))


@dataclass(frozen=True, kw_only=True)
class SmallnessReport:
    """Outcome of fin_small_extract.

    case is "column" or "partial function" for arity 1, "pinned" or
    "unbounded" above. tree is a b-splitting tree found in the image of the
    prefix, expected to be None.
    """

    case: str
    prefix: tuple[int, ...]
    image: TupleSet
    column: int | None = None
    pinned: tuple[int, int] | None = None
    tree: SplittingTree | None = None
    certificate: ConvergenceCertificate | None = None
    stream: NatStream = field(compare=False, repr=False)


def _value(f: TupleFunction, s: tuple[int, ...]) -> Node:
    value: Point = f(s)
    if not (
        isinstance(value, tuple)
        and all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in value)
    ):
        raise EvaluationError(f"{f.name}{list(s)} = {value!r} is not a tuple of naturals")
    return value  # type: ignore[return-value]


def _check_shape(f: TupleFunction) -> None:
    target: Final = f.target
    if not (
        isinstance(target, Product)
        and not target.countable
        and len(target.factors) == f.arity + 1
        and all(isinstance(factor, OmegaPlusOne) for factor in target.factors)
    ):
        raise DimensionMismatch(
            f"{f.name} must map {f.arity}-sets into omega1^{f.arity + 1}, not {target}"
        )


def _drop(f: TupleFunction, j: int) -> TupleFunction:
    """Return f followed by deleting output coordinate j."""
    n: int = f.arity + 1
    return TupleFunction(
        arity=f.arity,
        target=Product((OmegaPlusOne(),) * n),
        rule=lambda s: tuple(x for i, x in enumerate(_value(f, s)) if i != j),
        name=f"{f.name}^{j}",
    )


def _report(
    f: TupleFunction, stream: NatStream, b: int, length: int, **details: object
) -> SmallnessReport:
    prefix: tuple[int, ...] = tuple(stream.materialize(length))
    image: TupleSet = TupleSet(
        f.arity + 1, frozenset(_value(f, s) for s in combinations(prefix, f.arity))
    )
    tree: SplittingTree | None = has_splitting_tree(image, b)
    if tree is not None:
        LOGGER.warning(
            "%s: image of a %d-element prefix carries a %d-splitting tree", f.name, len(prefix), b
        )
    return SmallnessReport(
        prefix=prefix, image=image, tree=tree, stream=stream, **details  # type: ignore[arg-type]
    )


_RECORD: Final[int] = -1


def _small_unary(f: TupleFunction, base: NatStream, fuel: Fuel, b: int, length: int) -> SmallnessReport:
    top: int = -1

    def _head_or_record(x: int) -> int:
        nonlocal top
        head: int = _value(f, (x,))[0]
        if head > top:
            top = head
            return _RECORD
        return head

    winner: int = pigeonhole(base.iterate(), _head_or_record, fuel.window, f"heads of {f.name}")
    if winner != _RECORD:
        LOGGER.debug("%s: column %d", f.name, winner)
        stream: NatStream = base.filter(
            lambda y: _value(f, (y,))[0] == winner, name=f"{base.name}|column {winner}"
        )
        return _report(f, stream, b, length, case="column", column=winner)

    def _increasing() -> Iterator[int]:
        last: int = -1
        for y in base.iterate():
            if (head := _value(f, (y,))[0]) > last:
                last = head
                yield y

    LOGGER.debug("%s: heads keep setting records", f.name)
    return _report(
        f,
        NatStream(_increasing, fuel=fuel, name=f"{base.name}|graph"),
        b,
        length,
        case="partial function",
    )


def fin_small_extract(
    f: TupleFunction,
    base: NatStream,
    fuel: Fuel,
    b: int = 2,
    length: int = DEFAULT_SMALL_LENGTH,
    level: int = DEFAULT_PIN_LEVEL,
) -> SmallnessReport:
    """Thin base so that the image of f over its n-sets is small.

    Arity 1 finds a column or a partial function. Higher arities pick anchors
    k_0 < k_1 < ... where every projection of the section at k_i dropping one
    output coordinate is made small inside the next anchor stream, then make f
    converge in (omega+1)^(n+1). A finite limit coordinate pins that coordinate;
    otherwise all coordinates run off to infinity. The image of the returned
    prefix is checked for b-splitting trees either way.
    """
    _check_shape(f)
    if f.arity == 1:
        return _small_unary(f, base, fuel, b, length)
    n: Final[int] = f.arity

    def _anchors() -> Iterator[int]:
        current: NatStream = base
        last: int = -1
        while True:
            k: int = current.element(current.index_above(last))
            thinned: NatStream = current.after(k)
            section: TupleFunction = f.section((k,))
            for j in range(n + 1):
                thinned = fin_small_extract(_drop(section, j), thinned, fuel, b, length, level).stream
            LOGGER.debug("%s: anchor %d", f.name, k)
            current, last = thinned, k
            yield k

    anchors: NatStream = NatStream(_anchors, fuel=fuel, name=f"{base.name}|anchors")
    cert: ConvergenceCertificate = extract_convergent(f, anchors, level, fuel, length)
    assert cert.stream is not None
    center: Point = cert.limit.at(level)
    assert isinstance(center, tuple)
    stream: NatStream = cert.stream.skip(cert.thresholds[-1])
    for i, value in enumerate(center[: min(level, n + 1)]):
        if isinstance(value, int) and value <= level - 2:
            LOGGER.debug("%s: coordinate %d pinned to %d", f.name, i, value)
            return _report(f, stream, b, length, case="pinned", pinned=(i, value), certificate=cert)
    return _report(f, stream, b, length, case="unbounded", certificate=cert)
