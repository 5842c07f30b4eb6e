"""Convergent-subsequence extraction with independently checkable certificates."""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Final

from .const import DEFAULT_LENGTH, LOGGER
from .dyadic import Dyadic, pow2neg
from .errors import FuelExhausted, SpaceMismatch
from .ramsey import Coloring, infinite_ramsey_extract
from .spaces import CoverLevel, FiniteDiscrete, Point, Product, Space, locate
from .streams import Fuel, NatStream, Oracle, pseudo_intersection

type Evaluate = Callable[[tuple[int, ...]], Point]


@dataclass(frozen=True, kw_only=True)
class TupleFunction:
    """Total deterministic map from sorted r-tuples of naturals into a space."""

    arity: int
    target: Space
    rule: Evaluate
    name: str = "f"

    def __post_init__(self) -> None:
        """Check the arity."""
        if self.arity < 1:
            raise ValueError("tuple functions need arity >= 1")

    def __call__(self, s: tuple[int, ...]) -> Point:
        """Evaluate on a sorted tuple."""
        return self.rule(s)

    def section(self, head: tuple[int, ...]) -> "TupleFunction":
        """Return s -> f(head + s)."""
        rule: Final[Evaluate] = self.rule
        return TupleFunction(
            arity=self.arity - len(head),
            target=self.target,
            rule=lambda s: rule(head + s),
            name=f"{self.name}{list(head)}",
        )

    def project(self, i: int) -> "TupleFunction":
        """Return coordinate i of a function into a product."""
        if not isinstance(self.target, Product):
            raise SpaceMismatch(f"{self.name} does not map into a product")
        target: Final[Product] = self.target
        rule: Final[Evaluate] = self.rule
        return TupleFunction(
            arity=self.arity,
            target=target.coordinate_space(i),
            rule=lambda s: target.coordinate(rule(s), i),
            name=f"{self.name}.{i}",
        )

    def as_coloring(self) -> Coloring:
        """Return the function as a coloring when it maps into a finite discrete space."""
        if not isinstance(self.target, FiniteDiscrete):
            raise SpaceMismatch(f"{self.name} maps into {self.target}, not a palette")
        rule: Final[Evaluate] = self.rule
        return Coloring(
            arity=self.arity,
            palette=self.target.size,
            rule=lambda s: rule(s),  # type: ignore[arg-type,return-value]
            name=self.name,
        )


def lift_coloring(g: TupleFunction) -> TupleFunction:
    """Return f(s) = g(s minus its maximum), of arity one more than g."""
    rule: Final[Evaluate] = g.rule
    return TupleFunction(
        arity=g.arity + 1,
        target=g.target,
        rule=lambda s: rule(s[:-1]),
        name=f"lift-of({g.name})",
    )


@dataclass(frozen=True)
class LocatedLimit:
    """Limit point given by ball centers c_0, c_1, ... with radius 2**-n."""

    centers: tuple[Point, ...]

    @property
    def max_level(self) -> int:
        """Deepest level represented."""
        return len(self.centers) - 1

    def at(self, n: int) -> Point:
        """Return the level-n center."""
        return self.centers[n]

    def cauchy_violation(self, space: Space) -> int | None:
        """Return the first n with d(c_n, c_n+1) > 2**-n + 2**-(n+1), if any."""
        for n in range(len(self.centers) - 1):
            if space.distance(self.centers[n], self.centers[n + 1]) > pow2neg(n) + pow2neg(
                n + 1
            ):
                return n
        return None


@dataclass(frozen=True, kw_only=True)
class ConvergenceCertificate:
    """Claims: every r-subset of prefix with min-position >= t_n lies within 2**-n of c_n."""

    arity: int
    space: Space
    prefix: tuple[int, ...]
    limit: LocatedLimit
    thresholds: tuple[int, ...]
    engine: str = "cover"
    fuel_report: Mapping[str, int] = field(default_factory=dict)
    partial: bool = False
    stream: NatStream | None = field(default=None, compare=False, repr=False)

    @property
    def max_level(self) -> int:
        """Deepest certified level."""
        return len(self.thresholds) - 1

    @property
    def levels(self) -> list[tuple[int, int]]:
        """Pairs (n, t_n)."""
        return list(enumerate(self.thresholds))


@dataclass(frozen=True, kw_only=True)
class VerificationReport:
    """Outcome of verify_certificate; falsy on failure."""

    ok: bool
    reason: str = ""
    level: int | None = None
    counterexample: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        """Return ok."""
        return self.ok

    def as_dict(self) -> dict[str, Any]:
        """Return the report for JSON output."""
        return {
            "ok": self.ok,
            "reason": self.reason,
            "level": self.level,
            "counterexample": list(self.counterexample) if self.counterexample else None,
        }


def certify(
    evaluate: Evaluate,
    space: Space,
    arity: int,
    prefix: Sequence[int],
    centers: Sequence[Point],
) -> tuple[int, ...]:
    """Return the least nondecreasing thresholds making every level claim true."""
    radii: list[Dyadic] = [pow2neg(n) for n in range(len(centers))]
    worst: list[int] = [0] * len(centers)
    for positions in combinations(range(len(prefix)), arity):
        point: Point = evaluate(tuple(prefix[p] for p in positions))
        for n, center in enumerate(centers):
            if worst[n] <= positions[0] and space.distance(point, center) > radii[n]:
                worst[n] = positions[0] + 1
    thresholds: list[int] = []
    for t in worst:
        thresholds.append(max(t, thresholds[-1]) if thresholds else t)
    return tuple(thresholds)


def induced_coloring(evaluate: Evaluate, space: Space, arity: int, cv: CoverLevel) -> Coloring:
    """Return locate o f for the given cover level."""
    return Coloring(
        arity=arity,
        palette=len(cv),
        rule=lambda s: locate(space, evaluate(s), cv),
        name=f"ball@{cv.level}",
    )


def _fuel_report(fuel: Fuel, oracle: Oracle[Any, Any], levels: int, prefix: int) -> dict[str, int]:
    return {
        **fuel.as_dict(),
        "oracle_calls": oracle.calls,
        "levels_completed": levels,
        "prefix_length": prefix,
    }


def extract_convergent(
    f: TupleFunction,
    base: NatStream,
    max_level: int,
    fuel: Fuel,
    length: int = DEFAULT_LENGTH,
    engine: str = "cover",
) -> ConvergenceCertificate:
    """Return a certificate for a substream of base on which f converges.

    Level n colors r-sets by the first ball of the level-n cover containing
    their image, extracts a monochromatic substream of level n - 1 and records
    that ball's center. The certified stream is the pseudo-intersection of the
    levels, materialized to length elements.
    """
    if max_level < 0:
        raise ValueError("max level must be nonnegative")
    oracle: Oracle[tuple[int, ...], Point] = Oracle(f.rule, fuel, name=f.name)
    centers: list[Point] = []
    links: list[NatStream] = []
    current: NatStream = base
    stream: NatStream | None = None
    try:
        for n in range(max_level + 1):
            cv: CoverLevel = f.target.cover(n)
            current, index = infinite_ramsey_extract(
                induced_coloring(oracle, f.target, f.arity, cv), current, fuel
            )
            centers.append(cv.centers[index])
            links.append(current)
            LOGGER.debug(
                "%s: level %d, ball %d of %d, center %r", f.name, n, index, len(cv), centers[-1]
            )
        stream = pseudo_intersection(links, fuel, name=f"{base.name}|{f.name}")
        prefix: tuple[int, ...] = tuple(stream.materialize(length))
    except FuelExhausted as err:
        partial_prefix: tuple[int, ...] = (stream or current).materialized
        LOGGER.debug("%s: fuel exhausted after %d levels: %s", f.name, len(centers), err)
        raise FuelExhausted(
            f"{f.name}: {err}",
            prefix=partial_prefix,
            live=err.live,
            partial=ConvergenceCertificate(
                arity=f.arity,
                space=f.target,
                prefix=partial_prefix,
                limit=LocatedLimit(tuple(centers)),
                thresholds=certify(f.rule, f.target, f.arity, partial_prefix, centers),
                engine=engine,
                fuel_report=_fuel_report(fuel, oracle, len(centers), len(partial_prefix)),
                partial=True,
            ),
        ) from err
    return ConvergenceCertificate(
        arity=f.arity,
        space=f.target,
        prefix=prefix,
        limit=LocatedLimit(tuple(centers)),
        thresholds=certify(f.rule, f.target, f.arity, prefix, centers),
        engine=engine,
        fuel_report=_fuel_report(fuel, oracle, len(centers), len(prefix)),
        stream=stream,
    )


def verify_certificate(f: TupleFunction, cert: ConvergenceCertificate) -> VerificationReport:
    """Re-check every claim of cert against f by full enumeration."""
    if f.arity != cert.arity:
        return VerificationReport(ok=False, reason=f"arity {f.arity} != {cert.arity}")
    if f.target != cert.space:
        return VerificationReport(ok=False, reason=f"space {f.target} != {cert.space}")
    if len(cert.prefix) < cert.arity:
        return VerificationReport(ok=False, reason="stream prefix shorter than the arity")
    if any(a >= b for a, b in zip(cert.prefix, cert.prefix[1:], strict=False)):
        return VerificationReport(ok=False, reason="stream prefix is not strictly increasing")
    centers: tuple[Point, ...] = cert.limit.centers
    if len(centers) != len(cert.thresholds):
        return VerificationReport(ok=False, reason="one threshold per center required")
    for n in range(1, len(cert.thresholds)):
        if cert.thresholds[n] < cert.thresholds[n - 1]:
            return VerificationReport(ok=False, reason="thresholds decrease", level=n)
    for n, center in enumerate(centers):
        if not cert.space.contains(center):
            return VerificationReport(ok=False, reason="center outside the space", level=n)
    radii: list[Dyadic] = [pow2neg(n) for n in range(len(centers))]
    for positions in combinations(range(len(cert.prefix)), cert.arity):
        s: tuple[int, ...] = tuple(cert.prefix[p] for p in positions)
        point: Point = f(s)
        if not cert.space.contains(point):
            return VerificationReport(ok=False, reason="value outside the space", counterexample=s)
        for n, center in enumerate(centers):
            if positions[0] >= cert.thresholds[n] and cert.space.distance(point, center) > radii[n]:
                return VerificationReport(
                    ok=False,
                    reason=f"d(f(s), c_{n}) exceeds 2^-{n}",
                    level=n,
                    counterexample=s,
                )
    if (n_bad := cert.limit.cauchy_violation(cert.space)) is not None:
        return VerificationReport(ok=False, reason="Cauchy modulus violated", level=n_bad)
    return VerificationReport(ok=True)


def derive_lower_certificate(
    cert: ConvergenceCertificate, g: TupleFunction
) -> ConvergenceCertificate:
    """Return the certificate for g implied by one for lift_coloring(g).

    An (r-1)-subset of the prefix minus its last element extends by that last
    element to an r-subset with the same minimum, so limit and thresholds carry over.
    """
    if g.arity != cert.arity - 1:
        raise ValueError("derived certificate needs a function of one lower arity")
    return replace(cert, arity=g.arity, prefix=cert.prefix[:-1], stream=None)
