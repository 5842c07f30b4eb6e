"""Nice-system, countable-product and inductive extractors."""

from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from itertools import combinations, count
from typing import Final

from .const import DEFAULT_LENGTH, DEFAULT_SECTION_LENGTH, DIAGONAL_DOUBLINGS, LOGGER
from .convergence import (
    ConvergenceCertificate,
    LocatedLimit,
    TupleFunction,
    VerificationReport,
    certify,
    extract_convergent,
    verify_certificate,
)
from .dyadic import Dyadic, pow2neg
from .errors import FuelExhausted, SpaceMismatch
from .spaces import Point, Product
from .streams import Fuel, MemoChain, NatStream, pseudo_intersection


def _colex(arity: int) -> Iterator[tuple[int, ...]]:
    """Yield every arity-subset of positions, ordered by maximum then lexicographically."""
    if arity == 0:
        yield ()
        return
    for top in count(arity - 1):
        for rest in combinations(range(top), arity - 1):
            yield (*rest, top)


@dataclass(frozen=True, kw_only=True)
class NiceSystem:
    """Convergence data of an r-nice subsequence.

    certificate covers f on the stream T; sections maps each materialized
    (r-1)-subset s of T to the certificate of n -> f(s + (n,)); lower is the
    system of the induced function s -> x_s.
    """

    certificate: ConvergenceCertificate
    sections: dict[tuple[int, ...], ConvergenceCertificate] = field(default_factory=dict)
    induced: TupleFunction | None = None
    lower: "NiceSystem | None" = None

    @property
    def arity(self) -> int:
        """Arity of the function."""
        return self.certificate.arity

    def limit_family(self) -> dict[tuple[int, ...], LocatedLimit]:
        """Return the limits x_s of every materialized section."""
        return {s: cert.limit for s, cert in self.sections.items()}

    def coherence(self) -> int | None:
        """Return the first level where the limits of f and of s -> x_s drift apart.

        The tolerance at level n is 2 * 2**-n plus the resolution 2**-L at which
        the section limits were read off.
        """
        if self.lower is None:
            return None
        top: ConvergenceCertificate = self.certificate
        low: ConvergenceCertificate = self.lower.certificate
        slack: Dyadic = pow2neg(top.max_level)
        for n in range(min(top.max_level, low.max_level) + 1):
            gap: Dyadic = top.space.distance(top.limit.at(n), low.limit.at(n))
            if gap > pow2neg(n - 1) + slack:
                return n
        return self.lower.coherence()


def extract_nice(
    f: TupleFunction,
    base: NatStream,
    max_level: int,
    fuel: Fuel,
    length: int = DEFAULT_LENGTH,
    section_length: int = DEFAULT_SECTION_LENGTH,
) -> NiceSystem:
    """Return a nice system for f on a substream of base.

    After a convergent stream S is found, the (r-1)-subsets s_0, s_1, ... of S
    are enumerated in colex order and S_k+1 is extracted inside S_k so that
    n -> f(s_k + (n,)) converges; T is the pseudo-intersection of that chain.
    Sections are kept for the subsets of the first section_length elements of T.
    """
    if f.arity == 1:
        return NiceSystem(
            certificate=extract_convergent(f, base, max_level, fuel, length, engine="nice")
        )
    top: ConvergenceCertificate = extract_convergent(f, base, max_level, fuel, length)
    assert top.stream is not None
    stream: Final[NatStream] = top.stream
    sections: dict[tuple[int, ...], ConvergenceCertificate] = {}

    def _links() -> Iterator[NatStream]:
        current: NatStream = stream
        yield current
        for positions in _colex(f.arity - 1):
            s: tuple[int, ...] = tuple(stream.element(p) for p in positions)
            cert: ConvergenceCertificate = extract_convergent(
                f.section(s), current.after(s[-1]), max_level, fuel, section_length, engine="nice"
            )
            LOGGER.debug("%s: section %s converges to %r", f.name, s, cert.limit.at(max_level))
            sections[s] = cert
            assert cert.stream is not None
            current = cert.stream
            yield current

    chain: Final[MemoChain] = MemoChain(_links())

    def _section(s: tuple[int, ...]) -> ConvergenceCertificate:
        for _link in chain:
            if s in sections:
                break
        return sections[s]

    thinned: NatStream = pseudo_intersection(chain, fuel, name=f"{stream.name}|nice")
    prefix: tuple[int, ...] = tuple(thinned.materialize(length))
    kept: dict[tuple[int, ...], ConvergenceCertificate] = {
        s: _section(s) for s in combinations(prefix[:section_length], f.arity - 1)
    }
    induced: TupleFunction = TupleFunction(
        arity=f.arity - 1,
        target=f.target,
        rule=lambda s: _section(s).limit.at(max_level),
        name=f"x[{f.name}]",
    )
    lower: NiceSystem = extract_nice(
        induced, thinned, max_level, fuel, section_length, section_length
    )
    certificate: ConvergenceCertificate = replace(
        top,
        prefix=prefix,
        thresholds=certify(f.rule, f.target, f.arity, prefix, top.limit.centers),
        engine="nice",
        stream=thinned,
    )
    return NiceSystem(certificate=certificate, sections=kept, induced=induced, lower=lower)


def verify_nice(f: TupleFunction, system: NiceSystem) -> VerificationReport:
    """Verify the top certificate, every section and the induced system."""
    if not (report := verify_certificate(f, system.certificate)):
        return report
    for s, cert in system.sections.items():
        if not (report := verify_certificate(f.section(s), cert)):
            return replace(report, reason=f"section {list(s)}: {report.reason}")
    if system.lower is not None and system.induced is not None:
        if not (report := verify_nice(system.induced, system.lower)):
            return replace(report, reason=f"induced: {report.reason}")
    return VerificationReport(ok=True)


def extract_product(
    f: TupleFunction,
    base: NatStream,
    max_level: int,
    fuel: Fuel,
    length: int = DEFAULT_LENGTH,
) -> tuple[ConvergenceCertificate, list[ConvergenceCertificate]]:
    """Return a product certificate and the coordinate certificates it is built from.

    Coordinate i is extracted inside the stream of coordinate i - 1. At level n
    only coordinates below n constrain the product metric, so the level-n
    center takes those coordinates' level-n centers and pads the rest.
    """
    if not isinstance(f.target, Product):
        raise SpaceMismatch(f"{f.name} maps into {f.target}, not a product")
    target: Final[Product] = f.target
    width: int = max_level + 1 if target.countable else min(len(target.factors), max_level + 1)
    coordinates: list[ConvergenceCertificate] = []
    current: NatStream = base
    for i in range(width):
        cert: ConvergenceCertificate = extract_convergent(
            f.project(i), current, max_level, fuel, length, engine="product"
        )
        LOGGER.debug("%s: coordinate %d converges to %r", f.name, i, cert.limit.at(max_level))
        coordinates.append(cert)
        assert cert.stream is not None
        current = cert.stream
    stream: NatStream = pseudo_intersection(
        [cert.stream for cert in coordinates if cert.stream is not None],
        fuel,
        name=f"{base.name}|{f.name}|product",
    )
    prefix: tuple[int, ...] = tuple(stream.materialize(length))
    centers: list[Point] = [
        target.pad(tuple(coordinates[i].limit.at(n) for i in range(min(n, width))))
        for n in range(max_level + 1)
    ]
    return (
        ConvergenceCertificate(
            arity=f.arity,
            space=target,
            prefix=prefix,
            limit=LocatedLimit(tuple(centers)),
            thresholds=certify(f.rule, target, f.arity, prefix, centers),
            engine="product",
            fuel_report={
                **fuel.as_dict(),
                "oracle_calls": sum(c.fuel_report.get("oracle_calls", 0) for c in coordinates),
                "levels_completed": max_level + 1,
                "prefix_length": len(prefix),
                "coordinates": width,
            },
            stream=stream,
        ),
        coordinates,
    )


def inductive_extract(
    f: TupleFunction,
    base: NatStream,
    max_level: int,
    fuel: Fuel,
    length: int = DEFAULT_LENGTH,
    sub_length: int = DEFAULT_SECTION_LENGTH,
) -> ConvergenceCertificate:
    """Return a certificate built by induction on the arity.

    a_n is the least element of A_n above a_n-1; the (r-1)-ary section at a_n is
    extracted inside A_n at level L + 2, giving A_n+1 and the point q_n. The
    q_n are thinned to a convergent subsequence M at level L + 1 with limit p,
    B = {a_n : n in M}, and C is the dominating diagonal of B that skips every
    element violating a level-i claim with minimum the previous element of C.
    """
    if f.arity == 1:
        return extract_convergent(f, base, max_level, fuel, length, engine="inductive")
    points: list[int] = []
    limits: list[Point] = []

    def _anchors() -> Iterator[int]:
        current: NatStream = base
        last: int = -1
        while True:
            a: int = current.element(current.index_above(last))
            sub: ConvergenceCertificate = inductive_extract(
                f.section((a,)), current.after(a), max_level + 2, fuel, sub_length, sub_length
            )
            assert sub.stream is not None
            points.append(a)
            limits.append(sub.limit.at(max_level + 2))
            LOGGER.debug("%s: anchor %d, section limit %r", f.name, a, limits[-1])
            current, last = sub.stream, a
            yield a

    anchors: Final[NatStream] = NatStream(_anchors, fuel=fuel, name=f"{base.name}|anchors")

    def _limit_at(index: tuple[int, ...]) -> Point:
        anchors.element(index[0])
        return limits[index[0]]

    try:
        thinning: ConvergenceCertificate = extract_convergent(
            TupleFunction(arity=1, target=f.target, rule=_limit_at, name=f"p[{f.name}]"),
            NatStream.naturals(fuel),
            max_level + 1,
            fuel,
            length,
            engine="inductive",
        )
        assert thinning.stream is not None
        centers: tuple[Point, ...] = thinning.limit.centers[: max_level + 1]
        for doubling in range(DIAGONAL_DOUBLINGS + 1):
            thinned: tuple[int, ...] = tuple(
                points[m] for m in thinning.stream.materialize(length << doubling)
            )
            diagonal: tuple[int, ...] = _dominating_diagonal(f, thinned, centers)[:length]
            if len(diagonal) >= length:
                break
            LOGGER.debug("%s: diagonal of %d short of %d", f.name, len(diagonal), length)
        else:
            raise FuelExhausted(
                f"diagonal stayed below {length} elements after {DIAGONAL_DOUBLINGS} regrowths",
                prefix=diagonal,
            )
    except FuelExhausted as err:
        raise FuelExhausted(
            f"{f.name}: inductive thinning stopped: {err}",
            prefix=tuple(points),
            live=err.live,
        ) from err
    LOGGER.debug(
        "%s: %d anchors thinned to %d, diagonal %s", f.name, len(points), len(thinned), diagonal
    )
    return ConvergenceCertificate(
        arity=f.arity,
        space=f.target,
        prefix=diagonal,
        limit=LocatedLimit(centers),
        thresholds=certify(f.rule, f.target, f.arity, diagonal, centers),
        engine="inductive",
        fuel_report={
            **thinning.fuel_report,
            "anchors": len(points),
            "prefix_length": len(diagonal),
        },
        stream=NatStream.of(diagonal, fuel, name=f"{base.name}|{f.name}|inductive"),
    )


def _dominating_diagonal(
    f: TupleFunction, b: tuple[int, ...], centers: tuple[Point, ...]
) -> tuple[int, ...]:
    """Return the subsequence C of b that outruns every recorded violation.

    phi[i][k] is one more than the largest second element of an r-subset of b
    with minimum b[k] whose image leaves the level-i ball, or b[k] + 1.
    """
    radii: list[Dyadic] = [pow2neg(i) for i in range(len(centers))]
    phi: list[list[int]] = [[x + 1 for x in b] for _ in centers]
    for positions in combinations(range(len(b)), f.arity):
        s: tuple[int, ...] = tuple(b[p] for p in positions)
        point: Point = f(s)
        for i, center in enumerate(centers):
            if f.target.distance(point, center) > radii[i]:
                phi[i][positions[0]] = max(phi[i][positions[0]], s[1] + 1)
    if not b:
        return ()
    chosen: list[int] = [0]
    for k in range(1, len(b)):
        depth: int = min(len(chosen) - 1, len(centers) - 1)
        if b[k] >= max(phi[i][chosen[-1]] for i in range(depth + 1)):
            chosen.append(k)
    return tuple(b[k] for k in chosen)
