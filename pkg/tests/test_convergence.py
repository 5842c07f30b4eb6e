"""Test convergent-subsequence extraction and certificate verification."""

from dataclasses import replace

from hypothesis import given, settings, strategies as st
import pytest

from topo_ramsey.convergence import (
    ConvergenceCertificate,
    LocatedLimit,
    TupleFunction,
    certify,
    derive_lower_certificate,
    extract_convergent,
    induced_coloring,
    lift_coloring,
    verify_certificate,
)
from topo_ramsey.dsl import parse
from topo_ramsey.dyadic import ZERO, Dyadic, pow2neg
from topo_ramsey.errors import FuelExhausted, SpaceMismatch
from topo_ramsey.fixtures import builtin
from topo_ramsey.spaces import INF, FiniteDiscrete, OmegaPlusOne, Product, UnitCube
from topo_ramsey.streams import Fuel, NatStream


def test_min_decay(min_decay: TupleFunction, naturals: NatStream, fuel: Fuel) -> None:
    """Test {k,l} -> 2^-(k+1) converging to 0 on all of the naturals."""

    cert = extract_convergent(min_decay, naturals, 4, fuel)
    assert cert.prefix == tuple(range(32))
    assert cert.limit.centers == ((ZERO,),) * 5
    assert cert.thresholds == (0, 0, 1, 2, 3)
    assert cert.levels == [(0, 0), (1, 0), (2, 1), (3, 2), (4, 3)]
    assert (cert.engine, cert.max_level, cert.partial) == ("cover", 4, False)
    assert cert.fuel_report["levels_completed"] == 5
    assert cert.fuel_report["prefix_length"] == 32
    assert verify_certificate(min_decay, cert)


def test_mad_pair(mad_pair: TupleFunction, naturals: NatStream, fuel: Fuel) -> None:
    """Test {k,l} -> (k,l) converging to (inf, inf)."""

    cert = extract_convergent(mad_pair, naturals, 4, fuel)
    assert cert.prefix[:5] == (0, 2, 3, 4, 5)
    assert all(c == (INF, INF) for c in cert.limit.centers)
    assert cert.thresholds == (0, 1, 1, 2, 3)
    assert verify_certificate(mad_pair, cert)


def test_constant(naturals: NatStream, fuel: Fuel) -> None:
    """Test that a constant function needs no thresholds."""

    f = builtin("const(1/2)").function(2)
    cert = extract_convergent(f, naturals, 5, fuel, length=12)
    half = (Dyadic(1, 1),)
    assert cert.thresholds == (0,) * 6
    for n, center in enumerate(cert.limit.centers):
        assert UnitCube(1).distance(center, half) <= pow2neg(n)
    assert verify_certificate(f, cert)


def test_tampered_center_is_caught(min_decay: TupleFunction, naturals: NatStream, fuel: Fuel) -> None:
    """Test that moving one center by 1/2 yields a counterexample."""

    cert = extract_convergent(min_decay, naturals, 4, fuel)
    centers = list(cert.limit.centers)
    centers[2] = (Dyadic(1, 1),)
    report = verify_certificate(min_decay, replace(cert, limit=LocatedLimit(tuple(centers))))
    assert not report
    assert report.level == 2
    assert report.counterexample == (2, 3)
    assert report.as_dict()["counterexample"] == [2, 3]


def test_structural_checks(min_decay: TupleFunction, naturals: NatStream, fuel: Fuel) -> None:
    """Test the checks made before enumerating claims."""

    cert = extract_convergent(min_decay, naturals, 3, fuel, length=8)
    bad = {
        "arity": replace(cert, arity=3),
        "space": replace(cert, space=UnitCube(2)),
        "increasing": replace(cert, prefix=(0, 2, 1)),
        "threshold per center": replace(cert, thresholds=(0, 0)),
        "decrease": replace(cert, thresholds=(0, 1, 0, 0)),
        "outside": replace(cert, limit=LocatedLimit(((Dyadic(3, 1),),) * 4)),
    }
    for what, tampered in bad.items():
        assert not verify_certificate(min_decay, tampered), what
    jumpy = replace(
        cert,
        prefix=(0, 1),
        limit=LocatedLimit(((ZERO,), (ZERO,), (Dyadic(1),), (ZERO,))),
    )
    report = verify_certificate(min_decay, jumpy)
    assert (report.ok, report.level) == (False, 1)


def test_certify_is_minimal(min_decay: TupleFunction) -> None:
    """Test that certify returns the least thresholds."""

    centers = [(ZERO,)] * 4
    assert certify(min_decay.rule, UnitCube(1), 2, range(10), centers) == (0, 0, 1, 2)
    assert certify(min_decay.rule, UnitCube(1), 2, range(5, 10), centers) == (0, 0, 0, 0)


def test_hand_built_certificate() -> None:
    """Test a certificate written by hand rather than extracted."""

    f = builtin("const(0)").function(3)
    cert = ConvergenceCertificate(
        arity=3,
        space=UnitCube(1),
        prefix=(1, 5, 9, 11),
        limit=LocatedLimit(((Dyadic(1, 1),), (ZERO,))),
        thresholds=(0, 0),
    )
    assert verify_certificate(f, cert)
    short = verify_certificate(f, replace(cert, prefix=(1, 5)))
    assert not short
    assert short.reason == "stream prefix shorter than the arity"


def test_step_function_skips_the_initial_run(fuel: Fuel) -> None:
    """Test a unary step function whose early value appears only eight times."""

    f = parse("if(x0 < 8, 1, 0)", 1, UnitCube(1)).as_function()
    cert = extract_convergent(f, NatStream.naturals(fuel), 4, fuel, length=16)
    assert cert.prefix == (0, *range(8, 23))
    assert cert.thresholds == (0, 1, 1, 1, 1)
    assert all(c == (ZERO,) for c in cert.limit.centers[1:])
    assert verify_certificate(f, cert)


def test_staircase_descends_past_each_step(fuel: Fuel) -> None:
    """Test pairs valued 2^-(k // 8) by their minimum k."""

    f = TupleFunction(
        arity=2, target=UnitCube(1), rule=lambda s: (pow2neg(s[0] // 8),), name="staircase"
    )
    cert = extract_convergent(f, NatStream.naturals(fuel), 3, fuel, length=8)
    assert cert.prefix == (0, 8, 16, 24, 25, 26, 27, 28)
    assert cert.limit.at(3) == (ZERO,)
    assert verify_certificate(f, cert)


def test_fuel_exhaustion_keeps_a_partial_certificate(min_decay: TupleFunction) -> None:
    """Test that a spent budget still yields a verifiable partial certificate."""

    fuel = Fuel(max_materialize=5)
    with pytest.raises(FuelExhausted) as err:
        extract_convergent(min_decay, NatStream.naturals(fuel), 4, fuel)
    partial = err.value.partial
    assert partial is not None
    assert partial.partial
    assert partial.max_level < 4
    assert verify_certificate(min_decay, partial)
    with pytest.raises(ValueError):
        extract_convergent(min_decay, NatStream.naturals(fuel), -1, fuel)


def test_deterministic(mad_pair: TupleFunction, fuel: Fuel) -> None:
    """Test that repeated runs give equal certificates."""

    first = extract_convergent(mad_pair, NatStream.naturals(fuel), 3, fuel, length=16)
    second = extract_convergent(mad_pair, NatStream.naturals(fuel), 3, fuel, length=16)
    assert first == second


def test_lift_coloring() -> None:
    """Test that the lift ignores the largest element."""

    g = TupleFunction(arity=1, target=UnitCube(1), rule=lambda s: (pow2neg(s[0]),), name="g")
    f = lift_coloring(g)
    assert (f.arity, f.name) == (2, "lift-of(g)")
    assert f((3, 7)) == (pow2neg(3),)
    pair = lift_coloring(builtin("mad-pair").function())
    assert pair((1, 4, 9)) == (1, 4)


def test_sections_and_projections(mad_pair: TupleFunction) -> None:
    """Test the function views used by the engines."""

    assert mad_pair.section((2,))((7,)) == (2, 7)
    assert mad_pair.project(1)((2, 7)) == 7
    assert mad_pair.project(0).target == OmegaPlusOne()
    with pytest.raises(SpaceMismatch):
        builtin("min-decay").function().project(0)
    with pytest.raises(SpaceMismatch):
        mad_pair.as_coloring()
    parity = builtin("min-parity").function(2).as_coloring()
    assert (parity.palette, parity((3, 8))) == (2, 1)
    with pytest.raises(ValueError):
        TupleFunction(arity=0, target=UnitCube(1), rule=lambda s: (ZERO,))


def test_induced_coloring(min_decay: TupleFunction) -> None:
    """Test that the induced coloring locates values in the cover."""

    cv = UnitCube(1).cover(2)
    c = induced_coloring(min_decay.rule, UnitCube(1), 2, cv)
    assert c.palette == 5
    assert [c((k, k + 1)) for k in range(4)] == [1, 0, 0, 0]


@settings(max_examples=20)
@given(
    st.integers(2, 3),
    st.integers(0, 2),
    st.integers(0, 2),
    st.integers(0, 2),
)
def test_lower_certificate_from_lift(colors: int, a: int, b: int, c: int) -> None:
    """Test that a certificate for the lift of g certifies g on the shortened prefix."""

    g = parse(f"({a}*x0 + {b}*x1 + {c}) mod {colors}", 2, FiniteDiscrete(colors)).as_function()
    fuel = Fuel(window=4)
    cert = extract_convergent(lift_coloring(g), NatStream.naturals(fuel), 2, fuel, length=12)
    lower = derive_lower_certificate(cert, g)
    assert lower.arity == 2
    assert lower.prefix == cert.prefix[:-1]
    assert verify_certificate(g, lower)
    with pytest.raises(ValueError):
        derive_lower_certificate(cert, lift_coloring(g))


def test_omega_target(naturals: NatStream, fuel: Fuel) -> None:
    """Test a function into omega+1 whose values run off to infinity."""

    f = parse("x0 + x1", 2, OmegaPlusOne()).as_function()
    cert = extract_convergent(f, naturals, 3, fuel, length=10)
    assert cert.limit.at(3) is INF
    assert verify_certificate(f, cert)
    g = parse("(x0, 1)", 2, Product((OmegaPlusOne(), OmegaPlusOne()))).as_function()
    cert = extract_convergent(g, naturals, 3, fuel, length=10)
    assert cert.limit.at(3) == (INF, 1)
    assert verify_certificate(g, cert)
