"""Test finite and infinite Ramsey extraction."""

from itertools import combinations

from hypothesis import given, settings, strategies as st
import pytest

from topo_ramsey.dsl import parse
from topo_ramsey.errors import FuelExhausted
from topo_ramsey.ramsey import (
    Coloring,
    HomogeneityWitness,
    almost_homogeneous_family,
    check_witness,
    find_homogeneous_exact,
    infinite_ramsey_extract,
)
from topo_ramsey.spaces import FiniteDiscrete
from topo_ramsey.streams import Fuel, NatStream

PAIRS_OF_SIX: list[tuple[int, ...]] = list(combinations(range(6), 2))


def test_every_two_coloring_of_six_points_has_a_triangle() -> None:
    """Test R(3,3) = 6 over all 2**15 colorings of the pairs of [0,6)."""

    for mask in range(2 ** len(PAIRS_OF_SIX)):
        table = {pair: (mask >> i) & 1 for i, pair in enumerate(PAIRS_OF_SIX)}
        coloring = Coloring.from_table(2, 2, table)
        witness = find_homogeneous_exact(coloring, 6, 3)
        assert witness is not None, f"no monochromatic triangle for mask {mask}"
        assert check_witness(coloring, witness)


def test_pentagon_has_no_triangle() -> None:
    """Test the 5-point coloring without monochromatic triangles."""

    pentagon = Coloring(arity=2, palette=2, rule=lambda s: int((s[1] - s[0]) % 5 in (1, 4)))
    assert find_homogeneous_exact(pentagon, 5, 3) is None


def test_exact_search_is_lexicographically_least() -> None:
    """Test the order in which finite witnesses are found."""

    assert find_homogeneous_exact(Coloring.constant(2), 4, 3) == HomogeneityWitness(
        subset=(0, 1, 2), color=0
    )
    parity = Coloring(arity=2, palette=2, rule=lambda s: (s[1] - s[0]) % 2)
    witness = find_homogeneous_exact(parity, 6, 3)
    assert witness is not None
    assert (witness.subset, witness.color) == ((0, 2, 4), 0)
    with pytest.raises(ValueError):
        find_homogeneous_exact(parity, 1, 3)


def test_sections() -> None:
    """Test that sections fix leading elements."""

    c = Coloring(arity=3, palette=3, rule=lambda s: sum(s) % 3)
    assert c.section((1,))((2, 6)) == 0
    assert c.section((1, 2))((4,)) == 1
    with pytest.raises(ValueError):
        Coloring(arity=0, palette=2, rule=lambda _s: 0)


def test_pigeonhole_on_residues(fuel: Fuel) -> None:
    """Test that the first class to recur enough times wins."""

    c = Coloring(arity=1, palette=3, rule=lambda s: s[0] % 3)
    stream, color = infinite_ramsey_extract(c, NatStream.naturals(fuel), fuel)
    assert color == 0
    assert stream.materialize(4) == [0, 3, 6, 9]


def test_min_parity_gives_evens(fuel: Fuel) -> None:
    """Test pairs colored by the parity of their minimum."""

    c = Coloring(arity=2, palette=2, rule=lambda s: s[0] % 2)
    stream, color = infinite_ramsey_extract(c, NatStream.naturals(fuel), fuel)
    assert color == 0
    assert stream.materialize(8) == [0, 2, 4, 6, 8, 10, 12, 14]


def test_even_difference_gives_odds(fuel: Fuel) -> None:
    """Test pairs colored 1 when their difference is even."""

    c = Coloring(arity=2, palette=2, rule=lambda s: int((s[1] - s[0]) % 2 == 0))
    stream, color = infinite_ramsey_extract(c, NatStream.naturals(fuel), fuel)
    prefix = stream.materialize(24)
    assert color == 1
    assert prefix == list(range(1, 48, 2))
    assert check_witness(c, HomogeneityWitness(subset=tuple(prefix), color=color))


def test_finite_run_never_wins(fuel: Fuel) -> None:
    """Test that a color seen only in an initial run loses to the color that recurs."""

    step = Coloring(arity=1, palette=2, rule=lambda s: int(s[0] < 8))
    stream, color = infinite_ramsey_extract(step, NatStream.naturals(fuel), fuel)
    assert color == 0
    assert stream.materialize(4) == [8, 9, 10, 11]

    near = Coloring(arity=2, palette=2, rule=lambda s: int(s[1] <= s[0] + 12))
    stream, color = infinite_ramsey_extract(near, NatStream.naturals(fuel), fuel)
    prefix = stream.materialize(6)
    assert color == 0
    assert prefix == [0, 13, 26, 39, 52, 65]
    assert check_witness(near, HomogeneityWitness(subset=tuple(prefix), color=color))


def test_long_period_classes_stay_live(fuel: Fuel) -> None:
    """Test residues modulo a period longer than the window."""

    c = Coloring(arity=1, palette=10, rule=lambda s: s[0] % 10)
    stream, color = infinite_ramsey_extract(c, NatStream.naturals(fuel), fuel)
    assert color == 0
    assert stream.materialize(3) == [0, 10, 20]

    blocks = Coloring(arity=1, palette=2, rule=lambda s: (s[0] // 8) % 2)
    stream, color = infinite_ramsey_extract(blocks, NatStream.naturals(fuel), fuel)
    assert color == 0
    assert stream.materialize(10) == [0, 1, 2, 3, 4, 5, 6, 7, 16, 17]


def test_exhaustion_reports_live_runs() -> None:
    """Test the live run lengths kept when no color wins inside the budget."""

    fuel = Fuel(max_materialize=40)
    injective = Coloring(arity=1, palette=40, rule=lambda s: s[0])
    with pytest.raises(FuelExhausted) as err:
        infinite_ramsey_extract(injective, NatStream.naturals(fuel), fuel)
    assert err.value.live == dict.fromkeys(range(40), 1)
    assert err.value.prefix == tuple(range(40))


@st.composite
def affine_colorings(draw: st.DrawFn) -> tuple[str, int, int]:
    """Draw an expression (a0*x0 + ... + d) mod k, its arity and k."""
    arity: int = draw(st.integers(1, 3))
    colors: int = draw(st.integers(2, 3))
    coefficients = [draw(st.integers(0, colors - 1)) for _ in range(arity)]
    offset: int = draw(st.integers(0, colors - 1))
    terms = " + ".join(f"{a}*x{i}" for i, a in enumerate(coefficients))
    return f"({terms} + {offset}) mod {colors}", arity, colors


@settings(max_examples=200)
@given(affine_colorings())
def test_extraction_is_homogeneous(drawn: tuple[str, int, int]) -> None:
    """Test that every r-subset of the extracted prefix gets the returned color."""

    src, arity, colors = drawn
    coloring = parse(src, arity, FiniteDiscrete(colors)).as_coloring()
    fuel = Fuel(window=4)
    stream, color = infinite_ramsey_extract(coloring, NatStream.naturals(fuel), fuel)
    prefix = tuple(stream.materialize(24))
    assert all(coloring(s) == color for s in combinations(prefix, arity)), src


def test_almost_homogeneous_family(fuel: Fuel) -> None:
    """Test one stream serving a sequence of colorings up to finitely many elements."""

    family = [
        Coloring(arity=1, palette=2, rule=lambda s: s[0] % 2),
        Coloring(arity=1, palette=3, rule=lambda s: s[0] % 3),
    ]
    stream, witnesses = almost_homogeneous_family(family, NatStream.naturals(fuel), fuel, 10)
    assert stream.materialize(4) == [0, 6, 12, 18]
    assert [(w.color, w.discard_bound) for w in witnesses] == [(0, 0), (0, 1)]
    assert all(check_witness(c, w) for c, w in zip(family, witnesses, strict=True))
    assert witnesses[1].core == tuple(range(6, 60, 6))
    with pytest.raises(ValueError):
        almost_homogeneous_family([], NatStream.naturals(fuel), fuel)
    with pytest.raises(ValueError):
        almost_homogeneous_family([family[0], Coloring.constant(2)], NatStream.naturals(fuel), fuel)
