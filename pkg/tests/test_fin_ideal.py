"""Test splitting trees, avoidance and smallness extraction."""

from itertools import combinations, product
from math import comb

from hypothesis import given, settings, strategies as st
import pytest

from topo_ramsey.dsl import parse
from topo_ramsey.errors import DimensionMismatch, EvaluationError, InsufficientLength
from topo_ramsey.fin_ideal import (
    SplittingTree,
    TupleSet,
    check_avoidance,
    fin_small_extract,
    g_function,
    has_splitting_tree,
    is_small,
    mad_diagnostic,
    up_arrow,
    validate_tree,
)
from topo_ramsey.spaces import OmegaPlusOne, Product, UnitCube
from topo_ramsey.streams import Fuel, NatStream

GRID: list[tuple[int, int]] = list(product(range(3), repeat=2))


def _omega(n: int) -> Product:
    return Product((OmegaPlusOne(),) * n)


def _brute_force_tree(x: TupleSet, b: int) -> bool:
    return any(
        all((h, t) in x for h, tails in zip(heads, choice, strict=True) for t in tails)
        for heads in combinations(range(3), b)
        for choice in product(combinations(range(3), b), repeat=b)
    )


def test_grid_carries_a_tree() -> None:
    """Test the least tree of a full grid."""

    tree = has_splitting_tree(TupleSet.of(product(range(2), repeat=2)), 2)
    assert tree is not None
    assert tree.nodes == {(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)}
    assert tree.leaves == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert tree.children(()) == [(0,), (1,)]


def test_small_sets() -> None:
    """Test sets without 2-splitting trees."""

    column = TupleSet.of((0, k) for k in range(10))
    diagonal = TupleSet.of((i, i) for i in range(10))
    assert has_splitting_tree(column, 2) is None
    assert has_splitting_tree(diagonal, 2) is None
    assert is_small(diagonal, 2)
    assert not is_small(TupleSet.of([(0,), (5,)]), 2)
    with pytest.raises(ValueError):
        has_splitting_tree(column, 0)


@pytest.mark.parametrize("b", [2, 3])
def test_all_subsets_of_the_3x3_grid(b: int) -> None:
    """Test the tree search against brute force on all 512 subsets."""

    for mask in range(2 ** len(GRID)):
        x = TupleSet(2, frozenset(t for i, t in enumerate(GRID) if mask >> i & 1))
        tree = has_splitting_tree(x, b)
        assert (tree is not None) == _brute_force_tree(x, b), sorted(x.elements)
        if tree is not None:
            assert validate_tree(tree, x)


def test_validate_tree_rejects_broken_trees() -> None:
    """Test each way a node set can fail to be a splitting tree."""

    x = TupleSet.of(product(range(2), repeat=2))
    good = SplittingTree(2, 2, frozenset({(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)}))
    assert validate_tree(good, x)
    assert not validate_tree(SplittingTree(2, 2, good.nodes - {()}), x)
    assert not validate_tree(SplittingTree(2, 2, good.nodes - {(1, 1)}), x)
    assert not validate_tree(SplittingTree(2, 2, good.nodes - {(1,)}), x)
    assert not validate_tree(SplittingTree(2, 2, good.nodes | {(0, 2)}), x)
    assert not validate_tree(SplittingTree(2, 1, frozenset({(), (0,), (1,)})), x)
    assert not validate_tree(SplittingTree(0, 2, good.nodes))


def test_tuple_sets() -> None:
    """Test tuple set helpers."""

    x = TupleSet.of([(2, 5), (1, 7), (2, 3)])
    assert list(x) == [(1, 7), (2, 3), (2, 5)]
    assert x.heads() == [1, 2]
    assert x.section(2).elements == {(3,), (5,)}
    assert len(x) == 3
    assert (1, 7) in x
    with pytest.raises(DimensionMismatch):
        TupleSet.of([(1,), (1, 2)])
    with pytest.raises(DimensionMismatch):
        TupleSet.of([])
    assert len(TupleSet.of([], dimension=2)) == 0


def test_up_arrow() -> None:
    """Test increasing tuples of a list."""

    assert up_arrow([0, 1, 2], 2).elements == {(0, 1), (0, 2), (1, 2)}
    assert up_arrow([5], 1).elements == {(5,)}
    assert len(up_arrow(range(6), 3)) == 20
    with pytest.raises(ValueError):
        up_arrow([2, 1], 1)


@given(st.sets(st.integers(0, 30), max_size=10), st.integers(1, 4))
def test_up_arrow_counts(b: set[int], n: int) -> None:
    """Test that |B^[n]| = C(|B|, n)."""

    assert len(up_arrow(sorted(b), n)) == comb(len(b), n)


def test_avoidance() -> None:
    """Test avoidance above a cut."""

    assert check_avoidance(TupleSet.of([], dimension=2), [0, 1, 2], 0)
    a = TupleSet.of([(2, 3)])
    assert not check_avoidance(a, [0, 1, 2, 3], 0)
    assert check_avoidance(a, [0, 1, 2, 3], 3)
    assert check_avoidance(a, [0, 1, 3], 0)
    with pytest.raises(DimensionMismatch):
        check_avoidance(a, [0, 1], 0, arity=3)


@given(
    st.sets(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=6),
    st.sets(st.integers(0, 9)),
    st.integers(0, 9),
)
def test_avoidance_is_monotone_in_the_cut(
    pairs: set[tuple[int, int]], b: set[int], cut: int
) -> None:
    """Test that avoiding above n implies avoiding above n + 1."""

    a = TupleSet(2, frozenset(pairs))
    if check_avoidance(a, sorted(b), cut):
        assert check_avoidance(a, sorted(b), cut + 1)


def test_mad_diagnostic() -> None:
    """Test splitting trees inside the increasing pairs of short lists."""

    tree = mad_diagnostic(list(range(8)), 1)
    assert (tree.branching, tree.depth) == (4, 2)
    assert tree.children(()) == [(0,), (1,), (2,), (3,)]
    assert validate_tree(tree, up_arrow(range(8), 2))
    assert mad_diagnostic(list(range(6)), 1).branching == 3
    triple = mad_diagnostic(list(range(0, 18, 2)), 2)
    assert (triple.branching, triple.depth) == (3, 3)
    assert validate_tree(triple, up_arrow(range(0, 18, 2), 3))
    with pytest.raises(InsufficientLength):
        mad_diagnostic([0, 1], 1)
    with pytest.raises(ValueError):
        mad_diagnostic([3, 2, 1, 0], 1)


@settings(max_examples=20)
@given(st.sets(st.integers(0, 199), min_size=24, max_size=24))
def test_mad_diagnostic_on_random_lists(b: set[int]) -> None:
    """Test the 12-splitting tree inside the pairs of 24 elements."""

    ordered = sorted(b)
    tree = mad_diagnostic(ordered, 1)
    assert tree.branching == 12
    assert validate_tree(tree, up_arrow(ordered, 2))


def test_g_function() -> None:
    """Test the increasing enumeration maps."""

    assert g_function(1)((3, 5)) == (3, 5)
    assert g_function(2)((1, 4, 9)) == (1, 4, 9)
    assert g_function(2).target == _omega(3)
    with pytest.raises(ValueError):
        g_function(0)


@pytest.mark.parametrize(
    ("src", "case", "column", "prefix"),
    [
        ("(0, x0)", "column", 0, tuple(range(20))),
        ("(x0, x0 * x0)", "partial function", None, tuple(range(20))),
        ("(x0 mod 2, x0)", "column", 0, tuple(range(0, 40, 2))),
        ("(min(x0, 3), 7)", "column", 3, tuple(range(3, 23))),
        ("(x0 mod 10, x0)", "column", 0, tuple(range(0, 200, 10))),
    ],
)
def test_small_unary(
    src: str, case: str, column: int | None, prefix: tuple[int, ...], fuel: Fuel
) -> None:
    """Test the column and partial function cases."""

    f = parse(src, 1, _omega(2)).as_function()
    report = fin_small_extract(f, NatStream.naturals(fuel), fuel)
    assert (report.case, report.column, report.prefix) == (case, column, prefix)
    assert report.tree is None
    assert report.pinned is None


@st.composite
def unary_functions(draw: st.DrawFn) -> str:
    """Draw a map k -> (u(k), v(k)) with u eventually constant, periodic or injective."""
    a: int = draw(st.integers(1, 4))
    c: int = draw(st.integers(0, 6))
    m: int = draw(st.integers(1, 5))
    head: str = draw(
        st.sampled_from(
            [f"({a}*x0 + {c}) mod {m}", f"{a}*x0 + {c}", f"min(x0, {c})", f"{c}"]
        )
    )
    tail: str = draw(st.sampled_from(["x0", f"x0 * {a}", f"x0 mod {m}", f"{c}"]))
    return f"({head}, {tail})"


@settings(max_examples=50)
@given(unary_functions())
def test_small_unary_images_have_no_tree(src: str) -> None:
    """Test that a thinned unary image never carries a 2-splitting tree."""

    fuel = Fuel()
    f = parse(src, 1, _omega(2)).as_function()
    report = fin_small_extract(f, NatStream.naturals(fuel), fuel)
    assert report.case in ("column", "partial function")
    assert len(report.prefix) == 20
    assert report.tree is None
    assert has_splitting_tree(report.image, 2) is None


@pytest.mark.parametrize(
    ("src", "case", "pinned"),
    [
        ("(x0, x1, x0 + x1)", "unbounded", None),
        ("(x0, 1, x0 + x1)", "pinned", (1, 1)),
    ],
)
def test_small_pairs(src: str, case: str, pinned: tuple[int, int] | None) -> None:
    """Test the anchored construction for pairs."""

    fuel = Fuel(window=4)
    f = parse(src, 2, _omega(3)).as_function()
    report = fin_small_extract(f, NatStream.naturals(fuel), fuel, length=8, level=3)
    assert (report.case, report.pinned) == (case, pinned)
    assert report.certificate is not None
    assert len(report.prefix) == 8
    assert report.tree is None


def test_smallness_input_checks(fuel: Fuel) -> None:
    """Test shape and value checks."""

    unit = parse("pow2neg(x0)", 1, UnitCube(1)).as_function()
    too_wide = parse("(x0, x0, x0)", 1, _omega(3)).as_function()
    for f in (unit, too_wide):
        with pytest.raises(DimensionMismatch):
            fin_small_extract(f, NatStream.naturals(fuel), fuel)
    infinite = parse("(inf, x0)", 1, _omega(2)).as_function()
    with pytest.raises(EvaluationError):
        fin_small_extract(infinite, NatStream.naturals(fuel), fuel)
