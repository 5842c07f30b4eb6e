"""Command-line front end."""

import argparse
from collections.abc import Sequence
from dataclasses import replace
import logging
from pathlib import Path
import sys
from typing import Any, NoReturn

from .codec import (
    certificate_from_dict,
    certificate_to_dict,
    dumps,
    encode_point,
    loads,
    nice_to_dict,
)
from .config import RunConfig, load_config, resolve_function
from .const import (
    DEFAULT_LENGTH,
    DEFAULT_PIN_LEVEL,
    DEFAULT_SMALL_LENGTH,
    ENGINES,
    EXIT_FUEL,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    LOGGER,
    RECURSION_LIMIT,
)
from .convergence import (
    ConvergenceCertificate,
    LocatedLimit,
    TupleFunction,
    extract_convergent,
    verify_certificate,
)
from .dsl import parse, parse_space
from .engines import extract_nice, extract_product, inductive_extract
from .errors import ConfigError, FuelExhausted, RamseyError, UnknownFixture
from .fin_ideal import (
    SplittingTree,
    TupleSet,
    check_avoidance,
    fin_small_extract,
    has_splitting_tree,
    mad_diagnostic,
)
from .fixtures import FIXTURE_TYPES, builtin
from .ramsey import find_homogeneous_exact, infinite_ramsey_extract
from .spaces import FiniteDiscrete, OmegaPlusOne, Product, Space
from .streams import Fuel, parse_base


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors as ConfigError."""

    def error(self, message: str) -> NoReturn:
        """Raise instead of exiting with status 2."""
        raise ConfigError(message)


def _add_function(parser: argparse.ArgumentParser, *, space: bool = True) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--fixture", help="builtin fixture name, e.g. min-decay or lift-of(mad-pair)")
    source.add_argument("--dsl", help="expression over x0 < x1 < ...")
    parser.add_argument("--arity", type=int)
    if space:
        parser.add_argument("--space", help="space descriptor, e.g. product(omega1,omega1)")


def _add_fuel(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--base", help="base stream: naturals, evens, odds, arith:A:D, above:K")
    parser.add_argument("--max-materialize", type=int, dest="max_materialize")
    parser.add_argument("--max-oracle-calls", type=int, dest="max_oracle_calls")
    parser.add_argument("--window", type=int, help="pigeonhole window (a live run of 2 * window hits wins)")


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the topo-ramsey command."""
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    common.add_argument("--output", help="write JSON here instead of standard output")

    parser = _Parser(
        prog="topo-ramsey",
        description="Certified convergent subsequences for functions on r-sets of naturals.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser("extract", parents=[common], help="extract a convergent subsequence")
    _add_function(extract)
    _add_fuel(extract)
    extract.add_argument("--levels", type=int, help="max level L")
    extract.add_argument("--length", type=int, help="certified prefix length")
    extract.add_argument("--engine", choices=ENGINES)
    extract.add_argument("--seed", type=int)
    extract.add_argument("--config", help="JSON file with the same keys as the flags")

    verify = commands.add_parser("verify", parents=[common], help="verify a certificate")
    verify.add_argument("certificate", help="certificate JSON file")
    _add_function(verify)

    fin = commands.add_parser("fin", help="finite smallness checks")
    fin_commands = fin.add_subparsers(dest="fin_command", required=True)
    tree = fin_commands.add_parser("tree", parents=[common], help="search a splitting tree")
    tree.add_argument("--set", dest="tuples", required=True, help="JSON list of tuples")
    tree.add_argument("--b", type=int, default=2, dest="branching")
    small = fin_commands.add_parser("small", parents=[common], help="thin to a small image")
    _add_function(small, space=False)
    _add_fuel(small)
    small.add_argument("--b", type=int, default=2, dest="branching")
    small.add_argument("--length", type=int, default=DEFAULT_SMALL_LENGTH)
    small.add_argument("--level", type=int, default=DEFAULT_PIN_LEVEL)
    avoid = fin_commands.add_parser("avoid", parents=[common], help="check avoidance of B above a cut")
    avoid.add_argument("--a", dest="tuples", required=True, help="JSON list of tuples")
    avoid.add_argument("--b-set", dest="b_set", required=True, help="JSON list of naturals")
    avoid.add_argument("--cut", type=int, required=True)
    avoid.add_argument("--dimension", type=int)
    mad = fin_commands.add_parser("mad", parents=[common], help="splitting tree inside B's increasing tuples")
    mad.add_argument("--b-set", dest="b_set", required=True, help="JSON list of naturals")
    mad.add_argument("--r", type=int, default=1)

    ramsey = commands.add_parser("ramsey", parents=[common], help="homogeneous sets of a coloring")
    ramsey.add_argument("--dsl", required=True, help="coloring expression")
    ramsey.add_argument("--arity", type=int, required=True)
    ramsey.add_argument("--colors", type=int, default=2)
    ramsey.add_argument("--exact", type=int, metavar="N", help="search [0, N) exhaustively")
    ramsey.add_argument("--size", type=int, default=3)
    ramsey.add_argument("--length", type=int, default=DEFAULT_LENGTH)
    _add_fuel(ramsey)

    fixtures = commands.add_parser("fixtures", help="builtin functions")
    fixture_commands = fixtures.add_subparsers(dest="fixture_command", required=True)
    fixture_commands.add_parser("list", parents=[common])
    show = fixture_commands.add_parser("show", parents=[common])
    show.add_argument("name")
    show.add_argument("--on", required=True, help="JSON list: the sorted tuple")
    show.add_argument("--arity", type=int)
    return parser


def _emit(data: Any, output: str | None) -> None:
    text: str = dumps(data)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fuel(args: argparse.Namespace) -> Fuel:
    return load_config({"command": args.command, **vars(args)}).fuel


def run_extract(cfg: RunConfig) -> dict[str, Any]:
    """Run the configured engine and return the certificate JSON object."""
    f: TupleFunction = cfg.function()
    base = cfg.base_stream()
    LOGGER.info("extracting %s (arity %d) into %s with the %s engine", f.name, f.arity, f.target, cfg.engine)
    match cfg.engine:
        case "inductive":
            cert = inductive_extract(f, base, cfg.levels, cfg.fuel, cfg.length)
            return certificate_to_dict(cert, cfg.source)
        case "product":
            cert, coordinates = extract_product(f, base, cfg.levels, cfg.fuel, cfg.length)
            return certificate_to_dict(
                cert,
                cfg.source,
                coordinates=[
                    certificate_to_dict(c, f"{cfg.source}.{i}") for i, c in enumerate(coordinates)
                ],
            )
        case "nice":
            return nice_to_dict(extract_nice(f, base, cfg.levels, cfg.fuel, cfg.length), cfg.source)
    cert = extract_convergent(f, base, cfg.levels, cfg.fuel, cfg.length)
    return certificate_to_dict(cert, cfg.source)


def _cmd_extract(args: argparse.Namespace) -> int:
    cfg: RunConfig = load_config({"command": "extract", **vars(args)}, args.config)
    try:
        data: dict[str, Any] = run_extract(cfg)
    except FuelExhausted as err:
        f: TupleFunction = cfg.function()
        partial: ConvergenceCertificate | None = err.partial
        if partial is None or (partial.arity, partial.space) != (f.arity, f.target):
            # coordinate and section engines fail inside a derived function
            partial = ConvergenceCertificate(
                arity=f.arity,
                space=f.target,
                prefix=err.prefix,
                limit=LocatedLimit(()),
                thresholds=(),
                fuel_report=cfg.fuel.as_dict(),
                partial=True,
            )
        LOGGER.warning("fuel exhausted, writing a partial certificate: %s", err)
        _emit(
            certificate_to_dict(replace(partial, engine=cfg.engine, partial=True), cfg.source),
            cfg.output,
        )
        return EXIT_FUEL
    _emit(data, cfg.output)
    return EXIT_OK


def _verify_function(args: argparse.Namespace, data: dict[str, Any], space: Space) -> TupleFunction:
    arity: int = args.arity or data["arity"]
    target: Space = parse_space(args.space) if args.space else space
    if args.fixture or args.dsl:
        return resolve_function(args.fixture, args.dsl, arity, target)
    if not (name := data.get("function")):
        raise ConfigError("certificate names no function; pass --fixture or --dsl")
    try:
        return resolve_function(name, None, arity, target)
    except UnknownFixture:
        return parse(name, arity, target).as_function()


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        text: str = Path(args.certificate).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read {args.certificate}: {err}") from err
    data: Any = loads(text)
    cert: ConvergenceCertificate = certificate_from_dict(data)
    f: TupleFunction = _verify_function(args, data, cert.space)
    report = verify_certificate(f, cert)
    result: dict[str, Any] = report.as_dict()
    if report and isinstance(coordinates := data.get("coordinates"), list):
        for i, coordinate in enumerate(coordinates):
            if not (sub := verify_certificate(f.project(i), certificate_from_dict(coordinate))):
                result = {**sub.as_dict(), "coordinate": i}
                break
    _emit(result, args.output)
    if not result["ok"]:
        LOGGER.warning("verification failed: %s", result["reason"])
        return EXIT_VERIFY
    return EXIT_OK


def _tuples(text: str) -> list[tuple[int, ...]]:
    rows: Any = loads(text)
    if not isinstance(rows, list) or not all(
        isinstance(row, list) and all(isinstance(x, int) and x >= 0 for x in row) for row in rows
    ):
        raise ConfigError("expected a JSON list of lists of naturals")
    return [tuple(row) for row in rows]


def _naturals(text: str) -> list[int]:
    values: Any = loads(text)
    if not isinstance(values, list) or not all(isinstance(x, int) and x >= 0 for x in values):
        raise ConfigError("expected a JSON list of naturals")
    return values


def _tree_to_dict(tree: SplittingTree) -> dict[str, Any]:
    return {
        "branching": tree.branching,
        "depth": tree.depth,
        "nodes": [list(node) for node in sorted(tree.nodes)],
    }


def _cmd_fin(args: argparse.Namespace) -> int:
    match args.fin_command:
        case "tree":
            tree = has_splitting_tree(TupleSet.of(_tuples(args.tuples)), args.branching)
            _emit(_tree_to_dict(tree) if tree else "none", args.output)
        case "avoid":
            rows: list[tuple[int, ...]] = _tuples(args.tuples)
            a = TupleSet.of(rows, args.dimension or (len(rows[0]) if rows else 1))
            _emit({"avoids": check_avoidance(a, sorted(_naturals(args.b_set)), args.cut)}, args.output)
        case "mad":
            _emit(_tree_to_dict(mad_diagnostic(sorted(_naturals(args.b_set)), args.r)), args.output)
        case "small":
            n: int = args.arity or 1
            target: Product = Product((OmegaPlusOne(),) * (n + 1))
            f: TupleFunction = resolve_function(args.fixture, args.dsl, n, target)
            fuel: Fuel = _fuel(args)
            report = fin_small_extract(
                f, parse_base(args.base or "naturals", fuel), fuel, args.branching, args.length, args.level
            )
            _emit(
                {
                    "case": report.case,
                    "column": report.column,
                    "pinned": list(report.pinned) if report.pinned else None,
                    "stream_prefix": list(report.prefix),
                    "tree": _tree_to_dict(report.tree) if report.tree else None,
                },
                args.output,
            )
    return EXIT_OK


def _cmd_ramsey(args: argparse.Namespace) -> int:
    coloring = parse(args.dsl, args.arity, FiniteDiscrete(args.colors)).as_coloring()
    if args.exact is not None:
        witness = find_homogeneous_exact(coloring, args.exact, args.size)
        _emit(
            {"subset": list(witness.subset), "color": witness.color} if witness else None,
            args.output,
        )
        return EXIT_OK
    fuel: Fuel = _fuel(args)
    stream, color = infinite_ramsey_extract(coloring, parse_base(args.base or "naturals", fuel), fuel)
    _emit({"color": color, "stream_prefix": stream.materialize(args.length)}, args.output)
    return EXIT_OK


def _cmd_fixtures(args: argparse.Namespace) -> int:
    if args.fixture_command == "list":
        _emit(
            [
                {
                    "key": fixture.key,
                    "arity": fixture.arity,
                    "space": fixture.target.descriptor,
                    "variadic": fixture.variadic,
                    "description": fixture.description,
                }
                for fixture in FIXTURE_TYPES
            ],
            args.output,
        )
        return EXIT_OK
    on: tuple[int, ...] = tuple(_naturals(args.on))
    f: TupleFunction = builtin(args.name).function(args.arity or len(on))
    _emit({"value": encode_point(f.target, f(on))}, args.output)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), RECURSION_LIMIT))
    logging.basicConfig(
        format="%(levelname)s: %(message)s",
        level=logging.DEBUG if {"-v", "--verbose"} & set(argv) else logging.WARNING,
    )
    try:
        args: argparse.Namespace = build_parser().parse_args(argv)
        match args.command:
            case "extract":
                return _cmd_extract(args)
            case "verify":
                return _cmd_verify(args)
            case "fin":
                return _cmd_fin(args)
            case "ramsey":
                return _cmd_ramsey(args)
        return _cmd_fixtures(args)
    except FuelExhausted as err:
        LOGGER.error("fuel exhausted: %s", err)
        return EXIT_FUEL
    except (RamseyError, ValueError) as err:
        LOGGER.error("%s", err)
        return EXIT_USAGE
