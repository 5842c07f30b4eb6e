"""Expression language for colorings and tuple functions, and the space descriptor parser."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any, Final

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from .convergence import TupleFunction
from .dyadic import pow2neg
from .errors import (
    ConfigError,
    EvaluationError,
    ExpressionSyntaxError,
    ExpressionTypeError,
    SpaceMismatch,
)
from .ramsey import Coloring
from .spaces import (
    INF,
    CantorDepth,
    FiniteDiscrete,
    OmegaPlusOne,
    Point,
    Product,
    Space,
    UnitCube,
)

_EXPRESSION_GRAMMAR: Final[str] = r"""
?start: expr

?expr: term
     | expr "+" term            -> add
     | expr "-" term            -> sub

?term: atom
     | term "*" atom            -> mul
     | term "mod" atom          -> mod

?atom: INT                      -> int_lit
     | VAR                      -> var
     | "inf"                    -> inf
     | "pow2neg" "(" expr ")"   -> pow2neg
     | MINMAX "(" expr "," expr ")" -> minmax
     | "(" expr ("," expr)* ")" -> paren
     | "if" "(" expr CMP expr "," expr "," expr ")" -> cond

MINMAX: "min" | "max"
CMP: "<=" | "≤" | "<" | "="
VAR: /x[0-9]+/

%import common.INT
%import common.WS
%ignore WS
"""

_SPACE_GRAMMAR: Final[str] = r"""
?space: "unit-cube" ":" INT                -> cube
      | "omega1"                           -> omega
      | "cantor"                           -> cantor
      | "discrete" ":" INT                 -> discrete
      | "product" "(" space ("," space)* ")" -> product
      | "power" "(" space ")"              -> power

%import common.INT
%import common.WS
%ignore WS
"""

_EXPRESSION_PARSER: Final[Lark] = Lark(_EXPRESSION_GRAMMAR, parser="lalr")
_SPACE_PARSER: Final[Lark] = Lark(_SPACE_GRAMMAR, start="space", parser="lalr")


@dataclass(frozen=True)
class IntLit:
    """Natural number literal."""

    value: int


@dataclass(frozen=True)
class Var:
    """x_i, the i-th element of the sorted input tuple."""

    index: int


@dataclass(frozen=True)
class InfLit:
    """The point at infinity of omega + 1."""


@dataclass(frozen=True)
class BinOp:
    """One of + - * mod."""

    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow2Neg:
    """2**-arg as a dyadic rational."""

    arg: "Expr"


@dataclass(frozen=True)
class MinMax:
    """min or max of two values."""

    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class TupleExpr:
    """Tuple of at least two components."""

    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Cond:
    """if(left cmp right, then, otherwise)."""

    left: "Expr"
    cmp: str
    right: "Expr"
    then: "Expr"
    otherwise: "Expr"


type Expr = IntLit | Var | InfLit | BinOp | Pow2Neg | MinMax | TupleExpr | Cond


class _AstBuilder(Transformer[Token, Expr]):
    """Turns parse trees into frozen AST nodes."""

    def int_lit(self, items: list[Token]) -> Expr:
        return IntLit(int(items[0]))

    def var(self, items: list[Token]) -> Expr:
        return Var(int(items[0][1:]))

    def inf(self, _items: list[Any]) -> Expr:
        return InfLit()

    def add(self, items: list[Expr]) -> Expr:
        return BinOp("+", items[0], items[1])

    def sub(self, items: list[Expr]) -> Expr:
        return BinOp("-", items[0], items[1])

    def mul(self, items: list[Expr]) -> Expr:
        return BinOp("*", items[0], items[1])

    def mod(self, items: list[Expr]) -> Expr:
        return BinOp("mod", items[0], items[1])

    def pow2neg(self, items: list[Expr]) -> Expr:
        return Pow2Neg(items[0])

    def minmax(self, items: list[Any]) -> Expr:
        return MinMax(str(items[0]), items[1], items[2])

    def paren(self, items: list[Expr]) -> Expr:
        return items[0] if len(items) == 1 else TupleExpr(tuple(items))

    def cond(self, items: list[Any]) -> Expr:
        cmp: str = "<=" if str(items[1]) == "≤" else str(items[1])
        return Cond(items[0], cmp, items[2], items[3], items[4])


def parse_ast(src: str) -> Expr:
    """Parse without type checking."""
    if not src.strip():
        raise ExpressionSyntaxError("empty expression", 1)
    try:
        tree = _EXPRESSION_PARSER.parse(src)
    except UnexpectedInput as err:
        position: int
        if isinstance(err, UnexpectedEOF) or (
            isinstance(err, UnexpectedToken) and err.token.type == "$END"
        ):
            position = len(src) + 1
        else:
            position = (err.pos_in_stream or 0) + 1
        raise ExpressionSyntaxError(f"unexpected input in {src!r}", position) from err
    return _AstBuilder().transform(tree)


def unparse(node: Expr) -> str:
    """Pretty-print with every binary operation parenthesized."""
    match node:
        case IntLit(value):
            return str(value)
        case Var(index):
            return f"x{index}"
        case InfLit():
            return "inf"
        case BinOp(op, left, right):
            return f"({unparse(left)} {op} {unparse(right)})"
        case Pow2Neg(arg):
            return f"pow2neg({unparse(arg)})"
        case MinMax(op, left, right):
            return f"{op}({unparse(left)}, {unparse(right)})"
        case TupleExpr(items):
            return f"({', '.join(unparse(item) for item in items)})"
        case Cond(left, cmp, right, then, otherwise):
            return (
                f"if({unparse(left)} {cmp} {unparse(right)}, "
                f"{unparse(then)}, {unparse(otherwise)})"
            )
    raise TypeError(f"not an expression node: {node!r}")


class Scalar(Enum):
    """Value sorts; INT is contained in both DYADIC and OMEGA."""

    INT = "integer"
    DYADIC = "dyadic"
    OMEGA = "omega"


type Kind = Scalar | tuple[Kind, ...]


def _join(a: Kind, b: Kind) -> Kind:
    if a == b:
        return a
    if isinstance(a, tuple) and isinstance(b, tuple):
        if len(a) != len(b):
            raise ExpressionTypeError(f"tuples of length {len(a)} and {len(b)} do not mix")
        return tuple(_join(x, y) for x, y in zip(a, b, strict=True))
    if Scalar.INT in (a, b) and not isinstance(a, tuple) and not isinstance(b, tuple):
        return b if a is Scalar.INT else a
    raise ExpressionTypeError(f"{_show(a)} and {_show(b)} do not mix")


def _show(kind: Kind) -> str:
    if isinstance(kind, tuple):
        return f"({', '.join(_show(k) for k in kind)})"
    return kind.value


def _numeric(kind: Kind, where: str) -> Scalar:
    if kind not in (Scalar.INT, Scalar.DYADIC):
        raise ExpressionTypeError(f"{where} needs a number, got {_show(kind)}")
    return kind  # type: ignore[return-value]


def type_of(node: Expr, arity: int) -> Kind:
    """Return the kind of node, raising ExpressionTypeError if it has none."""
    match node:
        case IntLit():
            return Scalar.INT
        case Var(index):
            if index >= arity:
                raise ExpressionTypeError(f"x{index} used with arity {arity}")
            return Scalar.INT
        case InfLit():
            return Scalar.OMEGA
        case BinOp("mod", left, right):
            if type_of(left, arity) is not Scalar.INT or type_of(right, arity) is not Scalar.INT:
                raise ExpressionTypeError("mod needs integers")
            if right == IntLit(0):
                raise ExpressionTypeError("modulus by the literal 0")
            return Scalar.INT
        case BinOp(op, left, right):
            kinds: set[Scalar] = {
                _numeric(type_of(left, arity), op),
                _numeric(type_of(right, arity), op),
            }
            return Scalar.DYADIC if Scalar.DYADIC in kinds else Scalar.INT
        case Pow2Neg(arg):
            if type_of(arg, arity) is not Scalar.INT:
                raise ExpressionTypeError("pow2neg needs an integer")
            return Scalar.DYADIC
        case MinMax(op, left, right):
            joined: Kind = _join(type_of(left, arity), type_of(right, arity))
            if isinstance(joined, tuple):
                raise ExpressionTypeError(f"{op} needs scalars")
            return joined
        case TupleExpr(items):
            return tuple(type_of(item, arity) for item in items)
        case Cond(left, _cmp, right, then, otherwise):
            compared: Kind = _join(type_of(left, arity), type_of(right, arity))
            if isinstance(compared, tuple):
                raise ExpressionTypeError("comparisons need scalars")
            return _join(type_of(then, arity), type_of(otherwise, arity))
    raise TypeError(f"not an expression node: {node!r}")


def _fits(kind: Kind, space: Space) -> bool:
    match space:
        case UnitCube(dimension=1) if not isinstance(kind, tuple):
            return kind in (Scalar.INT, Scalar.DYADIC)
        case UnitCube(dimension=d):
            return (
                isinstance(kind, tuple)
                and len(kind) == d
                and all(k in (Scalar.INT, Scalar.DYADIC) for k in kind)
            )
        case OmegaPlusOne():
            return kind in (Scalar.INT, Scalar.OMEGA)
        case FiniteDiscrete():
            return kind is Scalar.INT
        case Product() if isinstance(kind, tuple):
            if not space.countable and len(kind) != len(space.factors):
                return False
            return all(_fits(k, space.coordinate_space(i)) for i, k in enumerate(kind))
    return False


def _order_key(value: Any) -> tuple[int, Any]:
    return (1, 0) if value is INF else (0, value)


def _evaluate(node: Expr, s: Sequence[int]) -> Any:
    match node:
        case IntLit(value):
            return value
        case Var(index):
            return s[index]
        case InfLit():
            return INF
        case BinOp("mod", left, right):
            divisor: int = _evaluate(right, s)
            if divisor == 0:
                raise EvaluationError(f"modulus by zero in {unparse(node)} at {list(s)}")
            return _evaluate(left, s) % divisor
        case BinOp(op, left, right):
            a, b = _evaluate(left, s), _evaluate(right, s)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            return a * b
        case Pow2Neg(arg):
            return pow2neg(_evaluate(arg, s))
        case MinMax(op, left, right):
            pick = min if op == "min" else max
            return pick(_evaluate(left, s), _evaluate(right, s), key=_order_key)
        case TupleExpr(items):
            return tuple(_evaluate(item, s) for item in items)
        case Cond(left, cmp, right, then, otherwise):
            a, b = _order_key(_evaluate(left, s)), _order_key(_evaluate(right, s))
            holds: bool = a < b if cmp == "<" else a <= b if cmp == "<=" else a == b
            return _evaluate(then if holds else otherwise, s)
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class Expression:
    """Type-checked expression over x0 < ... < x_{r-1} with values in target."""

    source: str
    ast: Expr
    arity: int
    target: Space
    kind: Kind

    def evaluate(self, s: Sequence[int]) -> Point:
        """Evaluate on a sorted tuple and coerce into the target space."""
        if len(s) != self.arity:
            raise EvaluationError(f"expected {self.arity} arguments, got {len(s)}")
        value: Any = _evaluate(self.ast, s)
        try:
            return self.target.coerce(value)
        except SpaceMismatch as err:
            raise EvaluationError(
                f"{self.source!r} at {list(s)} leaves {self.target.descriptor}: {err}"
            ) from err

    def as_function(self, name: str | None = None) -> TupleFunction:
        """Return the expression as a tuple function."""
        return TupleFunction(
            arity=self.arity, target=self.target, rule=self.evaluate, name=name or self.source
        )

    def as_coloring(self) -> Coloring:
        """Return the expression as a coloring of a discrete target."""
        return self.as_function().as_coloring()


def parse(src: str, arity: int, target: Space) -> Expression:
    """Parse and type-check src against the shape of target's points."""
    if arity < 1:
        raise ExpressionTypeError("expressions need arity >= 1")
    if isinstance(target, CantorDepth):
        raise ExpressionTypeError("expressions cannot produce Cantor points")
    ast: Expr = parse_ast(src)
    kind: Kind = type_of(ast, arity)
    if not _fits(kind, target):
        raise ExpressionTypeError(f"{_show(kind)} does not fit {target.descriptor}")
    return Expression(source=src, ast=ast, arity=arity, target=target, kind=kind)


class _SpaceBuilder(Transformer[Token, Space]):
    """Turns descriptor trees into spaces."""

    def cube(self, items: list[Token]) -> Space:
        return UnitCube(int(items[0]))

    def omega(self, _items: list[Any]) -> Space:
        return OmegaPlusOne()

    def cantor(self, _items: list[Any]) -> Space:
        return CantorDepth()

    def discrete(self, items: list[Token]) -> Space:
        return FiniteDiscrete(int(items[0]))

    def product(self, items: list[Space]) -> Space:
        return Product(tuple(items))

    def power(self, items: list[Space]) -> Space:
        return Product.power(items[0])


def parse_space(descriptor: str) -> Space:
    """Return the space named by a descriptor such as 'product(omega1,unit-cube:1)'."""
    try:
        return _SpaceBuilder().transform(_SPACE_PARSER.parse(descriptor))
    except UnexpectedInput as err:
        raise ConfigError(f"malformed space descriptor {descriptor!r}") from err
    except VisitError as err:
        raise ConfigError(f"invalid space {descriptor!r}: {err.orig_exc}") from err

