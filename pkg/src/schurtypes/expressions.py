"""Schur-type expressions: syntax tree, parser, degree, rank and canonical bases.

The surface language is

    expr    := product ( "(+)" product )*
    product := factor ( "(x)" factor )*
    factor  := atom [ "^(x)" nat ]
    atom    := "M" | ("S" | "W" | "T") "^" nat "(" expr ")" | "(" expr ")"

``T^r(e)`` and ``e^(x)r`` both expand to an r-fold tensor product of
copies of ``e``. Direct sums are only allowed at the top level.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from typing import Union


class SchurSyntaxError(ValueError):
    """Raised for malformed Schur expressions."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Base:
    """The free module itself."""


@dataclass(frozen=True)
class Sym:
    r: int
    child: "SchurExpr"

    def __post_init__(self) -> None:
        _check_power(self.r, "S")
        _check_not_sum(self.child)


@dataclass(frozen=True)
class Wedge:
    r: int
    child: "SchurExpr"

    def __post_init__(self) -> None:
        _check_power(self.r, "W")
        _check_not_sum(self.child)


@dataclass(frozen=True)
class TensorProduct:
    children: tuple["SchurExpr", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("A tensor product needs at least two factors")
        for child in self.children:
            _check_not_sum(child)


@dataclass(frozen=True)
class DirectSum:
    summands: tuple["SchurExpr", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "summands", tuple(self.summands))
        if len(self.summands) < 2:
            raise ValueError("A direct sum needs at least two summands")
        for summand in self.summands:
            _check_not_sum(summand)


SchurExpr = Union[Base, Sym, Wedge, TensorProduct]
TensorModule = Union[SchurExpr, DirectSum]


def _check_power(r: int, symbol: str) -> None:
    if not isinstance(r, int) or r < 1:
        raise ValueError(f"{symbol}^{r} needs a positive power")


def _check_not_sum(expr: object) -> None:
    if isinstance(expr, DirectSum):
        raise ValueError("Direct sums are only allowed at the top level")
    if not isinstance(expr, (Base, Sym, Wedge, TensorProduct)):
        raise TypeError(f"Not a Schur expression: {expr!r}")


def tensor_power(expr: SchurExpr, r: int) -> SchurExpr:
    """The r-fold tensor product of copies of ``expr``."""
    _check_power(r, "T")
    if r == 1:
        return expr
    return TensorProduct((expr,) * r)


def expression_summands(expr: TensorModule) -> tuple[SchurExpr, ...]:
    if isinstance(expr, DirectSum):
        return expr.summands
    return (expr,)


_TOKEN_PATTERN = re.compile(
    r"""\s*(?:
        (?P<tpow>\^\s*\(\s*x\s*\))
      | (?P<tensor>\(\s*x\s*\))
      | (?P<sum>\(\s*\+\s*\))
      | (?P<nat>\d+)
      | (?P<letter>[MSWT])
      | (?P<punct>[\^()])
    )""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        if not text[position:].strip():
            break
        match = _TOKEN_PATTERN.match(text, position)
        if match is None:
            offset = len(text) - len(text[position:].lstrip())
            raise SchurSyntaxError(f"Unexpected character {text[offset]!r}", offset)
        kind = match.lastgroup or "punct"
        token_text = match.group(kind)
        if kind == "punct":
            kind = token_text
        tokens.append(_Token(kind, token_text, match.start(match.lastgroup or "punct")))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def advance(self) -> _Token:
        token = self.peek()
        if token is None:
            raise SchurSyntaxError("Unexpected end of expression", len(self.text))
        self.index += 1
        return token

    def expect(self, kind: str) -> _Token:
        token = self.advance()
        if token.kind != kind:
            raise SchurSyntaxError(f"Expected {kind!r}, found {token.text!r}", token.position)
        return token

    def nat(self) -> int:
        token = self.expect("nat")
        value = int(token.text)
        if value < 1:
            raise SchurSyntaxError("Powers must be positive", token.position)
        return value

    def parse(self) -> TensorModule:
        if not self.tokens:
            raise SchurSyntaxError("Empty expression", 0)
        expr = self.expression(top_level=True)
        leftover = self.peek()
        if leftover is not None:
            raise SchurSyntaxError(f"Unexpected {leftover.text!r}", leftover.position)
        return expr

    def expression(self, *, top_level: bool) -> TensorModule:
        summands = [self.product()]
        while (token := self.peek()) is not None and token.kind == "sum":
            if not top_level:
                raise SchurSyntaxError("Direct sums are only allowed at the top level", token.position)
            self.advance()
            summands.append(self.product())
        if len(summands) == 1:
            return summands[0]
        return DirectSum(tuple(summands))

    def product(self) -> SchurExpr:
        factors = [self.factor()]
        while (token := self.peek()) is not None and token.kind == "tensor":
            self.advance()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        return TensorProduct(tuple(factors))

    def factor(self) -> SchurExpr:
        expr = self.atom()
        token = self.peek()
        if token is not None and token.kind == "tpow":
            self.advance()
            expr = tensor_power(expr, self.nat())
        return expr

    def atom(self) -> SchurExpr:
        token = self.advance()
        if token.kind == "letter" and token.text == "M":
            return Base()
        if token.kind == "letter":
            self.expect("^")
            power = self.nat()
            self.expect("(")
            child = self.expression(top_level=False)
            self.expect(")")
            assert not isinstance(child, DirectSum)
            if token.text == "S":
                return Sym(power, child)
            if token.text == "W":
                return Wedge(power, child)
            return tensor_power(child, power)
        if token.kind == "(":
            inner = self.expression(top_level=False)
            self.expect(")")
            assert not isinstance(inner, DirectSum)
            return inner
        raise SchurSyntaxError(f"Unexpected {token.text!r}", token.position)


def parse_schur_expr(text: str) -> TensorModule:
    """Parse the Schur DSL into a canonical syntax tree."""
    return _Parser(text).parse()


def format_expr(expr: TensorModule) -> str:
    if isinstance(expr, DirectSum):
        return " (+) ".join(format_expr(summand) for summand in expr.summands)
    if isinstance(expr, Base):
        return "M"
    if isinstance(expr, Sym):
        return f"S^{expr.r}({format_expr(expr.child)})"
    if isinstance(expr, Wedge):
        return f"W^{expr.r}({format_expr(expr.child)})"
    return " (x) ".join(
        f"({format_expr(child)})" if isinstance(child, TensorProduct) else format_expr(child)
        for child in expr.children
    )


@lru_cache(maxsize=None)
def _degree(expr: SchurExpr) -> int:
    if isinstance(expr, Base):
        return 1
    if isinstance(expr, (Sym, Wedge)):
        return expr.r * _degree(expr.child)
    return sum(_degree(child) for child in expr.children)


def degree_of(expr: TensorModule) -> int | list[int]:
    """Tensor-power exponent; a list of per-summand degrees for a direct sum."""
    if isinstance(expr, DirectSum):
        return [_degree(summand) for summand in expr.summands]
    return _degree(expr)


@lru_cache(maxsize=None)
def _rank(expr: SchurExpr, n: int) -> int:
    if isinstance(expr, Base):
        return n
    if isinstance(expr, Sym):
        return math.comb(_rank(expr.child, n) + expr.r - 1, expr.r)
    if isinstance(expr, Wedge):
        return math.comb(_rank(expr.child, n), expr.r)
    return math.prod(_rank(child, n) for child in expr.children)


def rank_of(expr: TensorModule, n: int) -> int:
    if n < 1:
        raise ValueError(f"Rank of the base module must be positive, got {n}")
    return sum(_rank(summand, n) for summand in expression_summands(expr))


LabelKey = Union[int, tuple]


@total_ordering
@dataclass(frozen=True)
class BasisLabel:
    """A canonical basis element of a Schur type applied to a free module.

    ``kind`` is ``leaf`` (with a 1-based ``index``), ``S``, ``W`` or ``T``.
    Labels are ordered recursively: leaves by index, nodes by the
    lexicographic order of their children.
    """

    kind: str
    index: int = 0
    children: tuple["BasisLabel", ...] = ()
    key: LabelKey = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind == "leaf":
            key: LabelKey = self.index - 1
        else:
            key = tuple(child.key for child in self.children)
        object.__setattr__(self, "key", key)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, BasisLabel):
            return NotImplemented
        return self.key < other.key

    def __str__(self) -> str:
        if self.kind == "leaf":
            return str(self.index)
        return f"{self.kind}[{','.join(str(child) for child in self.children)}]"


@lru_cache(maxsize=None)
def basis_keys(expr: SchurExpr, n: int) -> tuple[LabelKey, ...]:
    """Raw sort keys of the canonical basis, in increasing order.

    A key is a 0-based index for the base module and a tuple of child keys
    for every other node.
    """
    if isinstance(expr, Base):
        return tuple(range(n))
    if isinstance(expr, Sym):
        return tuple(itertools.combinations_with_replacement(basis_keys(expr.child, n), expr.r))
    if isinstance(expr, Wedge):
        return tuple(itertools.combinations(basis_keys(expr.child, n), expr.r))
    return tuple(itertools.product(*(basis_keys(child, n) for child in expr.children)))


def label_from_key(expr: SchurExpr, key: LabelKey) -> BasisLabel:
    if isinstance(expr, Base):
        return BasisLabel("leaf", index=int(key) + 1)
    if isinstance(expr, Sym):
        return BasisLabel("S", children=tuple(label_from_key(expr.child, item) for item in key))
    if isinstance(expr, Wedge):
        return BasisLabel("W", children=tuple(label_from_key(expr.child, item) for item in key))
    return BasisLabel(
        "T", children=tuple(label_from_key(child, item) for child, item in zip(expr.children, key))
    )


def enumerate_basis(expr: TensorModule, n: int) -> list[BasisLabel]:
    """Canonical basis labels; direct sums concatenate their summands' bases."""
    if n < 1:
        raise ValueError(f"Rank of the base module must be positive, got {n}")
    labels: list[BasisLabel] = []
    for summand in expression_summands(expr):
        labels.extend(label_from_key(summand, key) for key in basis_keys(summand, n))
    return labels
