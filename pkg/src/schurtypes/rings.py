"""Exact scalar rings: integers, rationals, localized integers and polynomials."""

from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable

from .polynomials import NotDivisibleError, Polynomial

__all__ = [
    "LocalizedInteger",
    "NotDivisibleError",
    "RingElement",
    "RingMismatchError",
    "RingSpec",
    "RingSpecError",
    "ScalarSyntaxError",
    "arith",
    "exact_div",
    "format_scalar",
    "is_unit",
    "parse_scalar",
]

INTEGERS = "Z"
RATIONALS = "Q"
LOCALIZED = "Zloc"
POLYNOMIALS = "Zpoly"

_NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INVERSE_PATTERN = re.compile(r"1/(\d+)\Z")
_SCALAR_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^]))")


class RingMismatchError(ValueError):
    """Raised when two operands live in different rings."""


class RingSpecError(ValueError):
    """Raised for malformed ring descriptions or values outside a ring."""


class ScalarSyntaxError(ValueError):
    """Raised when a scalar string does not follow the scalar grammar."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


def _is_prime(value: int) -> bool:
    if value < 2:
        return False
    return all(value % divisor for divisor in range(2, math.isqrt(value) + 1))


def _split_primes(value: int, primes: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Write ``value`` as ``rest * prod(p**e)`` with ``rest`` coprime to ``primes``."""
    exponents = []
    for prime in primes:
        exponent = 0
        while value and value % prime == 0:
            value //= prime
            exponent += 1
        exponents.append(exponent)
    return value, tuple(exponents)


@dataclass(frozen=True, eq=False)
class LocalizedInteger:
    """An element ``numerator / prod(p**e)`` of the integers with ``primes`` inverted.

    The canonical form never has a prime both in the denominator and dividing
    the numerator, and zero carries no denominator.
    """

    numerator: int
    exponents: tuple[int, ...]
    primes: tuple[int, ...]

    @classmethod
    def normalized(
        cls, numerator: int, exponents: Iterable[int], primes: tuple[int, ...]
    ) -> LocalizedInteger:
        reduced = list(exponents)
        if not numerator:
            return cls(0, (0,) * len(primes), primes)
        for index, prime in enumerate(primes):
            while reduced[index] > 0 and numerator % prime == 0:
                numerator //= prime
                reduced[index] -= 1
        return cls(numerator, tuple(reduced), primes)

    @classmethod
    def from_fraction(cls, value: Fraction | int, primes: tuple[int, ...]) -> LocalizedInteger:
        value = Fraction(value)
        rest, exponents = _split_primes(value.denominator, primes)
        if rest != 1:
            inverted = ",".join(f"1/{prime}" for prime in primes)
            raise RingSpecError(f"{value} is not an element of Z[{inverted}]")
        return cls.normalized(value.numerator, exponents, primes)

    @property
    def denominator(self) -> int:
        return math.prod(prime**exponent for prime, exponent in zip(self.primes, self.exponents))

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def is_unit(self) -> bool:
        rest, _ = _split_primes(self.numerator, self.primes)
        return abs(rest) == 1

    def _coerce(self, other: object) -> LocalizedInteger | None:
        if isinstance(other, LocalizedInteger):
            if other.primes != self.primes:
                raise RingMismatchError(
                    f"Cannot combine localizations at {self.primes} and {other.primes}"
                )
            return other
        if isinstance(other, int):
            return LocalizedInteger(other, (0,) * len(self.primes), self.primes)
        return None

    def __bool__(self) -> bool:
        return bool(self.numerator)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.denominator == 1 and self.numerator == other
        if isinstance(other, LocalizedInteger):
            return (self.numerator, self.exponents, self.primes) == (
                other.numerator,
                other.exponents,
                other.primes,
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __neg__(self) -> LocalizedInteger:
        return LocalizedInteger(-self.numerator, self.exponents, self.primes)

    def __add__(self, other: object) -> LocalizedInteger:
        other_value = self._coerce(other)
        if other_value is None:
            return NotImplemented
        common = tuple(max(a, b) for a, b in zip(self.exponents, other_value.exponents))
        left = self.numerator * math.prod(
            prime ** (target - own) for prime, target, own in zip(self.primes, common, self.exponents)
        )
        right = other_value.numerator * math.prod(
            prime ** (target - own)
            for prime, target, own in zip(self.primes, common, other_value.exponents)
        )
        return LocalizedInteger.normalized(left + right, common, self.primes)

    __radd__ = __add__

    def __sub__(self, other: object) -> LocalizedInteger:
        other_value = self._coerce(other)
        if other_value is None:
            return NotImplemented
        return self + (-other_value)

    def __rsub__(self, other: object) -> LocalizedInteger:
        other_value = self._coerce(other)
        if other_value is None:
            return NotImplemented
        return other_value - self

    def __mul__(self, other: object) -> LocalizedInteger:
        other_value = self._coerce(other)
        if other_value is None:
            return NotImplemented
        exponents = tuple(a + b for a, b in zip(self.exponents, other_value.exponents))
        return LocalizedInteger.normalized(
            self.numerator * other_value.numerator, exponents, self.primes
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> LocalizedInteger:
        if exponent < 0:
            raise ValueError("Only nonnegative powers are supported")
        return LocalizedInteger.normalized(
            self.numerator**exponent,
            tuple(value * exponent for value in self.exponents),
            self.primes,
        )

    def exact_div(self, other: LocalizedInteger | int) -> LocalizedInteger:
        divisor = self._coerce(other)
        if divisor is None:
            raise TypeError(f"Cannot divide by {type(other).__name__}")
        if not divisor.numerator:
            raise ZeroDivisionError("division by zero in a localized ring")
        unit_part, shifts = _split_primes(divisor.numerator, self.primes)
        quotient, remainder = divmod(self.numerator, unit_part)
        if remainder:
            raise NotDivisibleError(f"{self} is not divisible by {divisor}")
        numerator = quotient * divisor.denominator
        exponents = tuple(a + b for a, b in zip(self.exponents, shifts))
        return LocalizedInteger.normalized(numerator, exponents, self.primes)

    def __str__(self) -> str:
        denominator = self.denominator
        if denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{denominator}"


@dataclass(frozen=True)
class RingSpec:
    """Description of a scalar ring.

    ``kind`` is one of ``Z``, ``Q``, ``Zloc`` (integers with ``primes``
    inverted) and ``Zpoly`` (integer polynomials in ``indeterminates``).
    Raw values are Python ``int`` for ``Z``, ``Fraction`` for ``Q``,
    :class:`LocalizedInteger` and :class:`Polynomial` for the others.
    """

    kind: str
    primes: tuple[int, ...] = ()
    indeterminates: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (INTEGERS, RATIONALS, LOCALIZED, POLYNOMIALS):
            raise RingSpecError(f"Unknown ring kind {self.kind!r}")
        if self.kind == LOCALIZED:
            if not self.primes:
                raise RingSpecError("A localization needs at least one inverted prime")
            if list(self.primes) != sorted(set(self.primes)):
                raise RingSpecError(f"Inverted primes must be sorted and distinct: {self.primes}")
            bad = [prime for prime in self.primes if not _is_prime(prime)]
            if bad:
                raise RingSpecError(f"Not prime: {', '.join(map(str, bad))}")
        elif self.primes:
            raise RingSpecError(f"Ring {self.kind} takes no inverted primes")
        if self.kind == POLYNOMIALS:
            if len(set(self.indeterminates)) != len(self.indeterminates):
                raise RingSpecError(f"Repeated indeterminate in {self.indeterminates}")
            for name in self.indeterminates:
                if not _NAME_PATTERN.match(name):
                    raise RingSpecError(f"Invalid indeterminate name {name!r}")
        elif self.indeterminates:
            raise RingSpecError(f"Ring {self.kind} takes no indeterminates")

    @classmethod
    def integers(cls) -> RingSpec:
        return cls(INTEGERS)

    @classmethod
    def rationals(cls) -> RingSpec:
        return cls(RATIONALS)

    @classmethod
    def localized(cls, primes: Iterable[int]) -> RingSpec:
        """Integers with ``primes`` inverted; no primes gives the plain integers."""
        ordered = tuple(sorted(set(int(prime) for prime in primes)))
        if not ordered:
            return cls.integers()
        return cls(LOCALIZED, primes=ordered)

    @classmethod
    def polynomials(cls, names: Iterable[str]) -> RingSpec:
        return cls(POLYNOMIALS, indeterminates=tuple(names))

    @classmethod
    def parse(cls, text: str) -> RingSpec:
        """Parse ``Z``, ``Q``, ``Z[1/3]``, ``Z[1/2,1/3]`` or ``Z[x11,x12,...]``."""
        stripped = "".join(text.split())
        if stripped == "Z":
            return cls.integers()
        if stripped == "Q":
            return cls.rationals()
        if not (stripped.startswith("Z[") and stripped.endswith("]")):
            raise RingSpecError(f"Unrecognized ring {text!r}")
        items = [item for item in stripped[2:-1].split(",")]
        if not items or any(not item for item in items):
            raise RingSpecError(f"Empty generator list in ring {text!r}")
        inverses = [_INVERSE_PATTERN.match(item) for item in items]
        if all(inverses):
            return cls.localized(int(match.group(1)) for match in inverses if match)
        if all(_NAME_PATTERN.match(item) for item in items):
            return cls.polynomials(items)
        raise RingSpecError(f"Ring {text!r} mixes inverted primes and indeterminates")

    def __str__(self) -> str:
        if self.kind == LOCALIZED:
            return "Z[" + ",".join(f"1/{prime}" for prime in self.primes) + "]"
        if self.kind == POLYNOMIALS:
            return "Z[" + ",".join(self.indeterminates) + "]"
        return self.kind

    @property
    def embeds_in_rationals(self) -> bool:
        return self.kind != POLYNOMIALS

    @property
    def zero(self) -> Any:
        return self.from_int(0)

    @property
    def one(self) -> Any:
        return self.from_int(1)

    def from_int(self, value: int) -> Any:
        if self.kind == INTEGERS:
            return int(value)
        if self.kind == RATIONALS:
            return Fraction(value)
        if self.kind == LOCALIZED:
            return LocalizedInteger(int(value), (0,) * len(self.primes), self.primes)
        return Polynomial.constant(len(self.indeterminates), int(value))

    def variable(self, name: str) -> Polynomial:
        if self.kind != POLYNOMIALS:
            raise RingSpecError(f"Ring {self} has no indeterminates")
        return Polynomial.variable(len(self.indeterminates), self.indeterminates.index(name))

    def coerce(self, value: Any) -> Any:
        """Return the canonical raw value of ``value`` in this ring."""
        if isinstance(value, RingElement):
            if value.spec != self:
                raise RingMismatchError(f"Element of {value.spec} used where {self} is expected")
            return value.value
        if isinstance(value, bool):
            raise TypeError("Booleans are not ring elements")
        if isinstance(value, str):
            return parse_scalar(value, self).value
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            if self.kind == RATIONALS:
                return value
            if self.kind == LOCALIZED:
                return LocalizedInteger.from_fraction(value, self.primes)
            if value.denominator != 1:
                raise RingSpecError(f"{value} is not an element of {self}")
            return self.from_int(value.numerator)
        if isinstance(value, LocalizedInteger):
            if self.kind == LOCALIZED and value.primes == self.primes:
                return value
            return self.coerce(value.to_fraction())
        if isinstance(value, Polynomial):
            if self.kind == POLYNOMIALS and value.nvars == len(self.indeterminates):
                return value
            if value.is_constant():
                return self.from_int(value.constant_value())
            raise RingSpecError(f"Non-constant polynomial cannot be coerced into {self}")
        raise TypeError(f"Cannot coerce {type(value).__name__} into {self}")

    def exact_div(self, numerator: Any, denominator: Any) -> Any:
        if self.kind == INTEGERS:
            if not denominator:
                raise ZeroDivisionError("integer division by zero")
            quotient, remainder = divmod(numerator, denominator)
            if remainder:
                raise NotDivisibleError(f"{numerator} is not divisible by {denominator}")
            return quotient
        if self.kind == RATIONALS:
            if not denominator:
                raise ZeroDivisionError("rational division by zero")
            return numerator / denominator
        return numerator.exact_div(denominator)

    def is_unit(self, value: Any) -> bool:
        if self.kind == INTEGERS:
            return abs(value) == 1
        if self.kind == RATIONALS:
            return bool(value)
        if self.kind == LOCALIZED:
            return value.is_unit()
        return value.is_constant() and abs(value.constant_value()) == 1

    def to_fraction(self, value: Any) -> Fraction:
        if self.kind == LOCALIZED:
            return value.to_fraction()
        if self.kind == POLYNOMIALS:
            if not value.is_constant():
                raise TypeError(f"Polynomial {self.format_value(value)} has no rational value")
            return Fraction(value.constant_value())
        return Fraction(value)

    def format_value(self, value: Any) -> str:
        if self.kind == POLYNOMIALS:
            return value.format(self.indeterminates)
        return str(value)

    def element(self, value: Any) -> RingElement:
        return RingElement(self, self.coerce(value))


_OPERATIONS: dict[str, Callable[[Any, Any], Any]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


@dataclass(frozen=True)
class RingElement:
    """A raw value tagged with its ring."""

    spec: RingSpec
    value: Any

    def _other(self, other: object) -> RingElement:
        if isinstance(other, RingElement):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return self.spec.element(other)
        raise TypeError(f"Cannot combine a ring element with {type(other).__name__}")

    def __add__(self, other: object) -> RingElement:
        return arith(self, self._other(other), "add")

    def __sub__(self, other: object) -> RingElement:
        return arith(self, self._other(other), "sub")

    def __mul__(self, other: object) -> RingElement:
        return arith(self, self._other(other), "mul")

    def __neg__(self) -> RingElement:
        return RingElement(self.spec, -self.value)

    def __bool__(self) -> bool:
        return bool(self.value)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RingElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == self.spec.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec, self.value))

    def __str__(self) -> str:
        return self.spec.format_value(self.value)


def arith(a: RingElement, b: RingElement, op: str) -> RingElement:
    """Apply ``add``, ``sub`` or ``mul`` to two elements of the same ring."""
    if a.spec != b.spec:
        raise RingMismatchError(f"Cannot {op} elements of {a.spec} and {b.spec}")
    try:
        function = _OPERATIONS[op]
    except KeyError:
        raise ValueError(f"Unknown ring operation {op!r}") from None
    return RingElement(a.spec, function(a.value, b.value))


def exact_div(a: RingElement, b: RingElement) -> RingElement:
    if a.spec != b.spec:
        raise RingMismatchError(f"Cannot divide elements of {a.spec} and {b.spec}")
    return RingElement(a.spec, a.spec.exact_div(a.value, b.value))


def is_unit(a: RingElement) -> bool:
    return a.spec.is_unit(a.value)


def format_scalar(a: RingElement) -> str:
    return str(a)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize_scalar(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _SCALAR_TOKEN.match(text, position)
        if match is None:
            offset = position + len(text[position:]) - len(text[position:].lstrip())
            raise ScalarSyntaxError(f"Unexpected character {text[offset]!r}", offset)
        kind = match.lastgroup or "op"
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        position = match.end()
    return tokens


class _ScalarParser:
    def __init__(self, text: str, spec: RingSpec) -> None:
        self.text = text
        self.spec = spec
        self.tokens = _tokenize_scalar(text)
        self.index = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def advance(self) -> _Token:
        token = self.peek()
        if token is None:
            raise ScalarSyntaxError("Unexpected end of scalar", len(self.text))
        self.index += 1
        return token

    def expect_int(self) -> int:
        token = self.advance()
        if token.kind != "int":
            raise ScalarSyntaxError(f"Expected an integer, found {token.text!r}", token.position)
        return int(token.text)

    def parse(self) -> Any:
        if not self.tokens:
            raise ScalarSyntaxError("Empty scalar", 0)
        negative = False
        first = self.peek()
        if first is not None and first.kind == "op" and first.text in "+-":
            self.advance()
            negative = first.text == "-"
        total = self.parse_term()
        if negative:
            total = -total
        while self.peek() is not None:
            token = self.advance()
            if token.kind != "op" or token.text not in "+-":
                raise ScalarSyntaxError(f"Expected '+' or '-', found {token.text!r}", token.position)
            term = self.parse_term()
            total = total + term if token.text == "+" else total - term
        return total

    def parse_term(self) -> Any:
        value = self.parse_factor()
        while True:
            token = self.peek()
            if token is None or token.text != "*":
                return value
            self.advance()
            value = value * self.parse_factor()

    def parse_factor(self) -> Any:
        token = self.advance()
        if token.kind == "int":
            numerator = int(token.text)
            following = self.peek()
            if following is not None and following.text == "/":
                self.advance()
                denominator = self.expect_int()
                if denominator == 0:
                    raise ScalarSyntaxError("Zero denominator", following.position)
                try:
                    return self.spec.coerce(Fraction(numerator, denominator))
                except RingSpecError as exc:
                    raise ScalarSyntaxError(str(exc), token.position) from None
            value = self.spec.from_int(numerator)
        elif token.kind == "name":
            if token.text not in self.spec.indeterminates:
                raise ScalarSyntaxError(
                    f"Unknown indeterminate {token.text!r} for ring {self.spec}", token.position
                )
            value = self.spec.variable(token.text)
        else:
            raise ScalarSyntaxError(f"Unexpected {token.text!r}", token.position)
        following = self.peek()
        if following is not None and following.text == "^":
            self.advance()
            value = value ** self.expect_int()
        return value


def parse_scalar(text: str, spec: RingSpec) -> RingElement:
    """Parse ``text`` with the scalar grammar into a canonical element of ``spec``."""
    return RingElement(spec, _ScalarParser(text, spec).parse())
