"""Sparse multivariate polynomials with integer coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Mapping, Sequence

Monomial = tuple[int, ...]


class NotDivisibleError(ArithmeticError):
    """Raised when an exact division would leave a remainder."""


class Polynomial:
    """A polynomial over the integers in a fixed number of indeterminates.

    Terms map exponent tuples to nonzero coefficients. Monomials are ordered
    lexicographically on their exponent tuples, so the first indeterminate is
    the most significant one. Instances are never mutated after construction.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, int] | None = None) -> None:
        if nvars < 0:
            raise ValueError(f"Number of indeterminates must be nonnegative, got {nvars}")
        cleaned: dict[Monomial, int] = {}
        for monomial, coefficient in (terms or {}).items():
            monomial = tuple(int(exponent) for exponent in monomial)
            if len(monomial) != nvars:
                raise ValueError(
                    f"Monomial {monomial} does not have {nvars} exponent(s)"
                )
            if any(exponent < 0 for exponent in monomial):
                raise ValueError(f"Monomial {monomial} has a negative exponent")
            if coefficient:
                cleaned[monomial] = cleaned.get(monomial, 0) + int(coefficient)
        self.nvars = nvars
        self._terms = {key: value for key, value in cleaned.items() if value}

    @classmethod
    def _wrap(cls, nvars: int, terms: dict[Monomial, int]) -> Polynomial:
        polynomial = cls.__new__(cls)
        polynomial.nvars = nvars
        polynomial._terms = terms
        return polynomial

    @classmethod
    def constant(cls, nvars: int, value: int) -> Polynomial:
        if not value:
            return cls._wrap(nvars, {})
        return cls._wrap(nvars, {(0,) * nvars: int(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Polynomial:
        if not 0 <= index < nvars:
            raise IndexError(f"Indeterminate index {index} out of range for {nvars}")
        exponents = [0] * nvars
        exponents[index] = 1
        return cls._wrap(nvars, {tuple(exponents): 1})

    def terms(self) -> list[tuple[Monomial, int]]:
        """Return the terms sorted from the leading monomial down."""
        return sorted(self._terms.items(), reverse=True)

    def __iter__(self) -> Iterator[tuple[Monomial, int]]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0,) * self.nvars}

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError(f"{self!r} is not a constant polynomial")
        return self._terms.get((0,) * self.nvars, 0)

    def leading_term(self) -> tuple[Monomial, int]:
        if not self._terms:
            raise ValueError("The zero polynomial has no leading term")
        monomial = max(self._terms)
        return monomial, self._terms[monomial]

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(monomial) for monomial in self._terms)

    def _coerce(self, other: object) -> Polynomial | None:
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"Cannot combine polynomials in {self.nvars} and {other.nvars} indeterminates"
                )
            return other
        if isinstance(other, int):
            return Polynomial.constant(self.nvars, other)
        return None

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.nvars, frozenset(self._terms.items())))

    def __neg__(self) -> Polynomial:
        return Polynomial._wrap(self.nvars, {key: -value for key, value in self._terms.items()})

    def __add__(self, other: object) -> Polynomial:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        terms = dict(self._terms)
        for monomial, coefficient in other_poly._terms.items():
            value = terms.get(monomial, 0) + coefficient
            if value:
                terms[monomial] = value
            else:
                terms.pop(monomial, None)
        return Polynomial._wrap(self.nvars, terms)

    __radd__ = __add__

    def __sub__(self, other: object) -> Polynomial:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return self + (-other_poly)

    def __rsub__(self, other: object) -> Polynomial:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return other_poly - self

    def __mul__(self, other: object) -> Polynomial:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        terms: dict[Monomial, int] = {}
        for left, left_coefficient in self._terms.items():
            for right, right_coefficient in other_poly._terms.items():
                monomial = tuple(a + b for a, b in zip(left, right))
                value = terms.get(monomial, 0) + left_coefficient * right_coefficient
                if value:
                    terms[monomial] = value
                else:
                    terms.pop(monomial, None)
        return Polynomial._wrap(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Polynomial:
        if exponent < 0:
            raise ValueError("Polynomials only support nonnegative powers")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def exact_div(self, other: Polynomial | int) -> Polynomial:
        """Divide exactly by ``other`` or raise :class:`NotDivisibleError`.

        Uses leading-term elimination under the lexicographic order. Because
        the coefficients form an integral domain, exact divisibility forces
        every intermediate leading term to be divisible as well.
        """
        divisor = self._coerce(other)
        if divisor is None:
            raise TypeError(f"Cannot divide a polynomial by {type(other).__name__}")
        if not divisor:
            raise ZeroDivisionError("polynomial division by zero")
        lead_monomial, lead_coefficient = divisor.leading_term()
        remainder = dict(self._terms)
        quotient: dict[Monomial, int] = {}
        while remainder:
            monomial = max(remainder)
            coefficient = remainder[monomial]
            shift = tuple(a - b for a, b in zip(monomial, lead_monomial))
            if any(exponent < 0 for exponent in shift) or coefficient % lead_coefficient:
                raise NotDivisibleError(f"{self!r} is not divisible by {divisor!r}")
            factor = coefficient // lead_coefficient
            quotient[shift] = factor
            for divisor_monomial, divisor_coefficient in divisor._terms.items():
                key = tuple(a + b for a, b in zip(divisor_monomial, shift))
                value = remainder.get(key, 0) - factor * divisor_coefficient
                if value:
                    remainder[key] = value
                else:
                    remainder.pop(key, None)
        return Polynomial._wrap(self.nvars, quotient)

    def evaluate(self, values: Sequence[int | Fraction]) -> int | Fraction:
        """Specialize every indeterminate to the matching entry of ``values``."""
        if len(values) != self.nvars:
            raise ValueError(f"Expected {self.nvars} value(s), got {len(values)}")
        total: int | Fraction = 0
        for monomial, coefficient in self._terms.items():
            term: int | Fraction = coefficient
            for value, exponent in zip(values, monomial):
                if exponent:
                    term *= value**exponent
            total += term
        return total

    def format(self, names: Sequence[str]) -> str:
        if len(names) != self.nvars:
            raise ValueError(f"Expected {self.nvars} name(s), got {len(names)}")
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for position, (monomial, coefficient) in enumerate(self.terms()):
            factors = [
                name if exponent == 1 else f"{name}^{exponent}"
                for name, exponent in zip(names, monomial)
                if exponent
            ]
            magnitude = abs(coefficient)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude), *factors])
            if position == 0:
                pieces.append(f"-{body}" if coefficient < 0 else body)
            else:
                pieces.append(f"{'-' if coefficient < 0 else '+'} {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        names = [f"t{index}" for index in range(1, self.nvars + 1)]
        return f"Polynomial({self.format(names)!r})"
