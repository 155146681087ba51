from __future__ import annotations

import sys
import unittest
from fractions import Fraction
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT / "src"))

from schurtypes.polynomials import NotDivisibleError, Polynomial
from schurtypes.rings import (
    LocalizedInteger,
    RingElement,
    RingMismatchError,
    RingSpec,
    RingSpecError,
    ScalarSyntaxError,
    arith,
    exact_div,
    is_unit,
    parse_scalar,
)


class RingSpecTests(unittest.TestCase):
    def test_parses_and_formats_every_ring_kind(self) -> None:
        for text in ("Z", "Q", "Z[1/3]", "Z[1/2,1/3]", "Z[a,b,c,d]"):
            self.assertEqual(text, str(RingSpec.parse(text)))

    def test_localization_sorts_primes_and_drops_to_integers(self) -> None:
        self.assertEqual(RingSpec.parse("Z[1/2,1/3]"), RingSpec.parse("Z[1/3, 1/2]"))
        self.assertEqual(RingSpec.integers(), RingSpec.localized([]))

    def test_rejects_malformed_rings(self) -> None:
        for text in ("R", "Z[]", "Z[1/4]", "Z[1/3,x]", "Z[x,x]"):
            with self.subTest(text=text):
                with self.assertRaises(RingSpecError):
                    RingSpec.parse(text)

    def test_coerce_rejects_values_outside_the_ring(self) -> None:
        spec = RingSpec.parse("Z[1/3]")
        self.assertEqual(Fraction(2, 9), spec.to_fraction(spec.coerce(Fraction(2, 9))))
        with self.assertRaises(RingSpecError):
            spec.coerce(Fraction(1, 2))
        with self.assertRaises(RingSpecError):
            RingSpec.integers().coerce(Fraction(1, 3))
        with self.assertRaises(TypeError):
            spec.coerce(True)

    def test_units_per_ring(self) -> None:
        z3 = RingSpec.parse("Z[1/3]")
        self.assertTrue(RingSpec.integers().is_unit(-1))
        self.assertFalse(RingSpec.integers().is_unit(3))
        self.assertTrue(z3.is_unit(z3.from_int(9)))
        self.assertTrue(z3.is_unit(z3.from_int(-3)))
        self.assertFalse(z3.is_unit(z3.from_int(6)))
        self.assertTrue(RingSpec.rationals().is_unit(Fraction(7, 5)))
        poly = RingSpec.parse("Z[x]")
        self.assertTrue(poly.is_unit(poly.from_int(-1)))
        self.assertFalse(poly.is_unit(poly.variable("x")))


class LocalizedIntegerTests(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = RingSpec.parse("Z[1/3]")

    def test_canonical_form_cancels_inverted_primes(self) -> None:
        value = LocalizedInteger.from_fraction(Fraction(6, 9), (3,))
        self.assertEqual(2, value.numerator)
        self.assertEqual(3, value.denominator)
        self.assertEqual("2/3", str(value))

    def test_arithmetic_matches_rationals(self) -> None:
        a = self.spec.coerce(Fraction(5, 3))
        b = self.spec.coerce(Fraction(-7, 27))
        self.assertEqual(Fraction(5, 3) + Fraction(-7, 27), (a + b).to_fraction())
        self.assertEqual(Fraction(5, 3) * Fraction(-7, 27), (a * b).to_fraction())
        self.assertEqual(Fraction(5, 3) - 4, (a - 4).to_fraction())

    def test_exact_division_by_units_and_non_units(self) -> None:
        two_thirds = self.spec.coerce(Fraction(2, 3))
        self.assertEqual(Fraction(2, 27), two_thirds.exact_div(9).to_fraction())
        with self.assertRaises(NotDivisibleError):
            two_thirds.exact_div(4)
        with self.assertRaises(ZeroDivisionError):
            two_thirds.exact_div(0)

    def test_mixed_localizations_do_not_combine(self) -> None:
        left = RingSpec.parse("Z[1/3]").from_int(1)
        right = RingSpec.parse("Z[1/2]").from_int(1)
        with self.assertRaises(RingMismatchError):
            left + right


class ScalarParserTests(unittest.TestCase):
    def test_parses_polynomial_expressions(self) -> None:
        spec = RingSpec.parse("Z[a,b,c,d]")
        value = parse_scalar("a*d - b*c", spec)
        self.assertEqual("a*d - b*c", str(value))
        square = parse_scalar("a^2 + 2*a*b + b^2", spec)
        a_plus_b = parse_scalar("a + b", spec)
        self.assertEqual(square, a_plus_b * a_plus_b)

    def test_parses_fractions_in_localizations(self) -> None:
        spec = RingSpec.parse("Z[1/3]")
        self.assertEqual(Fraction(-1, 3), spec.to_fraction(parse_scalar("-1/3", spec).value))

    def test_reports_error_positions(self) -> None:
        spec = RingSpec.parse("Z[a]")
        with self.assertRaises(ScalarSyntaxError) as caught:
            parse_scalar("a + z", spec)
        self.assertEqual(4, caught.exception.position)
        with self.assertRaises(ScalarSyntaxError):
            parse_scalar("1/2", RingSpec.integers())
        with self.assertRaises(ScalarSyntaxError):
            parse_scalar("", spec)


class RingElementTests(unittest.TestCase):
    def test_operations_require_matching_rings(self) -> None:
        z = RingElement(RingSpec.integers(), 4)
        q = RingElement(RingSpec.rationals(), Fraction(1, 2))
        with self.assertRaises(RingMismatchError):
            arith(z, q, "add")
        with self.assertRaises(ValueError):
            arith(z, z, "pow")

    def test_exact_division_and_units(self) -> None:
        spec = RingSpec.integers()
        self.assertEqual(RingElement(spec, 4), exact_div(RingElement(spec, 12), RingElement(spec, 3)))
        with self.assertRaises(NotDivisibleError):
            exact_div(RingElement(spec, 12), RingElement(spec, 5))
        self.assertTrue(is_unit(RingElement(spec, -1)))
        self.assertEqual(RingElement(spec, 7), RingElement(spec, 3) + 4)


class PolynomialTests(unittest.TestCase):
    def test_exact_division_recovers_factors(self) -> None:
        spec = RingSpec.parse("Z[x,y]")
        x, y = spec.variable("x"), spec.variable("y")
        product = (x * x - y) * (x + 3 * y)
        self.assertEqual(x + 3 * y, product.exact_div(x * x - y))
        with self.assertRaises(NotDivisibleError):
            product.exact_div(x - y)

    def test_evaluate_specializes_every_indeterminate(self) -> None:
        spec = RingSpec.parse("Z[x,y]")
        x, y = spec.variable("x"), spec.variable("y")
        polynomial = x * x * y - 2 * y + 5
        self.assertEqual(5 * 5 * 3 - 6 + 5, polynomial.evaluate([5, 3]))
        self.assertEqual(Fraction(1, 4) * 2 - 4 + 5, polynomial.evaluate([Fraction(1, 2), 2]))

    def test_constants_compare_with_integers(self) -> None:
        self.assertEqual(Polynomial.constant(2, 7), 7)
        self.assertTrue(Polynomial.constant(2, -1).is_constant())
        self.assertEqual("0", Polynomial(2).format(["x", "y"]))
        self.assertEqual(-1, Polynomial(2).total_degree())


if __name__ == "__main__":
    unittest.main()
