from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT / "src"))

from schurtypes.expressions import (
    Base,
    DirectSum,
    SchurSyntaxError,
    Sym,
    TensorProduct,
    Wedge,
    degree_of,
    enumerate_basis,
    format_expr,
    parse_schur_expr,
    rank_of,
    tensor_power,
)

M = Base()


class ParserTests(unittest.TestCase):
    def test_parses_nested_types(self) -> None:
        self.assertEqual(Sym(2, Sym(2, M)), parse_schur_expr("S^2(S^2(M))"))
        self.assertEqual(Sym(2, Wedge(2, M)), parse_schur_expr(" S ^ 2 ( W^2(M) ) "))

    def test_tensor_power_forms_agree(self) -> None:
        inner = TensorProduct((Sym(1, M), Wedge(1, M)))
        expected = TensorProduct((Sym(1, inner), Sym(1, inner)))
        self.assertEqual(expected, parse_schur_expr("S^1(S^1(M) (x) W^1(M))^(x)2"))
        self.assertEqual(
            parse_schur_expr("T^3(W^2(M))"), parse_schur_expr("W^2(M)^(x)3")
        )
        self.assertEqual(M, parse_schur_expr("T^1(M)"))

    def test_direct_sums_only_at_top_level(self) -> None:
        self.assertEqual(DirectSum((Wedge(2, M), Sym(2, M))), parse_schur_expr("W^2(M) (+) S^2(M)"))
        with self.assertRaises(SchurSyntaxError):
            parse_schur_expr("S^2(M (+) M)")
        with self.assertRaises(ValueError):
            Sym(2, DirectSum((M, M)))

    def test_reports_error_positions(self) -> None:
        cases = {
            "S^0(M)": 2,
            "S^2(M": 5,
            "S^2(M))": 6,
            "Q": 0,
            "": 0,
            "M (x)": 5,
        }
        for text, position in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(SchurSyntaxError) as caught:
                    parse_schur_expr(text)
                self.assertEqual(position, caught.exception.position)

    def test_format_round_trips_through_the_parser(self) -> None:
        for text in (
            "S^2(S^2(M))",
            "W^2(M) (+) S^2(M)",
            "S^1(S^1(M) (x) W^1(M)) (x) S^1(S^1(M) (x) W^1(M))",
            "S^2(M) (x) (W^2(M) (x) M)",
        ):
            with self.subTest(text=text):
                expr = parse_schur_expr(text)
                self.assertEqual(expr, parse_schur_expr(format_expr(expr)))


class DegreeAndRankTests(unittest.TestCase):
    def test_degrees(self) -> None:
        self.assertEqual(4, degree_of(parse_schur_expr("S^2(S^2(M))")))
        self.assertEqual(4, degree_of(parse_schur_expr("S^1(S^1(M) (x) W^1(M))^(x)2")))
        self.assertEqual(1, degree_of(M))
        self.assertEqual([2, 2], degree_of(parse_schur_expr("W^2(M) (+) S^2(M)")))

    def test_ranks(self) -> None:
        self.assertEqual(6, rank_of(parse_schur_expr("S^2(S^2(M))"), 2))
        self.assertEqual(5, rank_of(M, 5))
        self.assertEqual(1, rank_of(parse_schur_expr("S^2(W^2(M))"), 2))
        self.assertEqual(5, rank_of(Sym(4, M), 2))
        self.assertEqual(0, rank_of(Wedge(4, M), 3))
        self.assertEqual(81, rank_of(parse_schur_expr("S^1(S^1(M) (x) W^1(M))^(x)2"), 3))
        self.assertEqual(9, rank_of(parse_schur_expr("W^2(M) (+) S^2(M)"), 3))

    def test_rank_needs_positive_module_rank(self) -> None:
        with self.assertRaises(ValueError):
            rank_of(M, 0)

    def test_plethysm_rank_formula(self) -> None:
        for n in range(1, 6):
            for r in range(1, 4):
                with self.subTest(n=n, r=r):
                    inner = math.comb(n + 1, 2)
                    self.assertEqual(
                        math.comb(inner + r - 1, r), rank_of(Sym(r, Sym(2, M)), n)
                    )


class BasisTests(unittest.TestCase):
    def test_basis_size_matches_rank(self) -> None:
        for text in ("S^2(S^2(M))", "S^2(W^2(M))", "W^3(M) (x) M", "W^2(M) (+) S^2(M)"):
            for n in (1, 2, 3):
                with self.subTest(text=text, n=n):
                    expr = parse_schur_expr(text)
                    self.assertEqual(rank_of(expr, n), len(enumerate_basis(expr, n)))

    def test_labels_are_sorted_and_readable(self) -> None:
        labels = enumerate_basis(parse_schur_expr("S^2(W^2(M))"), 3)
        self.assertEqual("S[W[1,2],W[1,2]]", str(labels[0]))
        self.assertEqual("S[W[2,3],W[2,3]]", str(labels[-1]))
        self.assertEqual(sorted(labels), labels)

    def test_symmetric_square_basis(self) -> None:
        labels = [str(label) for label in enumerate_basis(Sym(2, M), 2)]
        self.assertEqual(["S[1,1]", "S[1,2]", "S[2,2]"], labels)

    def test_tensor_power_helper(self) -> None:
        self.assertEqual(M, tensor_power(M, 1))
        self.assertEqual(TensorProduct((M, M, M)), tensor_power(M, 3))
        with self.assertRaises(ValueError):
            tensor_power(M, 0)


if __name__ == "__main__":
    unittest.main()
