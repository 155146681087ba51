from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT / "src"))

from schurtypes.canonical_maps import q_projection, wedge_inclusion
from schurtypes.expressions import parse_schur_expr
from schurtypes.matrices import ExactMatrix
from schurtypes.rings import RingSpec
from schurtypes.verify import (
    REFUTED,
    VERIFIED,
    BudgetExceededError,
    Verdict,
    check_complex,
    check_det_identity,
    check_exactness_localized,
    check_rank_identity,
    check_split_exactness,
    check_wedge_factorization,
    det_exponent,
    explore_phi_conjecture,
    rank_identity_holds,
    verify_composition_scalars,
    verify_theorem_4_3,
    verify_theorem_5_2,
    verify_theorem_5_4,
)

Z = RingSpec.integers()
Z3 = RingSpec.parse("Z[1/3]")


def integer_matrix(rows: list[list[int]]) -> ExactMatrix:
    return ExactMatrix.from_rows(Z, rows)


class VerdictTests(unittest.TestCase):
    def test_refutations_need_a_witness(self) -> None:
        with self.assertRaises(ValueError):
            Verdict("det", {}, REFUTED, {})
        with self.assertRaises(ValueError):
            Verdict("det", {}, "maybe", {})
        verdict = Verdict("det", {"n": 2}, VERIFIED, {"exponent": 3})
        self.assertTrue(verdict.verified)
        self.assertEqual(
            {"claim_id": "det", "parameters": {"n": 2}, "status": "verified", "evidence": {"exponent": 3}},
            verdict.to_dict(),
        )


class DeterminantIdentityTests(unittest.TestCase):
    def test_exponents(self) -> None:
        self.assertEqual(12, det_exponent(parse_schur_expr("S^2(S^2(M))"), 2))
        self.assertEqual(6, det_exponent(parse_schur_expr("W^2(M) (+) S^2(M)"), 3))
        self.assertEqual(108, det_exponent(parse_schur_expr("S^1(S^1(M) (x) W^1(M))^(x)2"), 3))

    def test_symbolic_check_of_the_symmetric_square_of_a_square(self) -> None:
        verdict = check_det_identity(parse_schur_expr("S^2(S^2(M))"), 2)
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual(12, verdict.evidence["exponent"])
        self.assertEqual(6, verdict.evidence["dimension"])
        self.assertEqual("x11*x22 - x12*x21", verdict.evidence["base_determinant"])
        self.assertEqual(3, verdict.evidence["specializations"])

    def test_symbolic_check_of_a_direct_sum(self) -> None:
        verdict = check_det_identity(parse_schur_expr("W^2(M) (+) S^2(M)"), 2)
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual(4, verdict.evidence["exponent"])

    def test_random_check_is_reproducible(self) -> None:
        expr = parse_schur_expr("W^2(M) (+) S^2(M)")
        first = check_det_identity(expr, 3, "random", trials=15, seed=4)
        second = check_det_identity(expr, 3, "random", trials=15, seed=4)
        self.assertEqual(VERIFIED, first.status)
        self.assertEqual(6, first.evidence["exponent"])
        self.assertEqual(first.to_dict(), second.to_dict())
        self.assertEqual(4, first.parameters["seed"])

    def test_classical_powers(self) -> None:
        def exponents(n: int, r: int) -> dict[str, int]:
            return {
                "T": r * n ** (r - 1),
                "S": math.factorial(n + r - 1) // (math.factorial(n) * math.factorial(r - 1)),
                "W": math.factorial(n - 1) // (math.factorial(r - 1) * math.factorial(n - r)),
            }

        symbolic = ((2, 2, "TSW"), (2, 3, "TS"), (3, 2, "SW"))
        for n, r, kinds in symbolic:
            for kind in kinds:
                with self.subTest(n=n, r=r, kind=kind):
                    verdict = check_det_identity(parse_schur_expr(f"{kind}^{r}(M)"), n)
                    self.assertEqual(VERIFIED, verdict.status)
                    self.assertEqual(exponents(n, r)[kind], verdict.evidence["exponent"])
        for n, r in ((3, 3), (4, 2)):
            for kind in "TSW":
                with self.subTest(n=n, r=r, kind=kind):
                    verdict = check_det_identity(
                        parse_schur_expr(f"{kind}^{r}(M)"), n, "random", trials=20
                    )
                    self.assertEqual(VERIFIED, verdict.status)
                    self.assertEqual(exponents(n, r)[kind], verdict.evidence["exponent"])

    def test_symbolic_check_refuses_large_ranks(self) -> None:
        with self.assertRaises(BudgetExceededError):
            check_det_identity(parse_schur_expr("S^2(M)"), 4)
        with self.assertRaises(BudgetExceededError):
            check_det_identity(parse_schur_expr("S^2(S^2(M))"), 3, budget_dim=10)

    def test_unknown_mode(self) -> None:
        with self.assertRaises(ValueError):
            check_det_identity(parse_schur_expr("S^2(M)"), 2, "sampled")


class ExactnessTests(unittest.TestCase):
    def test_complex_check(self) -> None:
        self.assertEqual(
            VERIFIED, check_complex([wedge_inclusion(2, Z).matrix, q_projection(2, 2, Z).matrix]).status
        )
        verdict = check_complex([integer_matrix([[1]]), integer_matrix([[2]])])
        self.assertEqual(REFUTED, verdict.status)
        self.assertEqual({"position": 0, "composition": [["2"]]}, verdict.evidence["witness"])

    def test_multiplication_by_three_is_exact_only_after_inverting_three(self) -> None:
        maps = [integer_matrix([[3]])]
        over_integers = check_exactness_localized(maps, [])
        self.assertEqual(REFUTED, over_integers.status)
        self.assertEqual({"map": 0, "elementary_divisors": [3]}, over_integers.evidence["witness"])
        localized = check_exactness_localized(maps, [3], splitting=([integer_matrix([[1]])], 3))
        self.assertEqual(VERIFIED, localized.status)
        self.assertEqual({"ring": "Z[1/3]", "length": 1}, localized.parameters)
        self.assertEqual([["1/3"]], localized.evidence["split"]["inverse"]["entries"])

    def test_rank_defect_is_a_node_witness(self) -> None:
        verdict = check_exactness_localized([integer_matrix([[1, 0], [0, 0]])], [3])
        self.assertEqual(REFUTED, verdict.status)
        self.assertEqual({"node": 0, "kernel_rank": 1, "image_rank": 0}, verdict.evidence["witness"])

    def test_split_exactness(self) -> None:
        maps = [integer_matrix([[3]])]
        homotopies = [integer_matrix([[1]])]
        self.assertEqual(VERIFIED, check_split_exactness(maps, homotopies, 3, [3]).status)
        refuted = check_split_exactness(maps, homotopies, 3, [])
        self.assertEqual({"elementary_divisors": [3]}, refuted.evidence["witness"])
        wrong = check_split_exactness(maps, [integer_matrix([[2]])], 3, [3])
        self.assertEqual(REFUTED, wrong.status)
        self.assertEqual("forward after backward", wrong.evidence["witness"]["identity"])


class TheoremTests(unittest.TestCase):
    def test_composition_scalars(self) -> None:
        verdict = verify_composition_scalars()
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual(["3", "60", "12"], [row["scalar"] for row in verdict.evidence["cases"]])

    def test_section_and_inclusion_identities(self) -> None:
        verdict = verify_theorem_4_3(
            vanishing_cases=((3, 2), (4, 2)), section_cases=((2, 2), (3, 2))
        )
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual(["3", "10"], [row["scalar"] for row in verdict.evidence["section_scalars"]])
        self.assertTrue(all(row["holds"] for row in verdict.evidence["factorizations"]))

    def test_three_term_sequence_splits_after_inverting_three(self) -> None:
        verdict = verify_theorem_5_2(2, Z3)
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual([1, 6, 5], verdict.evidence["ranks"])
        self.assertEqual("3", verdict.evidence["scalar"])
        self.assertEqual([1, 3, 3, 3, 3, 3], verdict.evidence["split"]["elementary_divisors"])

    def test_three_term_sequence_does_not_split_over_the_integers(self) -> None:
        verdict = verify_theorem_5_2(2, Z)
        self.assertEqual(REFUTED, verdict.status)
        self.assertEqual({"elementary_divisors": [3]}, verdict.evidence["witness"])

    def test_three_term_sequence_needs_rank_two(self) -> None:
        with self.assertRaises(ValueError):
            verify_theorem_5_2(1)

    def test_four_term_sequence(self) -> None:
        for rank in (2, 3):
            with self.subTest(rank=rank):
                verdict = verify_theorem_5_4(rank, Z3)
                self.assertEqual(VERIFIED, verdict.status)
                self.assertTrue(verdict.evidence["rank_identity"])
                self.assertEqual({"S2(W2)": True, "S2(S2)": True}, verdict.evidence["homotopies"])
        self.assertEqual([0, 1, 6, 5], verify_theorem_5_4(2, Z3).evidence["ranks"])
        self.assertEqual("vacuous", verify_theorem_5_4(2, Z3).evidence["scalars"]["beta1.alpha1"])

    def test_four_term_sequence_over_the_integers(self) -> None:
        verdict = verify_theorem_5_4(2, Z)
        self.assertEqual(REFUTED, verdict.status)
        self.assertEqual({"elementary_divisors": [3]}, verdict.evidence["witness"])


class WedgeFactorizationTests(unittest.TestCase):
    def test_top_wedge_is_a_unit(self) -> None:
        for m, n in ((1, 1), (2, 1), (2, 2)):
            with self.subTest(m=m, n=n):
                verdict = check_wedge_factorization(m, n, trials=8, seed=m * 10 + n)
                self.assertEqual(VERIFIED, verdict.status)
                self.assertTrue(set(verdict.evidence["units"]) <= {-1, 1})

    def test_explicit_matrix_must_fit(self) -> None:
        with self.assertRaises(ValueError):
            check_wedge_factorization(1, 1, matrix=ExactMatrix.identity(3, Z))
        with self.assertRaises(ValueError):
            check_wedge_factorization(0, 2)

    def test_explicit_basis(self) -> None:
        verdict = check_wedge_factorization(
            1, 2, trials=1, matrix=integer_matrix([[1, 1, 0], [0, 1, 0], [0, 0, -1]])
        )
        self.assertEqual([-1], verdict.evidence["units"])


class ConjectureTests(unittest.TestCase):
    def test_even_rows_match_the_factorial_formula(self) -> None:
        rows = explore_phi_conjecture(2, 4)
        self.assertEqual([(2, 2), (2, 4)], [(row.n, row.k) for row in rows])
        self.assertEqual(["3", "60"], [row.scalar for row in rows])
        self.assertTrue(all(row.matches and row.descends and row.descent_checked for row in rows))

    def test_odd_rows_do_not_descend(self) -> None:
        rows = explore_phi_conjecture(2, 1, include_odd=True)
        self.assertEqual(1, len(rows))
        self.assertFalse(rows[0].descends)
        self.assertIsNone(rows[0].to_dict()["scalar"])

    def test_budget_skips_the_descent_check(self) -> None:
        with self.assertLogs("schurtypes.verify", level="WARNING"):
            rows = explore_phi_conjecture(2, 2, budget=10)
        self.assertFalse(rows[0].descent_checked)
        self.assertEqual("3", rows[0].scalar)
        self.assertTrue(rows[0].matches)

    def test_skipped_rows_do_not_claim_descent(self) -> None:
        with self.assertLogs("schurtypes.verify", level="WARNING"):
            rows = explore_phi_conjecture(2, 2, budget=10)
        self.assertIsNone(rows[0].descends)
        self.assertIsNone(rows[0].to_dict()["descends"])
        checked = explore_phi_conjecture(2, 2)
        self.assertIs(True, checked[0].descends)


class RankIdentityTests(unittest.TestCase):
    def test_ranks_balance(self) -> None:
        verdict = check_rank_identity(12)
        self.assertEqual(VERIFIED, verdict.status)
        self.assertEqual(12, verdict.evidence["checked"])
        self.assertTrue(rank_identity_holds(1))


if __name__ == "__main__":
    unittest.main()
