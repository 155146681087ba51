from __future__ import annotations

import itertools
import math
import random
import sys
import unittest
from collections import defaultdict
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT / "src"))

from schurtypes.canonical_maps import (
    DescentError,
    alpha_beta_chains,
    composition_scalar_phi,
    extend_f,
    extend_g,
    include_i,
    named_map,
    phi_sym_to_wedge,
    phi_wedge_to_sym,
    q_projection,
    retract_j,
    tau_retraction,
    varphi_section,
    wedge_inclusion,
)
from schurtypes.expressions import (
    Base,
    TensorProduct,
    Wedge,
    degree_of,
    enumerate_basis,
    format_expr,
)
from schurtypes.functor import induced_map, quotient_presentation, random_unimodular
from schurtypes.matrices import ExactMatrix, kronecker, scalar_multiple_of_identity
from schurtypes.rings import RingSpec

Z = RingSpec.integers()


def route_label(expr, tensor):
    """Printed basis label and sign of a pure tensor, or None when it vanishes.

    Works on label strings, which sort like the canonical order while every
    index is a single digit.
    """
    if isinstance(expr, Base):
        return str(tensor[0] + 1), 1
    if isinstance(expr, TensorProduct):
        parts, start = [], 0
        for child in expr.children:
            width = degree_of(child)
            parts.append(route_label(child, tensor[start : start + width]))
            start += width
        if None in parts:
            return None
        return "T[" + ",".join(text for text, _ in parts) + "]", math.prod(s for _, s in parts)
    width = degree_of(expr.child)
    parts = [route_label(expr.child, tensor[i * width : (i + 1) * width]) for i in range(expr.r)]
    if None in parts:
        return None
    texts = [text for text, _ in parts]
    sign = math.prod(s for _, s in parts)
    kind = "S"
    if isinstance(expr, Wedge):
        kind = "W"
        if len(set(texts)) < len(texts):
            return None
        inversions = sum(1 for a, b in itertools.combinations(texts, 2) if a > b)
        sign *= (-1) ** inversions
    return f"{kind}[{','.join(sorted(texts))}]", sign


def label_index(expr, rank: int) -> dict[str, int]:
    return {str(label): index for index, label in enumerate(enumerate_basis(expr, rank))}


def column_by_label(named, source: str) -> dict[str, int]:
    column = named.matrix.column(label_index(named.src_expr, named.n)[source])
    labels = [str(label) for label in enumerate_basis(named.dst_expr, named.n)]
    return {label: value for label, value in zip(labels, column) if value}


def add_symmetric(image: dict[str, int], factors, coefficient: int = 1) -> None:
    """Add ``coefficient`` times the symmetric product of signed labels."""
    if any(factor is None for factor in factors):
        return
    label = "S[" + ",".join(sorted(text for text, _ in factors)) + "]"
    image[label] += coefficient * math.prod(sign for _, sign in factors)


def wedge2(x: int, y: int):
    if x == y:
        return None
    return (f"W[{x},{y}]", 1) if x < y else (f"W[{y},{x}]", -1)


def nonzero(image: dict[str, int]) -> dict[str, int]:
    return {label: value for label, value in image.items() if value}


class PhiTests(unittest.TestCase):
    def test_shapes_at_rank_two(self) -> None:
        forward = phi_sym_to_wedge(2, 2, 2, Z)
        self.assertEqual((1, 6), (forward.matrix.rows, forward.matrix.cols))
        self.assertEqual("S^2(S^2(M))", format_expr(forward.src_expr))
        self.assertEqual("S^2(W^2(M))", format_expr(forward.dst_expr))
        backward = phi_wedge_to_sym(2, 2, 2, Z)
        self.assertEqual((6, 1), (backward.matrix.rows, backward.matrix.cols))

    def test_composition_scalars(self) -> None:
        for n, k, expected in ((2, 2, 3), (2, 4, 60), (3, 2, 12)):
            with self.subTest(n=n, k=k):
                self.assertEqual(expected, composition_scalar_phi(n, k, n, Z))

    def test_composition_scalar_is_taken_at_rank_n(self) -> None:
        with self.assertRaises(ValueError):
            composition_scalar_phi(2, 2, 3, Z)

    def test_odd_k_needs_an_explicit_opt_in(self) -> None:
        with self.assertRaises(ValueError):
            phi_sym_to_wedge(2, 1, 2, Z)
        with self.assertRaises(DescentError) as caught:
            phi_sym_to_wedge(2, 1, 2, Z, allow_odd=True)
        self.assertTrue(caught.exception.witness.residual)

    def test_descent_certificate_is_recorded(self) -> None:
        built = phi_sym_to_wedge(2, 2, 2, Z)
        certificate = built.certificate()
        self.assertEqual(10, certificate["checked_tensors"])
        self.assertEqual(1, certificate["residual_rows"])
        self.assertEqual(16, certificate["residual_cols"])
        self.assertEqual("phi_nk", built.to_dict()["name"])


class SectionTests(unittest.TestCase):
    def test_q_is_a_zero_one_matrix_onto_the_fourth_power(self) -> None:
        q = q_projection(2, 2, Z).matrix
        self.assertEqual((5, 6), (q.rows, q.cols))
        self.assertTrue(all(value in (0, 1) for row in q.entries for value in row))
        self.assertEqual([1] * 6, [sum(q.column(j)) for j in range(6)])

    def test_q_after_varphi_is_a_binomial_multiple(self) -> None:
        for n, expected in ((2, 3), (3, 10)):
            for rank in (2, 3):
                with self.subTest(n=n, rank=rank):
                    composite = q_projection(n, rank, Z).matrix @ varphi_section(n, rank, Z).matrix
                    self.assertEqual(expected, scalar_multiple_of_identity(composite))

    def test_q_kills_the_image_of_i(self) -> None:
        for n in (3, 4):
            for rank in (2, 3):
                with self.subTest(n=n, rank=rank):
                    composite = q_projection(n, rank, Z).matrix @ include_i(n, rank, Z).matrix
                    self.assertTrue(composite.is_zero())

    def test_i_and_j_factor_through_f_and_g(self) -> None:
        rank = 2
        tail = ExactMatrix.identity(3, Z)
        self.assertEqual(
            include_i(3, rank, Z).matrix,
            extend_f(3, rank, Z).matrix @ kronecker(wedge_inclusion(rank, Z).matrix, tail),
        )
        self.assertEqual(
            retract_j(3, rank, Z).matrix,
            kronecker(tau_retraction(rank, Z).matrix, tail) @ extend_g(3, rank, Z).matrix,
        )

    def test_small_n_is_rejected(self) -> None:
        with self.assertRaises(ValueError):
            q_projection(1, 2, Z)
        with self.assertRaises(ValueError):
            include_i(2, 2, Z)


class ChainTests(unittest.TestCase):
    def test_tau_after_inclusion_is_three(self) -> None:
        tau = tau_retraction(2, Z).matrix
        self.assertEqual((1, 6), (tau.rows, tau.cols))
        self.assertEqual(3, scalar_multiple_of_identity(tau @ wedge_inclusion(2, Z).matrix))

    def test_chains_are_complexes_with_scalar_three(self) -> None:
        for rank in (2, 3, 4):
            alpha1, alpha2, alpha3, beta1, beta2, beta3 = (
                named.matrix for named in alpha_beta_chains(rank, Z)
            )
            with self.subTest(rank=rank):
                self.assertTrue((alpha2 @ alpha1).is_zero())
                self.assertTrue((alpha3 @ alpha2).is_zero())
                self.assertTrue((beta1 @ beta2).is_zero())
                self.assertTrue((beta2 @ beta3).is_zero())
                self.assertEqual(ExactMatrix.scalar(alpha3.rows, 3, Z), alpha3 @ beta3)
                self.assertEqual(ExactMatrix.scalar(alpha1.cols, 3, Z), beta1 @ alpha1)
                self.assertEqual(
                    ExactMatrix.scalar(alpha2.rows, 3, Z), alpha2 @ beta2 + beta3 @ alpha3
                )

    def test_dimensions_at_rank_four(self) -> None:
        alpha1, alpha2, alpha3 = alpha_beta_chains(4, Z)[:3]
        self.assertEqual(
            [1, 21, 55, 35],
            [alpha1.matrix.cols, alpha2.matrix.cols, alpha3.matrix.cols, alpha3.matrix.rows],
        )


class NaturalityTests(unittest.TestCase):
    def assert_natural(self, built, rank: int, seed: int) -> None:
        rng = random.Random(seed)
        for trial in range(100):
            f = random_unimodular(rank, rng)
            induced: dict = {}
            for named in built:
                for expr in (named.src_expr, named.dst_expr):
                    if expr not in induced:
                        induced[expr] = induced_map(expr, f)
                with self.subTest(trial=trial, name=named.name):
                    self.assertEqual(
                        induced[named.dst_expr] @ named.matrix,
                        named.matrix @ induced[named.src_expr],
                    )

    def test_every_map_commutes_with_invertible_maps_at_rank_two(self) -> None:
        built = [
            tau_retraction(2, Z),
            wedge_inclusion(2, Z),
            q_projection(2, 2, Z),
            q_projection(3, 2, Z),
            varphi_section(2, 2, Z),
            varphi_section(3, 2, Z),
            phi_sym_to_wedge(2, 2, 2, Z),
            phi_sym_to_wedge(2, 4, 2, Z),
            phi_sym_to_wedge(3, 2, 2, Z),
            phi_wedge_to_sym(2, 2, 2, Z),
            phi_wedge_to_sym(2, 3, 2, Z),
            extend_f(3, 2, Z),
            extend_g(3, 2, Z),
            include_i(3, 2, Z),
            retract_j(3, 2, Z),
            *alpha_beta_chains(2, Z),
        ]
        self.assert_natural(built, 2, 20240229)

    def test_degree_four_maps_commute_with_invertible_maps_at_rank_three(self) -> None:
        built = [
            tau_retraction(3, Z),
            wedge_inclusion(3, Z),
            q_projection(2, 3, Z),
            varphi_section(2, 3, Z),
            phi_sym_to_wedge(2, 2, 3, Z),
            phi_wedge_to_sym(2, 2, 3, Z),
            *alpha_beta_chains(3, Z),
        ]
        self.assert_natural(built, 3, 31)

    def test_lift_pushes_down_through_the_presentations(self) -> None:
        named = tau_retraction(2, Z)
        source = quotient_presentation(named.src_expr, 2, Z)
        target = quotient_presentation(named.dst_expr, 2, Z)
        self.assertEqual(named.matrix, target.q @ named.lift_matrix() @ source.sec)


class RoutingOracleTests(unittest.TestCase):
    """Every pure tensor, pushed through the lift and routed by hand, lands on the matrix column."""

    def assert_agrees_with_routing(self, named) -> None:
        src_index = label_index(named.src_expr, named.n)
        dst_index = label_index(named.dst_expr, named.n)
        zero = [0] * len(dst_index)
        for tensor in itertools.product(range(named.n), repeat=named.lift.degree):
            pushed = list(zero)
            for coefficient, image in named.lift.apply(tensor):
                routed = route_label(named.dst_expr, image)
                if routed is not None:
                    pushed[dst_index[routed[0]]] += coefficient * routed[1]
            source = route_label(named.src_expr, tensor)
            if source is None:
                expected = zero
            else:
                label, sign = source
                expected = [sign * value for value in named.matrix.column(src_index[label])]
            self.assertEqual(expected, pushed, f"{named.name} at {tensor}")

    def test_phi_maps(self) -> None:
        for rank in (2, 3):
            for n, k in ((2, 2), (2, 4), (3, 2)):
                with self.subTest(rank=rank, n=n, k=k):
                    self.assert_agrees_with_routing(phi_sym_to_wedge(n, k, rank, Z))
            for k, n in ((2, 2), (4, 2), (2, 3)):
                with self.subTest(rank=rank, k=k, n=n):
                    self.assert_agrees_with_routing(phi_wedge_to_sym(k, n, rank, Z))

    def test_quotient_and_section(self) -> None:
        for rank in (2, 3):
            for n in (2, 3):
                with self.subTest(rank=rank, n=n):
                    self.assert_agrees_with_routing(q_projection(n, rank, Z))
                    self.assert_agrees_with_routing(varphi_section(n, rank, Z))

    def test_extensions_and_their_factors(self) -> None:
        for rank in (2, 3):
            for build in (extend_f, extend_g, include_i, retract_j):
                named = build(3, rank, Z)
                with self.subTest(rank=rank, name=named.name):
                    self.assert_agrees_with_routing(named)

    def test_degree_four_chains(self) -> None:
        for rank in (2, 3):
            for named in (tau_retraction(rank, Z), wedge_inclusion(rank, Z), *alpha_beta_chains(rank, Z)):
                with self.subTest(rank=rank, name=named.name):
                    self.assert_agrees_with_routing(named)


class LocalFormulaTests(unittest.TestCase):
    def test_phi_two_two_pairs_rows_with_columns(self) -> None:
        named = phi_sym_to_wedge(2, 2, 3, Z)
        for label in enumerate_basis(named.src_expr, 3):
            (a11, a12), (a21, a22) = [[leaf.index for leaf in inner.children] for inner in label.children]
            image: dict[str, int] = defaultdict(int)
            add_symmetric(image, [wedge2(a11, a21), wedge2(a12, a22)])
            add_symmetric(image, [wedge2(a11, a22), wedge2(a12, a21)])
            with self.subTest(label=str(label)):
                self.assertEqual(nonzero(image), column_by_label(named, str(label)))

    def test_tau_sends_the_difference_to_three_squares(self) -> None:
        tau = tau_retraction(2, Z)
        square = "S[W[1,2],W[1,2]]"
        self.assertEqual(
            3,
            column_by_label(tau, "S[S[1,1],S[2,2]]")[square]
            - column_by_label(tau, "S[S[1,2],S[1,2]]")[square],
        )
        image: dict[str, int] = defaultdict(int)
        for tensor, weight in (((0, 0, 1, 1), 1), ((0, 1, 0, 1), -1)):
            for coefficient, pushed in tau.lift.apply(tensor):
                routed = route_label(tau.dst_expr, pushed)
                if routed is not None:
                    image[routed[0]] += weight * coefficient * routed[1]
        self.assertEqual({square: 3}, nonzero(image))

    def test_phi_of_a_power_of_one_wedge(self) -> None:
        for k in (2, 4):
            named = phi_wedge_to_sym(k, 2, 2, Z)
            image: dict[str, int] = defaultdict(int)
            for i in range(1, k + 1):
                left = "S[" + ",".join(["1"] * i + ["2"] * (k - i)) + "]"
                right = "S[" + ",".join(["1"] * (k - i) + ["2"] * i) + "]"
                add_symmetric(image, [(left, 1), (right, 1)], (-1) ** (k - i) * math.comb(k - 1, i - 1))
            source = "S[" + ",".join(["W[1,2]"] * k) + "]"
            with self.subTest(k=k):
                self.assertEqual(nonzero(image), column_by_label(named, source))

    def test_j_signs(self) -> None:
        for rank in (2, 3):
            named = retract_j(3, rank, Z)
            for label in enumerate_basis(named.src_expr, rank):
                a, b = [[leaf.index for leaf in inner.children] for inner in label.children]
                image: dict[str, int] = defaultdict(int)
                for i, j in itertools.combinations(range(3), 2):
                    rest_a = [value for p, value in enumerate(a) if p not in (i, j)]
                    for k, l in itertools.combinations(range(3), 2):
                        rest_b = [value for p, value in enumerate(b) if p not in (k, l)]
                        tail = "S[" + ",".join(sorted(f"S[{rest[0]}]" for rest in (rest_a, rest_b))) + "]"
                        for first, second in (
                            (wedge2(a[i], b[l]), wedge2(a[j], b[k])),
                            (wedge2(a[i], b[k]), wedge2(a[j], b[l])),
                        ):
                            if first is None or second is None:
                                continue
                            head = "S[" + ",".join(sorted((first[0], second[0]))) + "]"
                            image[f"T[{head},{tail}]"] -= first[1] * second[1]
                with self.subTest(rank=rank, label=str(label)):
                    self.assertEqual(nonzero(image), column_by_label(named, str(label)))


class RegistryTests(unittest.TestCase):
    def test_named_lookup(self) -> None:
        q = named_map("q", rank=2, spec=Z, n=2).matrix
        self.assertEqual((5, 6), (q.rows, q.cols))
        self.assertEqual("beta3", named_map("beta3", rank=2, spec=Z).name)
        with self.assertRaises(ValueError):
            named_map("psi", rank=2, spec=Z)


if __name__ == "__main__":
    unittest.main()
