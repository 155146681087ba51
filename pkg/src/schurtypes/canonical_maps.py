"""Named homomorphisms between Schur types, built from permutation-sum lifts.

Each map is an integer combination of position permutations of the tensor
power, pushed down to the quotients by :func:`~schurtypes.functor.descend`.
Local formulas on representatives are never used to define a map; they
only serve as test oracles.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable

from .expressions import Base, SchurExpr, Sym, TensorProduct, Wedge, format_expr
from .functor import DescentResult, DescentWitness, descend
from .matrices import ExactMatrix, scalar_multiple_of_identity
from .permutations import PermutationSum, arrangement, cycle_permutation, permutation_sign
from .rings import RingElement, RingSpec

LOGGER = logging.getLogger(__name__)

M = Base()


class MapParameterError(ValueError):
    """Raised for map names, ranks or degrees a canonical map is not defined for."""


class DescentError(RuntimeError):
    """Raised when a lift does not respect the source and target quotients."""

    def __init__(self, message: str, witness: DescentWitness) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class NamedMap:
    name: str
    src_expr: SchurExpr
    dst_expr: SchurExpr
    n: int
    matrix: ExactMatrix
    lift: PermutationSum
    descent: DescentResult

    def lift_matrix(self, spec: RingSpec | None = None) -> ExactMatrix:
        return self.lift.to_matrix(self.n, spec or self.matrix.spec)

    def certificate(self) -> dict[str, Any]:
        return {
            "checked_tensors": self.descent.checked_tensors,
            "residual_rows": self.matrix.rows,
            "residual_cols": self.n**self.lift.degree,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "src": format_expr(self.src_expr),
            "dst": format_expr(self.dst_expr),
            "rank": self.n,
            "lift_terms": len(self.lift.terms),
            "matrix": self.matrix.to_json_dict(),
            "descent_certificate": self.certificate(),
        }


def build_named_map(
    name: str,
    lift: PermutationSum,
    src: SchurExpr,
    dst: SchurExpr,
    rank: int,
    spec: RingSpec,
    *,
    check: bool = True,
) -> NamedMap:
    result = descend(lift, src, dst, rank, spec, check=check)
    if not result.descends:
        assert result.witness is not None
        raise DescentError(
            f"{name} does not descend from {format_expr(src)} to {format_expr(dst)} at rank {rank}",
            result.witness,
        )
    assert result.induced is not None
    LOGGER.debug(
        "Built %s: %sx%s from %s lift term(s)",
        name,
        result.induced.rows,
        result.induced.cols,
        len(lift.terms),
    )
    return NamedMap(name, src, dst, rank, result.induced, lift, result)


def _check_rank(rank: int) -> None:
    if rank < 1:
        raise MapParameterError(f"Rank must be positive, got {rank}")


def phi_sym_to_wedge_lift(n: int, k: int) -> PermutationSum:
    """Block ``i`` of the output collects ``a[0][i], a[1][s1(i)], ..., a[n-1][s_{n-1}(i)]``.

    The input is ``n`` blocks of ``k`` factors; the sum runs over all
    ``s1 .. s_{n-1}`` in the symmetric group on ``k`` letters.
    """
    terms = []
    for sigmas in itertools.product(itertools.permutations(range(k)), repeat=n - 1):
        chosen = (tuple(range(k)),) + sigmas
        order = [j * k + chosen[j][i] for i in range(k) for j in range(n)]
        terms.append((arrangement(order), 1))
    return PermutationSum.from_terms(n * k, terms)


def phi_wedge_to_sym_lift(k: int, n: int) -> PermutationSum:
    """Block ``i`` of the output collects ``a[0][i], a[1][t1(i)], ..., a[k-1][t_{k-1}(i)]``.

    The input is ``k`` blocks of ``n`` factors; each term carries the
    product of the signs of ``t1 .. t_{k-1}``.
    """
    terms = []
    for taus in itertools.product(itertools.permutations(range(n)), repeat=k - 1):
        chosen = (tuple(range(n)),) + taus
        order = [j * n + chosen[j][i] for i in range(n) for j in range(k)]
        sign = math.prod(permutation_sign(tau) for tau in taus)
        terms.append((arrangement(order), sign))
    return PermutationSum.from_terms(n * k, terms)


def phi_sym_to_wedge(
    n: int,
    k: int,
    rank: int,
    spec: RingSpec,
    *,
    allow_odd: bool = False,
    check: bool = True,
) -> NamedMap:
    """``S^n(S^k M) -> S^k(W^n M)``; odd ``k`` needs ``allow_odd``."""
    _check_rank(rank)
    if n < 1 or k < 1:
        raise MapParameterError(f"phi needs positive n and k, got n={n}, k={k}")
    if k % 2 and not allow_odd:
        raise MapParameterError(f"phi from S^{n}(S^{k}) to S^{k}(W^{n}) needs an even k")
    return build_named_map(
        "phi_nk",
        phi_sym_to_wedge_lift(n, k),
        Sym(n, Sym(k, M)),
        Sym(k, Wedge(n, M)),
        rank,
        spec,
        check=check,
    )


def phi_wedge_to_sym(k: int, n: int, rank: int, spec: RingSpec, *, check: bool = True) -> NamedMap:
    """``S^k(W^n M) -> S^n(S^k M)``."""
    _check_rank(rank)
    if n < 1 or k < 1:
        raise MapParameterError(f"phi needs positive n and k, got n={n}, k={k}")
    return build_named_map(
        "phi_kn",
        phi_wedge_to_sym_lift(k, n),
        Sym(k, Wedge(n, M)),
        Sym(n, Sym(k, M)),
        rank,
        spec,
        check=check,
    )


def composition_scalar_phi(
    n: int, k: int, rank: int, spec: RingSpec, *, check: bool = True
) -> RingElement | None:
    """The scalar ``c`` with ``phi_nk . phi_kn = c * id`` on ``S^k(W^n M)``, if there is one."""
    if rank != n:
        raise MapParameterError(f"The composition scalar is taken at rank n={n}, got rank {rank}")
    forward = phi_wedge_to_sym(k, n, rank, spec, check=check)
    backward = phi_sym_to_wedge(n, k, rank, spec, allow_odd=True, check=check)
    return scalar_multiple_of_identity(backward.matrix @ forward.matrix)


def _check_degree_at_least(n: int, minimum: int, name: str) -> None:
    if n < minimum:
        raise MapParameterError(f"{name} needs n >= {minimum}, got {n}")


def q_projection(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``S^2(S^n M) -> S^{2n} M`` induced by the identity."""
    _check_rank(rank)
    _check_degree_at_least(n, 2, "q")
    return build_named_map(
        "q", PermutationSum.identity(2 * n), Sym(2, Sym(n, M)), Sym(2 * n, M), rank, spec
    )


def varphi_lift(n: int) -> PermutationSum:
    """Sum over the n-subsets ``N`` containing the first factor of ``(a_N) (x) (a_rest)``."""
    positions = range(2 * n)
    terms = []
    for rest in itertools.combinations(range(1, 2 * n), n - 1):
        chosen = (0,) + rest
        complement = [p for p in positions if p not in chosen]
        terms.append((arrangement(list(chosen) + complement), 1))
    return PermutationSum.from_terms(2 * n, terms)


def varphi_section(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``S^{2n} M -> S^2(S^n M)``; composed with ``q`` it is ``C(2n-1, n-1)`` times the identity."""
    _check_rank(rank)
    _check_degree_at_least(n, 2, "varphi")
    return build_named_map(
        "varphi", varphi_lift(n), Sym(2 * n, M), Sym(2, Sym(n, M)), rank, spec
    )


def extend_f_lift(n: int) -> PermutationSum:
    """Send ``(t1 t2)(t3 t4) . (a)(b)`` to the four regroupings of the t factors.

    ``(t1 t3 a)(t2 t4 b) + (t1 t4 a)(t2 t3 b) + (t2 t4 a)(t1 t3 b) + (t2 t3 a)(t1 t4 b)``
    """
    a = list(range(4, n + 2))
    b = list(range(n + 2, 2 * n))
    pairs = (([0, 2], [1, 3]), ([0, 3], [1, 2]), ([1, 3], [0, 2]), ([1, 2], [0, 3]))
    return PermutationSum.from_terms(
        2 * n, ((arrangement(left + a + right + b), 1) for left, right in pairs)
    )


def _f_source(n: int) -> SchurExpr:
    return TensorProduct((Sym(2, Sym(2, M)), Sym(2, Sym(n - 2, M))))


def _i_source(n: int) -> SchurExpr:
    return TensorProduct((Sym(2, Wedge(2, M)), Sym(2, Sym(n - 2, M))))


def extend_f(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``S^2(S^2 M) (x) S^2(S^{n-2} M) -> S^2(S^n M)``."""
    _check_rank(rank)
    _check_degree_at_least(n, 3, "f")
    return build_named_map("f", extend_f_lift(n), _f_source(n), Sym(2, Sym(n, M)), rank, spec)


def include_i(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``f . (phi_{2,2} (x) id)``, the map whose composite with ``q`` vanishes."""
    _check_rank(rank)
    _check_degree_at_least(n, 3, "i")
    lift = extend_f_lift(n).compose(
        phi_wedge_to_sym_lift(2, 2).tensor(PermutationSum.identity(2 * n - 4))
    )
    return build_named_map("i", lift, _i_source(n), Sym(2, Sym(n, M)), rank, spec)


def extend_g_lift(n: int) -> PermutationSum:
    """Sum over ``i<j`` of the first block and ``k<l`` of the second of the two pairings."""
    a = list(range(n))
    b = list(range(n, 2 * n))
    terms = []
    for i, j in itertools.combinations(a, 2):
        rest_a = [p for p in a if p not in (i, j)]
        for k, l in itertools.combinations(b, 2):
            rest_b = [p for p in b if p not in (k, l)]
            terms.append((arrangement([i, k, j, l] + rest_a + rest_b), 1))
            terms.append((arrangement([i, l, j, k] + rest_a + rest_b), 1))
    return PermutationSum.from_terms(2 * n, terms)


def extend_g(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``S^2(S^n M) -> S^2(S^2 M) (x) S^2(S^{n-2} M)``."""
    _check_rank(rank)
    _check_degree_at_least(n, 3, "g")
    return build_named_map("g", extend_g_lift(n), Sym(2, Sym(n, M)), _f_source(n), rank, spec)


def retract_j(n: int, rank: int, spec: RingSpec) -> NamedMap:
    """``(phi_{2,2} (x) id) . g``."""
    _check_rank(rank)
    _check_degree_at_least(n, 3, "j")
    lift = (
        phi_sym_to_wedge_lift(2, 2)
        .tensor(PermutationSum.identity(2 * n - 4))
        .compose(extend_g_lift(n))
    )
    return build_named_map("j", lift, Sym(2, Sym(n, M)), _i_source(n), rank, spec)


def _cycles(*cycles: tuple[int, ...]) -> PermutationSum:
    return PermutationSum.single(cycle_permutation(cycles, 4))


IDENTITY_4 = PermutationSum.identity(4)
SWAP_23 = _cycles((2, 3))
CYCLE_234 = _cycles((2, 3, 4))

F1 = IDENTITY_4 - SWAP_23 + CYCLE_234
F2 = SWAP_23 - CYCLE_234
F3 = IDENTITY_4
G1 = IDENTITY_4
G2 = SWAP_23 + CYCLE_234
G3 = IDENTITY_4 + SWAP_23 + CYCLE_234

W4 = Wedge(4, M)
S2W2 = Sym(2, Wedge(2, M))
S2S2 = Sym(2, Sym(2, M))
S4 = Sym(4, M)


def tau_retraction(rank: int, spec: RingSpec) -> NamedMap:
    """``S^2(S^2 M) -> S^2(W^2 M)`` from ``s(23) + s(234)``."""
    _check_rank(rank)
    return build_named_map("tau", G2, S2S2, S2W2, rank, spec)


def wedge_inclusion(rank: int, spec: RingSpec) -> NamedMap:
    """``S^2(W^2 M) -> S^2(S^2 M)`` from ``s(23) - s(234)``."""
    _check_rank(rank)
    return build_named_map("incl", F2, S2W2, S2S2, rank, spec)


def alpha_beta_chains(rank: int, spec: RingSpec) -> list[NamedMap]:
    """``[alpha1, alpha2, alpha3, beta1, beta2, beta3]``.

    The alphas run ``W^4 -> S^2(W^2) -> S^2(S^2) -> S^4``, the betas the
    other way.
    """
    _check_rank(rank)
    return [
        build_named_map("alpha1", F1, W4, S2W2, rank, spec),
        build_named_map("alpha2", F2, S2W2, S2S2, rank, spec),
        build_named_map("alpha3", F3, S2S2, S4, rank, spec),
        build_named_map("beta1", G1, S2W2, W4, rank, spec),
        build_named_map("beta2", G2, S2S2, S2W2, rank, spec),
        build_named_map("beta3", G3, S4, S2S2, rank, spec),
    ]


def _chain_member(index: int) -> Callable[..., NamedMap]:
    def build(rank: int, spec: RingSpec, **_: Any) -> NamedMap:
        return alpha_beta_chains(rank, spec)[index]

    return build


MAP_BUILDERS: dict[str, Callable[..., NamedMap]] = {
    "phi_nk": lambda rank, spec, n, k, allow_odd=False, **_: phi_sym_to_wedge(
        n, k, rank, spec, allow_odd=allow_odd
    ),
    "phi_kn": lambda rank, spec, n, k, **_: phi_wedge_to_sym(k, n, rank, spec),
    "q": lambda rank, spec, n, **_: q_projection(n, rank, spec),
    "varphi": lambda rank, spec, n, **_: varphi_section(n, rank, spec),
    "f": lambda rank, spec, n, **_: extend_f(n, rank, spec),
    "g": lambda rank, spec, n, **_: extend_g(n, rank, spec),
    "i": lambda rank, spec, n, **_: include_i(n, rank, spec),
    "j": lambda rank, spec, n, **_: retract_j(n, rank, spec),
    "tau": lambda rank, spec, **_: tau_retraction(rank, spec),
    "incl": lambda rank, spec, **_: wedge_inclusion(rank, spec),
    **{f"alpha{index + 1}": _chain_member(index) for index in range(3)},
    **{f"beta{index + 1}": _chain_member(index + 3) for index in range(3)},
}


def named_map(
    name: str,
    *,
    rank: int,
    spec: RingSpec,
    n: int = 2,
    k: int = 2,
    allow_odd: bool = False,
) -> NamedMap:
    """Look up a map by its command-line name."""
    try:
        builder = MAP_BUILDERS[name]
    except KeyError:
        known = ", ".join(sorted(MAP_BUILDERS))
        raise MapParameterError(f"Unknown map {name!r}; expected one of {known}") from None
    return builder(rank=rank, spec=spec, n=n, k=k, allow_odd=allow_odd)
