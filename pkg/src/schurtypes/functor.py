"""Schur types as functors on free modules.

A Schur type of degree ``d`` applied to a free module of rank ``n`` is a
quotient of the d-th tensor power. :class:`QuotientPresentation` realizes
that quotient by routing basis tuples of the tensor power through the
syntax tree: symmetric nodes sort their children, wedge nodes sort with a
sign (and kill repeats), tensor nodes split positionally. Every canonical
basis label has a representative tuple, and projecting it gives the label
back with sign +1.

Endomorphisms of the tensor power are given either as dense matrices or as
:class:`~schurtypes.permutations.PermutationSum` lifts; :func:`descend`
checks that they respect the quotients one basis tuple at a time.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Callable, Iterable, Sequence

from .expressions import (
    Base,
    BasisLabel,
    DirectSum,
    LabelKey,
    SchurExpr,
    Sym,
    TensorModule,
    TensorProduct,
    Wedge,
    basis_keys,
    degree_of,
    expression_summands,
    format_expr,
    label_from_key,
)
from .matrices import ExactMatrix, ShapeMismatchError, UnsupportedRingError, block_matrix, kronecker
from .permutations import (
    PermutationSum,
    Tensor,
    check_permutation,
    tensor_index,
    tensor_tuples,
)
from .rings import RingSpec

LOGGER = logging.getLogger(__name__)

Routed = tuple[LabelKey, int]


class DegreeMismatchError(ValueError):
    """Raised when a map of tensor powers does not fit the degrees involved."""


def _single(expr: TensorModule) -> SchurExpr:
    if isinstance(expr, DirectSum):
        raise ValueError(f"Expected a single Schur type, got the direct sum {format_expr(expr)}")
    return expr


def _width(expr: SchurExpr) -> int:
    degree = degree_of(expr)
    assert isinstance(degree, int)
    return degree


def _sorting_sign(keys: Sequence[LabelKey]) -> int:
    inversions = sum(
        1 for i in range(len(keys)) for j in range(i + 1, len(keys)) if keys[i] > keys[j]
    )
    return -1 if inversions % 2 else 1


def _route(expr: SchurExpr, tensor: Tensor) -> Routed | None:
    """Image of a pure basis tensor in the quotient: ``(label key, sign)`` or ``None``."""
    if isinstance(expr, Base):
        return tensor[0], 1
    if isinstance(expr, TensorProduct):
        keys = []
        sign = 1
        start = 0
        for child in expr.children:
            width = _width(child)
            routed = _route(child, tensor[start : start + width])
            if routed is None:
                return None
            keys.append(routed[0])
            sign *= routed[1]
            start += width
        return tuple(keys), sign
    width = _width(expr.child)
    keys = []
    sign = 1
    for part in range(expr.r):
        routed = _route(expr.child, tensor[part * width : (part + 1) * width])
        if routed is None:
            return None
        keys.append(routed[0])
        sign *= routed[1]
    if isinstance(expr, Wedge):
        if len(set(keys)) < len(keys):
            return None
        sign *= _sorting_sign(keys)
    return tuple(sorted(keys)), sign


def _representative(expr: SchurExpr, key: LabelKey) -> Tensor:
    if isinstance(expr, Base):
        return (int(key),)
    if isinstance(expr, TensorProduct):
        return tuple(
            itertools.chain.from_iterable(
                _representative(child, item) for child, item in zip(expr.children, key)
            )
        )
    return tuple(
        itertools.chain.from_iterable(_representative(expr.child, item) for item in key)
    )


@dataclass(frozen=True)
class QuotientPresentation:
    """The projection ``Q`` of the tensor power onto a Schur type and its section ``Sec``.

    ``project`` and ``representative`` are the sparse forms of the columns
    of ``Q`` and ``Sec``; the dense matrices are only built on request.
    """

    expr: SchurExpr
    n: int
    spec: RingSpec
    keys: tuple[LabelKey, ...] = field(init=False, repr=False, compare=False)
    index_of: dict[LabelKey, int] = field(init=False, repr=False, compare=False)
    _routes: dict[Tensor, tuple[int, int] | None] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Rank of the base module must be positive, got {self.n}")
        _single(self.expr)
        keys = basis_keys(self.expr, self.n)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "index_of", {key: index for index, key in enumerate(keys)})

    @property
    def degree(self) -> int:
        return _width(self.expr)

    @property
    def size(self) -> int:
        return len(self.keys)

    @cached_property
    def labels(self) -> tuple[BasisLabel, ...]:
        return tuple(label_from_key(self.expr, key) for key in self.keys)

    def project(self, tensor: Tensor) -> tuple[int, int] | None:
        """Column of ``Q`` at a basis tuple: ``(label index, sign)`` or ``None`` for zero."""
        try:
            return self._routes[tensor]
        except KeyError:
            pass
        routed = _route(self.expr, tensor)
        result = None if routed is None else (self.index_of[routed[0]], routed[1])
        self._routes[tensor] = result
        return result

    def representative(self, index: int) -> Tensor:
        return _representative(self.expr, self.keys[index])

    @cached_property
    def q(self) -> ExactMatrix:
        zero = self.spec.zero
        width = self.n**self.degree
        grid = [[zero] * width for _ in range(self.size)]
        for column, tensor in enumerate(tensor_tuples(self.n, self.degree)):
            routed = self.project(tensor)
            if routed is not None:
                grid[routed[0]][column] = self.spec.from_int(routed[1])
        return ExactMatrix(
            self.spec, self.size, width, tuple(tuple(row) for row in grid)
        ).with_labels(None, self.labels)

    @cached_property
    def sec(self) -> ExactMatrix:
        zero = self.spec.zero
        height = self.n**self.degree
        grid = [[zero] * self.size for _ in range(height)]
        for column in range(self.size):
            grid[tensor_index(self.representative(column), self.n)][column] = self.spec.one
        return ExactMatrix(
            self.spec, height, self.size, tuple(tuple(row) for row in grid)
        ).with_labels(self.labels, None)


@lru_cache(maxsize=256)
def quotient_presentation(expr: SchurExpr, n: int, spec: RingSpec) -> QuotientPresentation:
    LOGGER.debug("Building presentation of %s at rank %s over %s", format_expr(expr), n, spec)
    return QuotientPresentation(expr, n, spec)


def tensor_tuple(index: int, n: int, d: int) -> Tensor:
    """Inverse of :func:`~schurtypes.permutations.tensor_index`."""
    digits = [0] * d
    for position in range(d - 1, -1, -1):
        index, digits[position] = divmod(index, n)
    return tuple(digits)


def permutation_endomorphism(sigma: Sequence[int], d: int, n: int, spec: RingSpec) -> ExactMatrix:
    """Matrix of the position permutation ``sigma`` (0-based images) on the d-th tensor power."""
    return PermutationSum.single(check_permutation(sigma, d)).to_matrix(n, spec)


def tensor_power_map(f: ExactMatrix, d: int) -> ExactMatrix:
    if not f.is_square:
        raise ShapeMismatchError(f"Tensor powers need a square matrix, got {f.rows}x{f.cols}")
    if d < 1:
        raise ValueError(f"Tensor power must be positive, got {d}")
    result = f
    for _ in range(d - 1):
        result = kronecker(result, f)
    return result


def _nonzero_columns(f: ExactMatrix) -> list[list[tuple[int, Any]]]:
    return [
        [(row, value) for row, value in enumerate(f.column(col)) if value] for col in range(f.cols)
    ]


def _expand_pure_tensor(
    columns: list[list[tuple[int, Any]]], tensor: Tensor, one: Any
) -> list[tuple[Tensor, Any]]:
    """``f e_{t1} (x) ... (x) f e_{td}`` as a list of (basis tuple, coefficient)."""
    partial: list[tuple[Tensor, Any]] = [((), one)]
    for position in tensor:
        partial = [
            (prefix + (row,), coefficient * value)
            for prefix, coefficient in partial
            for row, value in columns[position]
        ]
    return partial


def _accumulate(
    presentation: QuotientPresentation, terms: Iterable[tuple[Tensor, Any]]
) -> dict[int, Any]:
    vector: dict[int, Any] = {}
    for tensor, coefficient in terms:
        routed = presentation.project(tensor)
        if routed is None:
            continue
        index, sign = routed
        current = vector.get(index)
        if current is None:
            vector[index] = coefficient if sign > 0 else -coefficient
        else:
            vector[index] = current + coefficient if sign > 0 else current - coefficient
    return {index: value for index, value in vector.items() if value}


def _matrix_from_columns(
    spec: RingSpec, rows: int, columns: Sequence[dict[int, Any]]
) -> ExactMatrix:
    zero = spec.zero
    grid = [[zero] * len(columns) for _ in range(rows)]
    for col, vector in enumerate(columns):
        for row, value in vector.items():
            grid[row][col] = value
    return ExactMatrix(spec, rows, len(columns), tuple(tuple(row) for row in grid))


def _induced_single(expr: SchurExpr, f: ExactMatrix) -> ExactMatrix:
    presentation = quotient_presentation(expr, f.rows, f.spec)
    columns = _nonzero_columns(f)
    one = f.spec.one
    images = [
        _accumulate(presentation, _expand_pure_tensor(columns, presentation.representative(j), one))
        for j in range(presentation.size)
    ]
    return _matrix_from_columns(f.spec, presentation.size, images).with_labels(
        presentation.labels, presentation.labels
    )


def _block_diagonal(blocks: Sequence[ExactMatrix], spec: RingSpec) -> ExactMatrix:
    if len(blocks) == 1:
        return blocks[0]
    grid = [
        [
            block if i == j else ExactMatrix.zeros(block.rows, other.cols, spec)
            for j, other in enumerate(blocks)
        ]
        for i, block in enumerate(blocks)
    ]
    labels = tuple(
        label for block in blocks for label in (block.domain_labels or ())
    )
    return block_matrix(grid).with_labels(labels, labels)


def induced_map(expr: TensorModule, f: ExactMatrix) -> ExactMatrix:
    """``Q f^{(x)d} Sec`` for each summand, block diagonal over direct sums."""
    if not f.is_square:
        raise ShapeMismatchError(f"Induced maps need a square matrix, got {f.rows}x{f.cols}")
    if f.rows < 1:
        raise ShapeMismatchError("Induced maps need a module of positive rank")
    blocks = [_induced_single(summand, f) for summand in expression_summands(expr)]
    return _block_diagonal(blocks, f.spec)


def _recursive(expr: SchurExpr, f: ExactMatrix) -> ExactMatrix:
    if isinstance(expr, Base):
        return f
    if isinstance(expr, TensorProduct):
        result = _recursive(expr.children[0], f)
        for child in expr.children[1:]:
            result = kronecker(result, _recursive(child, f))
        return result
    inner = _recursive(expr.child, f)
    if inner.rows == 0:
        return ExactMatrix.zeros(0, 0, f.spec)
    node = Sym(expr.r, Base()) if isinstance(expr, Sym) else Wedge(expr.r, Base())
    return _induced_single(node, inner)


def induced_map_recursive(expr: TensorModule, f: ExactMatrix) -> ExactMatrix:
    """Induced map computed node by node, each node acting on its child's induced map."""
    if not f.is_square:
        raise ShapeMismatchError(f"Induced maps need a square matrix, got {f.rows}x{f.cols}")
    blocks = []
    for summand in expression_summands(expr):
        labels = quotient_presentation(summand, f.rows, f.spec).labels
        blocks.append(_recursive(summand, f).with_labels(labels, labels))
    return _block_diagonal(blocks, f.spec)


@dataclass(frozen=True)
class DescentWitness:
    """A kernel element of the source projection whose image does not vanish."""

    kernel_vector: tuple[tuple[Tensor, int], ...]
    residual: tuple[tuple[str, str], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kernel_vector": [
                {"tensor": [value + 1 for value in tensor], "coefficient": coefficient}
                for tensor, coefficient in self.kernel_vector
            ],
            "residual": [{"label": label, "value": value} for label, value in self.residual],
        }


@dataclass(frozen=True)
class DescentResult:
    descends: bool
    induced: ExactMatrix | None
    witness: DescentWitness | None = None
    checked_tensors: int = 0


def _image_function(
    phi: ExactMatrix | PermutationSum, d: int, n: int, spec: RingSpec
) -> Callable[[Tensor], list[tuple[Tensor, Any]]]:
    if isinstance(phi, PermutationSum):
        if phi.degree != d:
            raise DegreeMismatchError(f"Lift acts on {phi.degree} positions, expected {d}")
        coefficients = {value: spec.from_int(value) for _, value in phi.terms}
        return lambda tensor: [
            (image, coefficients[value]) for value, image in phi.apply(tensor)
        ]
    size = n**d
    if (phi.rows, phi.cols) != (size, size):
        raise DegreeMismatchError(
            f"Lift is {phi.rows}x{phi.cols}, expected {size}x{size} for degree {d} at rank {n}"
        )
    if phi.spec != spec:
        raise UnsupportedRingError(f"Lift lives over {phi.spec}, expected {spec}")
    rows_of = _nonzero_columns(phi)
    return lambda tensor: [
        (tensor_tuple(row, n, d), value) for row, value in rows_of[tensor_index(tensor, n)]
    ]


def descend(
    phi: ExactMatrix | PermutationSum,
    src: SchurExpr,
    dst: SchurExpr,
    n: int,
    spec: RingSpec,
    *,
    check: bool = True,
) -> DescentResult:
    """Push an endomorphism of the tensor power down to ``src -> dst``.

    The induced matrix has columns ``Q_dst phi Sec_src``. With ``check`` every
    basis tuple ``t`` is compared with its representative: ``Q_dst phi`` must
    agree on ``t`` and ``sign * rep(t)`` (or vanish on ``t`` when the source
    kills it). The first disagreement is returned as a witness.
    """
    src, dst = _single(src), _single(dst)
    d = _width(src)
    if _width(dst) != d:
        raise DegreeMismatchError(
            f"{format_expr(src)} has degree {d} but {format_expr(dst)} has degree {_width(dst)}"
        )
    image = _image_function(phi, d, n, spec)
    source = quotient_presentation(src, n, spec)
    target = quotient_presentation(dst, n, spec)
    columns = [_accumulate(target, image(source.representative(j))) for j in range(source.size)]

    witness = None
    checked = 0
    if check:
        for tensor in tensor_tuples(n, d):
            routed = source.project(tensor)
            if routed is None:
                expected: dict[int, Any] = {}
                kernel = ((tensor, 1),)
            else:
                index, sign = routed
                representative = source.representative(index)
                if representative == tensor:
                    continue
                expected = {
                    row: value if sign > 0 else -value for row, value in columns[index].items()
                }
                kernel = ((tensor, 1), (representative, -sign))
            checked += 1
            actual = _accumulate(target, image(tensor))
            residual = {
                row: actual.get(row, spec.zero) - expected.get(row, spec.zero)
                for row in set(actual) | set(expected)
            }
            residual = {row: value for row, value in residual.items() if value}
            if residual:
                witness = DescentWitness(
                    kernel,
                    tuple(
                        (str(target.labels[row]), spec.format_value(value))
                        for row, value in sorted(residual.items())
                    ),
                )
                LOGGER.debug(
                    "Descent from %s to %s fails at %s",
                    format_expr(src),
                    format_expr(dst),
                    tensor,
                )
                break

    if witness is not None:
        return DescentResult(False, None, witness, checked)
    induced = _matrix_from_columns(spec, target.size, columns).with_labels(
        source.labels, target.labels
    )
    return DescentResult(True, induced, None, checked)


def random_integer_matrix(n: int, bound: int, rng: random.Random) -> ExactMatrix:
    """Entries drawn uniformly from ``[-bound, bound]``."""
    return ExactMatrix.from_rows(
        RingSpec.integers(),
        [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)],
    )


def random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> ExactMatrix:
    """A product of random elementary matrices; the determinant is +1 or -1."""
    grid = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        if n == 1:
            break
        i, j = rng.sample(range(n), 2)
        kind = rng.random()
        if kind < 0.15:
            grid[i], grid[j] = grid[j], grid[i]
        else:
            factor = rng.choice((-2, -1, 1, 2))
            grid[i] = [a + factor * b for a, b in zip(grid[i], grid[j])]
    if n == 1 and rng.random() < 0.5:
        grid[0][0] = -1
    return ExactMatrix.from_rows(RingSpec.integers(), grid)
