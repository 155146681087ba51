"""Exact dense matrices over the supported scalar rings."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .rings import RingElement, RingSpec, parse_scalar

LOGGER = logging.getLogger(__name__)


class ShapeMismatchError(ValueError):
    """Raised when matrix dimensions do not fit the requested operation."""


class MatrixFormatError(ValueError):
    """Raised when a matrix file does not hold a matrix payload."""


class UnsupportedRingError(TypeError):
    """Raised when an operation needs a ring the matrix does not live in."""


@dataclass(frozen=True)
class ExactMatrix:
    """A rows x cols grid of raw ring values sharing one :class:`RingSpec`.

    Labels are optional and never take part in equality: two matrices are
    equal when their rings, shapes and entries agree.
    """

    spec: RingSpec
    rows: int
    cols: int
    entries: tuple[tuple[Any, ...], ...]
    domain_labels: tuple[Any, ...] | None = field(default=None, compare=False)
    codomain_labels: tuple[Any, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeMismatchError(f"Negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ShapeMismatchError(f"Entries do not form a {self.rows}x{self.cols} grid")
        if self.domain_labels is not None and len(self.domain_labels) != self.cols:
            raise ShapeMismatchError(
                f"{len(self.domain_labels)} domain label(s) for {self.cols} column(s)"
            )
        if self.codomain_labels is not None and len(self.codomain_labels) != self.rows:
            raise ShapeMismatchError(
                f"{len(self.codomain_labels)} codomain label(s) for {self.rows} row(s)"
            )

    @classmethod
    def from_rows(
        cls,
        spec: RingSpec,
        rows: Sequence[Sequence[Any]],
        *,
        cols: int | None = None,
    ) -> ExactMatrix:
        """Build a matrix from nested sequences of ints, fractions, strings or elements."""
        entries = tuple(tuple(spec.coerce(value) for value in row) for row in rows)
        width = len(entries[0]) if entries else (cols or 0)
        return cls(spec, len(entries), width, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int, spec: RingSpec) -> ExactMatrix:
        zero = spec.zero
        return cls(spec, rows, cols, tuple((zero,) * cols for _ in range(rows)))

    @classmethod
    def scalar(cls, size: int, value: Any, spec: RingSpec) -> ExactMatrix:
        raw = spec.coerce(value)
        zero = spec.zero
        return cls(
            spec,
            size,
            size,
            tuple(tuple(raw if i == j else zero for j in range(size)) for i in range(size)),
        )

    @classmethod
    def identity(cls, size: int, spec: RingSpec) -> ExactMatrix:
        return cls.scalar(size, 1, spec)

    @classmethod
    def diagonal(cls, values: Sequence[Any], spec: RingSpec) -> ExactMatrix:
        raws = [spec.coerce(value) for value in values]
        zero = spec.zero
        size = len(raws)
        return cls(
            spec,
            size,
            size,
            tuple(tuple(raws[i] if i == j else zero for j in range(size)) for i in range(size)),
        )

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> RingElement:
        row, col = index
        return RingElement(self.spec, self.entries[row][col])

    def row(self, index: int) -> tuple[Any, ...]:
        return self.entries[index]

    def column(self, index: int) -> tuple[Any, ...]:
        return tuple(row[index] for row in self.entries)

    def is_zero(self) -> bool:
        return not any(value for row in self.entries for value in row)

    def transpose(self) -> ExactMatrix:
        entries = tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols))
        return ExactMatrix(
            self.spec,
            self.cols,
            self.rows,
            tuple(tuple(row) for row in entries),
            domain_labels=self.codomain_labels,
            codomain_labels=self.domain_labels,
        )

    def with_labels(
        self,
        domain_labels: Sequence[Any] | None,
        codomain_labels: Sequence[Any] | None,
    ) -> ExactMatrix:
        return ExactMatrix(
            self.spec,
            self.rows,
            self.cols,
            self.entries,
            domain_labels=None if domain_labels is None else tuple(domain_labels),
            codomain_labels=None if codomain_labels is None else tuple(codomain_labels),
        )

    def _check_same_shape(self, other: ExactMatrix) -> None:
        if self.spec != other.spec:
            raise UnsupportedRingError(f"Matrices over {self.spec} and {other.spec} do not mix")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatchError(
                f"Shapes {self.rows}x{self.cols} and {other.rows}x{other.cols} differ"
            )

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        self._check_same_shape(other)
        return ExactMatrix(
            self.spec,
            self.rows,
            self.cols,
            tuple(
                tuple(a + b for a, b in zip(left, right))
                for left, right in zip(self.entries, other.entries)
            ),
            domain_labels=self.domain_labels,
            codomain_labels=self.codomain_labels,
        )

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def __neg__(self) -> ExactMatrix:
        return self.scale(-1)

    def scale(self, value: Any) -> ExactMatrix:
        raw = self.spec.coerce(value)
        return ExactMatrix(
            self.spec,
            self.rows,
            self.cols,
            tuple(tuple(raw * entry for entry in row) for row in self.entries),
            domain_labels=self.domain_labels,
            codomain_labels=self.codomain_labels,
        )

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        return matmul(self, other)

    def change_ring(self, spec: RingSpec) -> ExactMatrix:
        """Re-express every entry in ``spec``; fails for values outside it."""
        if spec == self.spec:
            return self
        if self.spec.embeds_in_rationals:
            convert = lambda value: spec.coerce(self.spec.to_fraction(value))  # noqa: E731
        else:
            convert = spec.coerce
        return ExactMatrix(
            spec,
            self.rows,
            self.cols,
            tuple(tuple(convert(value) for value in row) for row in self.entries),
            domain_labels=self.domain_labels,
            codomain_labels=self.codomain_labels,
        )

    def formatted_rows(self) -> list[list[str]]:
        return [[self.spec.format_value(value) for value in row] for row in self.entries]

    def to_json_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "ring": str(self.spec),
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.formatted_rows(),
        }
        if self.domain_labels is not None:
            payload["domain_labels"] = [str(label) for label in self.domain_labels]
        if self.codomain_labels is not None:
            payload["codomain_labels"] = [str(label) for label in self.codomain_labels]
        return payload

    @classmethod
    def from_json_dict(cls, payload: dict[str, Any]) -> ExactMatrix:
        missing = {"ring", "rows", "cols", "entries"} - set(payload)
        if missing:
            raise MatrixFormatError("Matrix JSON is missing key(s): " + ", ".join(sorted(missing)))
        spec = RingSpec.parse(str(payload["ring"]))
        rows, cols = int(payload["rows"]), int(payload["cols"])
        grid = payload["entries"]
        if len(grid) != rows or any(len(row) != cols for row in grid):
            raise ShapeMismatchError(f"Entries do not form the declared {rows}x{cols} grid")
        entries = tuple(
            tuple(parse_scalar(str(value), spec).value for value in row) for row in grid
        )
        return cls(
            spec,
            rows,
            cols,
            entries,
            domain_labels=_optional_tuple(payload.get("domain_labels")),
            codomain_labels=_optional_tuple(payload.get("codomain_labels")),
        )


def _optional_tuple(values: Iterable[Any] | None) -> tuple[Any, ...] | None:
    return None if values is None else tuple(values)


def load_matrix(path: Path) -> ExactMatrix:
    with path.open("r", encoding="utf-8") as file_obj:
        return ExactMatrix.from_json_dict(json.load(file_obj))


def dump_matrix(matrix: ExactMatrix, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as file_obj:
        json.dump(matrix.to_json_dict(), file_obj, indent=2, sort_keys=True)
        file_obj.write("\n")


def matmul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact product; codomain labels come from ``a``, domain labels from ``b``."""
    if a.spec != b.spec:
        raise UnsupportedRingError(f"Cannot multiply matrices over {a.spec} and {b.spec}")
    if a.cols != b.rows:
        raise ShapeMismatchError(f"Cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    zero = a.spec.zero
    rows = []
    for left in a.entries:
        accumulator = [zero] * b.cols
        for value, right in zip(left, b.entries):
            if not value:
                continue
            for j, other in enumerate(right):
                if other:
                    accumulator[j] = accumulator[j] + value * other
        rows.append(tuple(accumulator))
    return ExactMatrix(
        a.spec,
        a.rows,
        b.cols,
        tuple(rows),
        domain_labels=b.domain_labels,
        codomain_labels=a.codomain_labels,
    )


def kronecker(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product with the row index of ``a`` most significant."""
    if a.spec != b.spec:
        raise UnsupportedRingError(f"Cannot tensor matrices over {a.spec} and {b.spec}")
    rows = []
    for left in a.entries:
        for right in b.entries:
            rows.append(tuple(x * y for x in left for y in right))
    return ExactMatrix(a.spec, a.rows * b.rows, a.cols * b.cols, tuple(rows))


def block_matrix(blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    """Assemble a matrix from a grid of blocks; zero-sized blocks are allowed."""
    if not blocks or not blocks[0]:
        raise ShapeMismatchError("A block matrix needs at least one block")
    spec = blocks[0][0].spec
    heights = [row[0].rows for row in blocks]
    widths = [block.cols for block in blocks[0]]
    rows: list[tuple[Any, ...]] = []
    for band, height in zip(blocks, heights):
        if len(band) != len(widths):
            raise ShapeMismatchError("Block rows have different lengths")
        for block, width in zip(band, widths):
            if block.spec != spec:
                raise UnsupportedRingError("Blocks live in different rings")
            if (block.rows, block.cols) != (height, width):
                raise ShapeMismatchError(
                    f"Block {block.rows}x{block.cols} does not fit slot {height}x{width}"
                )
        for i in range(height):
            rows.append(tuple(value for block in band for value in block.entries[i]))
    return ExactMatrix(spec, sum(heights), sum(widths), tuple(rows))


def determinant(a: ExactMatrix) -> RingElement:
    """Fraction-free Bareiss elimination; every division is exact."""
    if not a.is_square:
        raise ShapeMismatchError(f"Determinant of a non-square {a.rows}x{a.cols} matrix")
    spec = a.spec
    size = a.rows
    if size == 0:
        return RingElement(spec, spec.one)
    grid = [list(row) for row in a.entries]
    sign = 1
    previous = None
    for k in range(size - 1):
        if not grid[k][k]:
            for i in range(k + 1, size):
                if grid[i][k]:
                    grid[k], grid[i] = grid[i], grid[k]
                    sign = -sign
                    break
            else:
                return RingElement(spec, spec.zero)
        pivot = grid[k][k]
        for i in range(k + 1, size):
            row = grid[i]
            factor = row[k]
            pivot_row = grid[k]
            for j in range(k + 1, size):
                value = pivot * row[j] - factor * pivot_row[j]
                if previous is not None:
                    value = spec.exact_div(value, previous)
                row[j] = value
        previous = pivot
    result = grid[size - 1][size - 1]
    return RingElement(spec, -result if sign < 0 else result)


def _rational_grid(a: ExactMatrix) -> list[list[Fraction]]:
    if not a.spec.embeds_in_rationals:
        raise UnsupportedRingError(f"{a.spec} does not embed in the rationals")
    return [[a.spec.to_fraction(value) for value in row] for row in a.entries]


def _reduced_row_echelon(grid: list[list[Fraction]], cols: int) -> list[int]:
    """Reduce ``grid`` in place and return the pivot columns."""
    pivots: list[int] = []
    pivot_row = 0
    for col in range(cols):
        found = next((i for i in range(pivot_row, len(grid)) if grid[i][col]), None)
        if found is None:
            continue
        grid[pivot_row], grid[found] = grid[found], grid[pivot_row]
        lead = grid[pivot_row][col]
        grid[pivot_row] = [value / lead for value in grid[pivot_row]]
        for i, row in enumerate(grid):
            if i != pivot_row and row[col]:
                factor = row[col]
                grid[i] = [value - factor * pivot for value, pivot in zip(row, grid[pivot_row])]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(grid):
            break
    return pivots


def rank_over_rationals(a: ExactMatrix) -> int:
    grid = _rational_grid(a)
    return len(_reduced_row_echelon(grid, a.cols))


def rational_kernel_basis(a: ExactMatrix) -> list[tuple[int, ...]]:
    """Primitive integer vectors spanning the right kernel over the rationals."""
    grid = _rational_grid(a)
    pivots = _reduced_row_echelon(grid, a.cols)
    pivot_set = set(pivots)
    free_columns = [col for col in range(a.cols) if col not in pivot_set]
    basis = []
    for free in free_columns:
        vector = [Fraction(0)] * a.cols
        vector[free] = Fraction(1)
        for row, pivot in zip(grid, pivots):
            vector[pivot] = -row[free]
        scale = math.lcm(*(value.denominator for value in vector))
        integral = [int(value * scale) for value in vector]
        divisor = math.gcd(*integral)
        basis.append(tuple(value // divisor for value in integral))
    return basis


def column_space_contains(a: ExactMatrix, b: ExactMatrix) -> bool:
    """Whether every column of ``b`` lies in the rational column space of ``a``."""
    if a.rows != b.rows:
        raise ShapeMismatchError(f"Column spaces of height {a.rows} and {b.rows}")
    if b.cols == 0:
        return True
    if a.cols == 0:
        return b.is_zero()
    combined = block_matrix([[a, b]])
    return rank_over_rationals(combined) == rank_over_rationals(a)


def inverse_over_rationals(a: ExactMatrix) -> ExactMatrix:
    """Gauss-Jordan inverse over the rationals, or ``ValueError`` when singular."""
    if not a.is_square:
        raise ShapeMismatchError(f"Inverse of a non-square {a.rows}x{a.cols} matrix")
    size = a.rows
    grid = _rational_grid(a)
    augmented = [
        row + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(grid)
    ]
    pivots = _reduced_row_echelon(augmented, size)
    if len(pivots) != size:
        raise ValueError("Matrix is singular over the rationals")
    rationals = RingSpec.rationals()
    return ExactMatrix(
        rationals,
        size,
        size,
        tuple(tuple(row[size:]) for row in augmented),
        domain_labels=a.codomain_labels,
        codomain_labels=a.domain_labels,
    )


def _smallest_nonzero(
    grid: list[list[int]], cells: Iterable[tuple[int, int]]
) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    for i, j in cells:
        value = grid[i][j]
        if value and (best is None or abs(value) < abs(grid[best[0]][best[1]])):
            best = (i, j)
    return best


def _move_to_corner(grid: list[list[int]], top: int, cell: tuple[int, int]) -> None:
    i, j = cell
    grid[top], grid[i] = grid[i], grid[top]
    for row in grid:
        row[top], row[j] = row[j], row[top]


def smith_elementary_divisors(a: ExactMatrix) -> list[int]:
    """Nonzero diagonal of the Smith normal form, each dividing the next."""
    if a.spec != RingSpec.integers():
        raise UnsupportedRingError(f"Smith form needs integer entries, not {a.spec}")
    grid = [list(row) for row in a.entries]
    rows, cols = a.rows, a.cols
    divisors: list[int] = []
    for top in range(min(rows, cols)):
        cell = _smallest_nonzero(
            grid, ((i, j) for i in range(top, rows) for j in range(top, cols))
        )
        if cell is None:
            break
        _move_to_corner(grid, top, cell)
        while True:
            pivot = grid[top][top]
            for i in range(top + 1, rows):
                quotient = grid[i][top] // pivot
                if quotient:
                    grid[i] = [
                        value - quotient * lead if k >= top else value
                        for k, (value, lead) in enumerate(zip(grid[i], grid[top]))
                    ]
            for j in range(top + 1, cols):
                quotient = grid[top][j] // pivot
                if quotient:
                    for i in range(top, rows):
                        grid[i][j] -= quotient * grid[i][top]
            border = [(i, top) for i in range(top, rows)] + [(top, j) for j in range(top + 1, cols)]
            cell = _smallest_nonzero(grid, border)
            if cell != (top, top):
                _move_to_corner(grid, top, cell)
                continue
            offender = next(
                (
                    i
                    for i in range(top + 1, rows)
                    for j in range(top + 1, cols)
                    if grid[i][j] % pivot
                ),
                None,
            )
            if offender is None:
                break
            grid[top] = [value + other for value, other in zip(grid[top], grid[offender])]
        divisors.append(abs(grid[top][top]))
    LOGGER.debug("Smith divisors of a %sx%s matrix: %s", rows, cols, divisors)
    return divisors


def scalar_multiple_of_identity(a: ExactMatrix) -> RingElement | None:
    """Return ``c`` when ``a == c * I``; ``None`` otherwise or for an empty matrix."""
    if not a.is_square:
        raise ShapeMismatchError(f"Scalar test on a non-square {a.rows}x{a.cols} matrix")
    if a.rows == 0:
        return None
    candidate = a.entries[0][0]
    for i, row in enumerate(a.entries):
        for j, value in enumerate(row):
            if i == j:
                if value != candidate:
                    return None
            elif value:
                return None
    return RingElement(a.spec, candidate)


def generic_matrix(n: int) -> ExactMatrix:
    """The n x n matrix of independent indeterminates ``x11 .. xnn``."""
    if n < 1:
        raise ShapeMismatchError(f"Generic matrix size must be positive, got {n}")
    separator = "" if n < 10 else "_"
    names = [f"x{i}{separator}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    spec = RingSpec.polynomials(names)
    return ExactMatrix.from_rows(
        spec, [[names[i * n + j] for j in range(n)] for i in range(n)]
    )
