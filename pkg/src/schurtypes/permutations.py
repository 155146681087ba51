"""Permutations of tensor positions and integer combinations of them.

A permutation of ``d`` positions is stored as the tuple of images of
0, ..., d-1. Acting on a pure tensor, the factor in position ``p`` moves to
position ``sigma[p]``; this convention is used by every lift in the package.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .matrices import ExactMatrix
from .rings import RingSpec

Permutation = tuple[int, ...]
Tensor = tuple[int, ...]


def check_permutation(sigma: Sequence[int], d: int) -> Permutation:
    sigma = tuple(int(image) for image in sigma)
    if sorted(sigma) != list(range(d)):
        raise ValueError(f"{sigma} is not a permutation of {d} position(s)")
    return sigma


def identity_permutation(d: int) -> Permutation:
    return tuple(range(d))


def cycle_permutation(cycles: Sequence[Sequence[int]], d: int) -> Permutation:
    """Build a permutation from 1-based cycles, e.g. ``[(2, 3, 4)]`` sends 2 to 3."""
    images = list(range(d))
    for cycle in cycles:
        if any(not 1 <= position <= d for position in cycle):
            raise ValueError(f"Cycle {tuple(cycle)} leaves positions 1..{d}")
        for position, source in enumerate(cycle):
            target = cycle[(position + 1) % len(cycle)]
            images[source - 1] = target - 1
    return check_permutation(images, d)


def arrangement(order: Sequence[int]) -> Permutation:
    """The permutation placing input position ``order[k]`` at output position ``k``."""
    images = [0] * len(order)
    for output, source in enumerate(order):
        images[source] = output
    return check_permutation(images, len(order))


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """``sigma`` after ``tau``."""
    return tuple(sigma[image] for image in tau)


def inverse(sigma: Permutation) -> Permutation:
    images = [0] * len(sigma)
    for position, image in enumerate(sigma):
        images[image] = position
    return tuple(images)


def permutation_sign(sigma: Sequence[int]) -> int:
    seen = [False] * len(sigma)
    sign = 1
    for start in range(len(sigma)):
        if seen[start]:
            continue
        length = 0
        position = start
        while not seen[position]:
            seen[position] = True
            position = sigma[position]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permute_tensor(tensor: Sequence[int], sigma: Permutation) -> Tensor:
    result = [0] * len(tensor)
    for position, value in enumerate(tensor):
        result[sigma[position]] = value
    return tuple(result)


def tensor_index(tensor: Sequence[int], n: int) -> int:
    """Position of a basis tuple in lexicographic order, first factor most significant."""
    index = 0
    for value in tensor:
        index = index * n + value
    return index


def tensor_tuples(n: int, d: int) -> Iterator[Tensor]:
    return itertools.product(range(n), repeat=d)


@dataclass(frozen=True)
class PermutationSum:
    """A formal integer combination of position permutations of a tensor power."""

    degree: int
    terms: tuple[tuple[Permutation, int], ...]

    @classmethod
    def from_terms(cls, degree: int, terms: Iterable[tuple[Sequence[int], int]]) -> PermutationSum:
        totals: dict[Permutation, int] = defaultdict(int)
        for sigma, coefficient in terms:
            totals[check_permutation(sigma, degree)] += coefficient
        return cls(
            degree,
            tuple(sorted((sigma, value) for sigma, value in totals.items() if value)),
        )

    @classmethod
    def identity(cls, degree: int) -> PermutationSum:
        return cls.from_terms(degree, [(identity_permutation(degree), 1)])

    @classmethod
    def single(cls, sigma: Sequence[int], coefficient: int = 1) -> PermutationSum:
        return cls.from_terms(len(sigma), [(sigma, coefficient)])

    def _check_degree(self, other: PermutationSum) -> None:
        if other.degree != self.degree:
            raise ValueError(f"Degrees {self.degree} and {other.degree} differ")

    def __add__(self, other: PermutationSum) -> PermutationSum:
        self._check_degree(other)
        return PermutationSum.from_terms(self.degree, self.terms + other.terms)

    def __neg__(self) -> PermutationSum:
        return self.scale(-1)

    def __sub__(self, other: PermutationSum) -> PermutationSum:
        return self + (-other)

    def scale(self, factor: int) -> PermutationSum:
        return PermutationSum.from_terms(
            self.degree, ((sigma, factor * value) for sigma, value in self.terms)
        )

    def compose(self, other: PermutationSum) -> PermutationSum:
        """``self`` after ``other``."""
        self._check_degree(other)
        return PermutationSum.from_terms(
            self.degree,
            (
                (compose(sigma, tau), left * right)
                for sigma, left in self.terms
                for tau, right in other.terms
            ),
        )

    __matmul__ = compose

    def tensor(self, other: PermutationSum) -> PermutationSum:
        """Act with ``self`` on the leading positions and ``other`` on the rest."""
        shift = self.degree
        return PermutationSum.from_terms(
            self.degree + other.degree,
            (
                (sigma + tuple(image + shift for image in tau), left * right)
                for sigma, left in self.terms
                for tau, right in other.terms
            ),
        )

    def apply(self, tensor: Sequence[int]) -> list[tuple[int, Tensor]]:
        return [(value, permute_tensor(tensor, sigma)) for sigma, value in self.terms]

    def to_matrix(self, n: int, spec: RingSpec) -> ExactMatrix:
        """The n^d x n^d matrix of this combination acting on basis tuples."""
        size = n**self.degree
        grid = [[spec.zero] * size for _ in range(size)]
        for column, tensor in enumerate(tensor_tuples(n, self.degree)):
            for value, image in self.apply(tensor):
                row = tensor_index(image, n)
                grid[row][column] = grid[row][column] + spec.from_int(value)
        return ExactMatrix(spec, size, size, tuple(tuple(row) for row in grid))
