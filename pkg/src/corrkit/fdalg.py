"""Finite-dimensional C*-algebras ``A = M_{n_0} + ... + M_{n_{m-1}}`` and their ideals.

Every ideal of a finite direct sum of full matrix algebras is the sum of a
subset of the blocks, so ideals are stored as block subsets and all
lattice questions are answered exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import StructureError

DEFAULT_TOL = 1e-9


def _frozen(mat) -> np.ndarray:
    arr = np.array(mat, dtype=complex)
    arr.setflags(write=False)
    return arr


def spectral_norm(mat: np.ndarray) -> float:
    """Largest singular value, via the symmetric eigenproblem of ``mat* mat``.

    All-zero rows and columns are dropped first; they do not change the
    norm and the matrices handled here are often very sparse.
    """
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0.0
    nz = mat != 0
    mat = mat[nz.any(axis=1)][:, nz.any(axis=0)]
    if mat.size == 0:
        return 0.0
    if mat.shape[0] < mat.shape[1]:
        mat = mat.conj().T
    gram = mat.conj().T @ mat
    top = np.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(top, 0.0)))


@dataclass(frozen=True)
class FdAlgebra:
    """Direct sum of matrix blocks of the given sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks:
            raise StructureError("an algebra needs at least one block")
        if any(b < 1 for b in blocks):
            raise StructureError(f"block sizes must be positive, got {list(blocks)}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    def element(self, data: Sequence) -> AlgElement:
        return AlgElement(self, tuple(data))

    def zero(self) -> AlgElement:
        return AlgElement(self, tuple(np.zeros((n, n)) for n in self.blocks))

    def identity(self) -> AlgElement:
        return AlgElement(self, tuple(np.eye(n) for n in self.blocks))

    def unit(self, j: int, r: int, c: int) -> AlgElement:
        """Matrix unit ``e_{rc}`` in block ``j``."""
        data = [np.zeros((n, n)) for n in self.blocks]
        data[j][r, c] = 1.0
        return AlgElement(self, tuple(data))

    def supported(self, j: int, mat) -> AlgElement:
        """Element equal to ``mat`` in block ``j`` and zero elsewhere."""
        data = [np.zeros((n, n)) for n in self.blocks]
        data[j] = mat
        return AlgElement(self, tuple(data))

    def matrix_units(self, members: Iterable[int] | None = None) -> Iterator[tuple[tuple[int, int, int], AlgElement]]:
        """Yield ``((j, r, c), e^j_{rc})`` over the given blocks (all by default)."""
        members = range(self.m) if members is None else sorted(members)
        for j in members:
            n = self.blocks[j]
            for r in range(n):
                for c in range(n):
                    yield (j, r, c), self.unit(j, r, c)

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> AlgElement:
        data = []
        for n in self.blocks:
            mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            if hermitian:
                mat = (mat + mat.conj().T) / 2
            data.append(mat)
        return AlgElement(self, tuple(data))

    def ideal(self, members: Iterable[int]) -> Ideal:
        return Ideal(self, frozenset(members))

    def whole(self) -> Ideal:
        return Ideal(self, frozenset(range(self.m)))

    def zero_ideal(self) -> Ideal:
        return Ideal(self, frozenset())

    def ideals(self) -> list[Ideal]:
        """All ``2**m`` ideals, ordered by bitmask."""
        return [
            Ideal(self, frozenset(j for j in range(self.m) if mask >> j & 1))
            for mask in range(1 << self.m)
        ]


class AlgElement:
    """An element of an :class:`FdAlgebra`: one square matrix per block.

    Supports ``+``, ``-``, scalar ``*``, ``@`` (algebra product) and
    ``.adjoint()``.
    """

    __slots__ = ("parent", "data")

    def __init__(self, parent: FdAlgebra, data: Sequence):
        if len(data) != parent.m:
            raise StructureError(f"expected {parent.m} blocks, got {len(data)}")
        frozen = []
        for j, (n, mat) in enumerate(zip(parent.blocks, data)):
            arr = _frozen(mat)
            if arr.shape != (n, n):
                raise StructureError(f"block {j}: expected shape {(n, n)}, got {arr.shape}")
            frozen.append(arr)
        self.parent = parent
        self.data = tuple(frozen)

    def __repr__(self):
        return f"AlgElement(blocks={list(self.parent.blocks)})"

    def _check(self, other: AlgElement):
        if not isinstance(other, AlgElement):
            raise StructureError(f"expected an AlgElement, got {type(other).__name__}")
        if other.parent != self.parent:
            raise StructureError(
                f"mismatched algebras {list(self.parent.blocks)} and {list(other.parent.blocks)}"
            )

    def __add__(self, other: AlgElement) -> AlgElement:
        self._check(other)
        return AlgElement(self.parent, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: AlgElement) -> AlgElement:
        self._check(other)
        return AlgElement(self.parent, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> AlgElement:
        return AlgElement(self.parent, [-a for a in self.data])

    def __mul__(self, scalar) -> AlgElement:
        if not isinstance(scalar, Number):
            return NotImplemented
        return AlgElement(self.parent, [scalar * a for a in self.data])

    __rmul__ = __mul__

    def __matmul__(self, other: AlgElement) -> AlgElement:
        self._check(other)
        return AlgElement(self.parent, [a @ b for a, b in zip(self.data, other.data)])

    def adjoint(self) -> AlgElement:
        return AlgElement(self.parent, [a.conj().T for a in self.data])

    def norm(self) -> float:
        return op_norm(self)

    def support(self, atol: float = 0.0) -> frozenset[int]:
        """Blocks on which the element is nonzero (entries above ``atol``)."""
        return frozenset(j for j, a in enumerate(self.data) if np.abs(a).max(initial=0.0) > atol)

    def allclose(self, other: AlgElement, tol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        return blocks_close(self.data, other.data, tol)


def blocks_close(xs: Sequence[np.ndarray], ys: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> bool:
    """Entrywise comparison at ``tol * max(1, operand norms)``."""
    scale = 1.0
    for x, y in zip(xs, ys):
        if x.size:
            scale = max(scale, spectral_norm(x), spectral_norm(y))
    return all(np.abs(x - y).max(initial=0.0) <= tol * scale for x, y in zip(xs, ys))


def alg_arith(a: AlgElement, b=None, opcode: str = "add") -> AlgElement:
    """Blockwise ``add``, ``mul``, ``adjoint`` or ``scale`` (``b`` a scalar)."""
    if opcode == "add":
        return a + b
    if opcode == "mul":
        return a @ b
    if opcode == "adjoint":
        return a.adjoint()
    if opcode == "scale":
        if not isinstance(b, Number):
            raise StructureError("scale needs a scalar operand")
        return b * a
    raise ValueError(f"unknown opcode {opcode!r}")


def op_norm(a: AlgElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max((spectral_norm(block) for block in a.data), default=0.0)


@dataclass(frozen=True)
class Ideal:
    """The ideal spanned by the blocks in ``members``."""

    parent: FdAlgebra
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(int(j) for j in self.members)
        bad = sorted(j for j in members if not 0 <= j < self.parent.m)
        if bad:
            raise StructureError(f"block indices {bad} out of range for {self.parent.m} blocks")
        object.__setattr__(self, "members", members)

    def __repr__(self):
        return f"Ideal({sorted(self.members)})"

    def _check(self, other: Ideal):
        if other.parent != self.parent:
            raise StructureError("ideals of different algebras")

    def __le__(self, other: Ideal) -> bool:
        self._check(other)
        return self.members <= other.members

    def __lt__(self, other: Ideal) -> bool:
        self._check(other)
        return self.members < other.members

    @property
    def is_zero(self) -> bool:
        return not self.members

    def contains(self, a: AlgElement, atol: float = 0.0) -> bool:
        return a.support(atol) <= self.members

    def sorted(self) -> list[int]:
        return sorted(self.members)


def ideal_perp(ideal: Ideal) -> Ideal:
    """Annihilator ``{a : ab = 0 for all b in I}``: the complementary blocks."""
    return Ideal(ideal.parent, frozenset(range(ideal.parent.m)) - ideal.members)


def ideal_meet(i: Ideal, j: Ideal) -> Ideal:
    i._check(j)
    return Ideal(i.parent, i.members & j.members)


def ideal_join(i: Ideal, j: Ideal) -> Ideal:
    i._check(j)
    return Ideal(i.parent, i.members | j.members)


def is_essential(ideal: Ideal) -> bool:
    return ideal_perp(ideal).is_zero


def ideal_pairs(algebra: FdAlgebra) -> Iterator[tuple[Ideal, Ideal]]:
    ideals = algebra.ideals()
    return itertools.product(ideals, ideals)
