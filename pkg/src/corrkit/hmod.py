"""Hilbert modules over finite-dimensional algebras.

A Hilbert module over ``A = M_{n_0} + ... + M_{n_{m-1}}`` is determined by
its fiber multiplicities ``k_j``: ``X = M_{k_0 x n_0} + ... `` with
``<xi, eta> = (xi_j^* eta_j)_j`` and right action by matrix product. The
adjointable operators are ``L(X) = K(X) = M_{k_0} + ...`` acting on the
left of each fiber.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Iterator, Sequence

import numpy as np

from .errors import StructureError
from .fdalg import DEFAULT_TOL, AlgElement, FdAlgebra, Ideal, blocks_close, op_norm, spectral_norm


@dataclass(frozen=True)
class HilbertModule:
    algebra: FdAlgebra
    fibers: tuple[int, ...]

    def __post_init__(self):
        fibers = tuple(int(k) for k in self.fibers)
        if len(fibers) != self.algebra.m:
            raise StructureError(
                f"{len(fibers)} fibers given for an algebra with {self.algebra.m} blocks"
            )
        if any(k < 0 for k in fibers):
            raise StructureError(f"fiber sizes must be nonnegative, got {list(fibers)}")
        object.__setattr__(self, "fibers", fibers)

    @property
    def dim(self) -> int:
        """Complex dimension ``sum k_j n_j``."""
        return sum(k * n for k, n in zip(self.fibers, self.algebra.blocks))

    def shapes(self) -> list[tuple[int, int]]:
        return list(zip(self.fibers, self.algebra.blocks))

    def element(self, data: Sequence) -> ModuleElement:
        return ModuleElement(self, tuple(data))

    def zero(self) -> ModuleElement:
        return ModuleElement(self, tuple(np.zeros(s) for s in self.shapes()))

    def unit(self, j: int, r: int, c: int) -> ModuleElement:
        data = [np.zeros(s) for s in self.shapes()]
        data[j][r, c] = 1.0
        return ModuleElement(self, tuple(data))

    def basis(self) -> Iterator[tuple[tuple[int, int, int], ModuleElement]]:
        """Fiber matrix units ``((j, r, c), e)`` in fiber, row, column order."""
        for j, (k, n) in enumerate(self.shapes()):
            for r in range(k):
                for c in range(n):
                    yield (j, r, c), self.unit(j, r, c)

    def random_element(self, rng: np.random.Generator) -> ModuleElement:
        return ModuleElement(
            self,
            tuple(rng.standard_normal(s) + 1j * rng.standard_normal(s) for s in self.shapes()),
        )

    def operator(self, data: Sequence) -> ModuleOperator:
        return ModuleOperator(self, tuple(data))

    def identity_operator(self) -> ModuleOperator:
        return ModuleOperator(self, tuple(np.eye(k) for k in self.fibers))

    def zero_operator(self) -> ModuleOperator:
        return ModuleOperator(self, tuple(np.zeros((k, k)) for k in self.fibers))

    def operator_unit(self, j: int, p: int, q: int) -> ModuleOperator:
        data = [np.zeros((k, k)) for k in self.fibers]
        data[j][p, q] = 1.0
        return ModuleOperator(self, tuple(data))

    def random_operator(self, rng: np.random.Generator) -> ModuleOperator:
        return ModuleOperator(
            self,
            tuple(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)) for k in self.fibers),
        )


def _freeze_blocks(data, shapes, what):
    if len(data) != len(shapes):
        raise StructureError(f"{what}: expected {len(shapes)} fibers, got {len(data)}")
    out = []
    for j, (mat, shape) in enumerate(zip(data, shapes)):
        arr = np.array(mat, dtype=complex)
        if arr.size == 0 and 0 in shape:
            arr = arr.reshape(shape)
        if arr.shape != tuple(shape):
            raise StructureError(f"{what} fiber {j}: expected shape {tuple(shape)}, got {arr.shape}")
        arr.setflags(write=False)
        out.append(arr)
    return tuple(out)


class ModuleElement:
    __slots__ = ("parent", "data")

    def __init__(self, parent: HilbertModule, data: Sequence):
        self.parent = parent
        self.data = _freeze_blocks(data, parent.shapes(), "module element")

    def __repr__(self):
        return f"ModuleElement(fibers={list(self.parent.fibers)})"

    def _check(self, other):
        if not isinstance(other, ModuleElement) or other.parent != self.parent:
            raise StructureError("module elements belong to different modules")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(self.parent, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(self.parent, [a - b for a, b in zip(self.data, other.data)])

    def __mul__(self, scalar) -> ModuleElement:
        if not isinstance(scalar, Number):
            return NotImplemented
        return ModuleElement(self.parent, [scalar * a for a in self.data])

    __rmul__ = __mul__

    def allclose(self, other: ModuleElement, tol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        return blocks_close(self.data, other.data, tol)


class ModuleOperator:
    """Element of ``L(X) = K(X)``: one ``k_j x k_j`` matrix per fiber."""

    __slots__ = ("parent", "data")

    def __init__(self, parent: HilbertModule, data: Sequence):
        self.parent = parent
        self.data = _freeze_blocks(data, [(k, k) for k in parent.fibers], "module operator")

    def __repr__(self):
        return f"ModuleOperator(fibers={list(self.parent.fibers)})"

    def _check(self, other):
        if not isinstance(other, ModuleOperator) or other.parent != self.parent:
            raise StructureError("operators act on different modules")

    def __add__(self, other: ModuleOperator) -> ModuleOperator:
        self._check(other)
        return ModuleOperator(self.parent, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: ModuleOperator) -> ModuleOperator:
        self._check(other)
        return ModuleOperator(self.parent, [a - b for a, b in zip(self.data, other.data)])

    def __mul__(self, scalar) -> ModuleOperator:
        if not isinstance(scalar, Number):
            return NotImplemented
        return ModuleOperator(self.parent, [scalar * a for a in self.data])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ModuleElement):
            return apply(self, other)
        return compose(self, other)

    def adjoint(self) -> ModuleOperator:
        return ModuleOperator(self.parent, [a.conj().T for a in self.data])

    def norm(self) -> float:
        return max((spectral_norm(a) for a in self.data), default=0.0)

    def allclose(self, other: ModuleOperator, tol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        return blocks_close(self.data, other.data, tol)


def _same_module(xi, eta):
    if xi.parent != eta.parent:
        raise StructureError(
            f"mismatched modules: fibers {list(xi.parent.fibers)} vs {list(eta.parent.fibers)}"
        )


def inner(xi: ModuleElement, eta: ModuleElement) -> AlgElement:
    """A-valued inner product ``(xi_j^* eta_j)_j``."""
    _same_module(xi, eta)
    return AlgElement(xi.parent.algebra, [x.conj().T @ y for x, y in zip(xi.data, eta.data)])


def right_act(xi: ModuleElement, a: AlgElement) -> ModuleElement:
    if a.parent != xi.parent.algebra:
        raise StructureError("right action by an element of a different algebra")
    return ModuleElement(xi.parent, [x @ b for x, b in zip(xi.data, a.data)])


def module_norm(xi: ModuleElement) -> float:
    """``||<xi, xi>||^{1/2}``."""
    return float(np.sqrt(op_norm(inner(xi, xi))))


def theta(xi: ModuleElement, eta: ModuleElement) -> ModuleOperator:
    """Rank-one operator ``zeta -> xi <eta, zeta>``, i.e. ``xi_j eta_j^*`` per fiber."""
    _same_module(xi, eta)
    return ModuleOperator(xi.parent, [x @ y.conj().T for x, y in zip(xi.data, eta.data)])


def apply(s: ModuleOperator, zeta: ModuleElement) -> ModuleElement:
    if s.parent != zeta.parent:
        raise StructureError("operator applied to an element of a different module")
    return ModuleElement(zeta.parent, [a @ z for a, z in zip(s.data, zeta.data)])


def compose(s: ModuleOperator, t: ModuleOperator) -> ModuleOperator:
    s._check(t)
    return ModuleOperator(s.parent, [a @ b for a, b in zip(s.data, t.data)])


def op_compose_adjoint(s: ModuleOperator, t=None, opcode: str = "compose"):
    """Dispatch ``compose`` (``s t``), ``adjoint`` (``s^*``) or ``apply`` (``t`` a module element)."""
    if opcode == "compose":
        return compose(s, t)
    if opcode == "adjoint":
        return s.adjoint()
    if opcode == "apply":
        return apply(s, t)
    raise ValueError(f"unknown opcode {opcode!r}")


def is_full(module: HilbertModule) -> tuple[bool, Ideal]:
    """Whether the inner products span ``A``, with the spanned ideal as witness."""
    span = Ideal(module.algebra, frozenset(j for j, k in enumerate(module.fibers) if k >= 1))
    return len(span.members) == module.algebra.m, span
