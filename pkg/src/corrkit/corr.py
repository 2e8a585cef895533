"""C*-correspondences over finite-dimensional algebras.

A left action ``phi: A -> L(X)`` is stored in canonical multiplicity form:
on fiber ``j`` it is ``W_j diag(a_0 (M[j][0] times), a_1 (M[j][1] times), ..., 0) W_j^*``
with summands in ascending block order and the zero corner last. Kernels,
images and the ideal ``J_X`` are then read off the multiplicity matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConsistencyError, NumericalError, StructureError
from .fdalg import DEFAULT_TOL, AlgElement, FdAlgebra, Ideal, ideal_perp, spectral_norm
from .hmod import HilbertModule, ModuleElement, ModuleOperator, inner, is_full, theta

UNITARY_TOL = 1e-9
GRAM_RTOL = 1e-9


class StarHom:
    """*-homomorphism ``A -> M_{k_0} + ... + M_{k_{p-1}}`` in multiplicity form.

    Parameters
    ----------
    source : FdAlgebra
    fibers : sequence of int
        Target matrix sizes ``k_j``.
    multiplicity : sequence of sequence of int
        ``M[j][i]`` copies of block ``i`` in fiber ``j``; requires
        ``sum_i M[j][i] n_i <= k_j``.
    unitaries : sequence, optional
        Per-fiber ``k_j x k_j`` unitaries ``W_j`` (``None`` entries mean identity).
    """

    __slots__ = ("source", "fibers", "multiplicity", "unitaries", "_segments")

    def __init__(self, source: FdAlgebra, fibers: Sequence[int], multiplicity, unitaries=None):
        self.source = source
        self.fibers = tuple(int(k) for k in fibers)
        rows = [tuple(int(x) for x in row) for row in multiplicity]
        if len(rows) != len(self.fibers):
            raise StructureError(f"multiplicity has {len(rows)} rows for {len(self.fibers)} fibers")
        for j, row in enumerate(rows):
            if len(row) != source.m:
                raise StructureError(f"multiplicity row {j} has {len(row)} entries, expected {source.m}")
            if any(x < 0 for x in row):
                raise StructureError(f"multiplicity row {j} has a negative entry")
            used = sum(x * n for x, n in zip(row, source.blocks))
            if used > self.fibers[j]:
                raise StructureError(
                    f"fiber {j}: multiplicities need dimension {used} but the fiber has {self.fibers[j]}"
                )
        self.multiplicity = tuple(rows)
        if unitaries is None:
            self.unitaries = None
        else:
            if len(unitaries) != len(self.fibers):
                raise StructureError(f"{len(unitaries)} unitaries given for {len(self.fibers)} fibers")
            us = []
            for j, (w, k) in enumerate(zip(unitaries, self.fibers)):
                if w is None:
                    us.append(None)
                    continue
                w = np.array(w, dtype=complex)
                if w.size == 0 and k == 0:
                    w = w.reshape(0, 0)
                if w.shape != (k, k):
                    raise StructureError(f"unitary {j}: expected shape {(k, k)}, got {w.shape}")
                if k and np.abs(w.conj().T @ w - np.eye(k)).max() > UNITARY_TOL:
                    raise StructureError(f"unitary {j} is not unitary within {UNITARY_TOL}")
                w.setflags(write=False)
                us.append(w)
            self.unitaries = tuple(us)
        self._segments = tuple(self._layout(j) for j in range(len(self.fibers)))

    def __repr__(self):
        return f"StarHom(fibers={list(self.fibers)}, multiplicity={[list(r) for r in self.multiplicity]})"

    def _layout(self, j):
        segs, off = [], 0
        for i, (mult, n) in enumerate(zip(self.multiplicity[j], self.source.blocks)):
            for _ in range(mult):
                segs.append((i, off))
                off += n
        return tuple(segs)

    def segments(self, j: int) -> tuple[tuple[int, int], ...]:
        """``(block, offset)`` of every summand of fiber ``j`` in canonical coordinates."""
        return self._segments[j]

    def used(self, j: int) -> int:
        """Dimension of fiber ``j`` not in the zero corner."""
        return sum(x * n for x, n in zip(self.multiplicity[j], self.source.blocks))

    def unitary(self, j: int) -> np.ndarray:
        if self.unitaries is None or self.unitaries[j] is None:
            return np.eye(self.fibers[j], dtype=complex)
        return self.unitaries[j]

    def matrix(self) -> np.ndarray:
        return np.array(self.multiplicity, dtype=np.int64).reshape(len(self.fibers), self.source.m)

    def canonical(self, a: AlgElement) -> list[np.ndarray]:
        """``diag(a_i, ..., 0)`` per fiber, before conjugation by ``W_j``."""
        out = []
        for j, k in enumerate(self.fibers):
            d = np.zeros((k, k), dtype=complex)
            for i, off in self._segments[j]:
                n = self.source.blocks[i]
                d[off:off + n, off:off + n] = a.data[i]
            out.append(d)
        return out

    def realize(self, a: AlgElement) -> list[np.ndarray]:
        if a.parent != self.source:
            raise StructureError("element of a different algebra")
        out = []
        for j, d in enumerate(self.canonical(a)):
            if self.unitaries is not None and self.unitaries[j] is not None:
                w = self.unitaries[j]
                d = w @ d @ w.conj().T
            out.append(d)
        return out

    def equals(self, other: StarHom, tol: float = UNITARY_TOL) -> bool:
        """Same multiplicities and the same realization on every matrix unit."""
        if self.source != other.source or self.fibers != other.fibers:
            return False
        if self.multiplicity != other.multiplicity:
            return False
        for _, e in self.source.matrix_units():
            for x, y in zip(self.realize(e), other.realize(e)):
                if np.abs(x - y).max(initial=0.0) > tol:
                    return False
        return True


class Correspondence:
    """A Hilbert module together with a left action of the same algebra."""

    __slots__ = ("module", "left_action")

    def __init__(self, module: HilbertModule, left_action: StarHom):
        if left_action.source != module.algebra:
            raise StructureError("left action is defined on a different algebra")
        if left_action.fibers != module.fibers:
            raise StructureError(
                f"left action targets fibers {list(left_action.fibers)}, module has {list(module.fibers)}"
            )
        self.module = module
        self.left_action = left_action

    def __repr__(self):
        return (
            f"Correspondence(blocks={list(self.algebra.blocks)}, fibers={list(self.module.fibers)}, "
            f"multiplicity={[list(r) for r in self.left_action.multiplicity]})"
        )

    @property
    def algebra(self) -> FdAlgebra:
        return self.module.algebra

    @property
    def fibers(self) -> tuple[int, ...]:
        return self.module.fibers

    @property
    def multiplicity(self) -> np.ndarray:
        return self.left_action.matrix()


def make_correspondence(blocks, fibers, multiplicity, unitaries=None) -> Correspondence:
    algebra = FdAlgebra(tuple(blocks))
    return Correspondence(
        HilbertModule(algebra, tuple(fibers)), StarHom(algebra, fibers, multiplicity, unitaries)
    )


def identity_correspondence(algebra: FdAlgebra) -> Correspondence:
    """``A`` as a correspondence over itself."""
    m = algebra.m
    return Correspondence(
        HilbertModule(algebra, algebra.blocks),
        StarHom(algebra, algebra.blocks, [[int(i == j) for i in range(m)] for j in range(m)]),
    )


def zero_correspondence(algebra: FdAlgebra) -> Correspondence:
    zeros = (0,) * algebra.m
    return Correspondence(
        HilbertModule(algebra, zeros), StarHom(algebra, zeros, [[0] * algebra.m for _ in range(algebra.m)])
    )


def left_act(x: Correspondence, a: AlgElement) -> ModuleOperator:
    """``phi_X(a)`` as an operator on ``X``."""
    if a.parent != x.algebra:
        raise StructureError("left action by an element of a different algebra")
    return ModuleOperator(x.module, x.left_action.realize(a))


def act_on(x: Correspondence, a: AlgElement, xi: ModuleElement) -> ModuleElement:
    return left_act(x, a) @ xi


def ker_phi(x: Correspondence) -> Ideal:
    m = x.multiplicity
    return Ideal(x.algebra, frozenset(i for i in range(x.algebra.m) if not m[:, i].any()))


def preimage_compact(x: Correspondence) -> Ideal:
    """``phi_X^{-1}(K(X))``; all of ``A`` because ``K(X) = L(X)`` in finite dimension."""
    return x.algebra.whole()


def jx(x: Correspondence) -> Ideal:
    """The ideal ``phi^{-1}(K(X)) & (ker phi)^perp``.

    The preimage of ``K(X)`` is all of ``A`` here, so this is the set of
    blocks acting nontrivially (nonzero multiplicity columns). A proper
    preimage only arises for infinite emitters; see :mod:`corrkit.graphalg`.
    """
    return Ideal(x.algebra, preimage_compact(x).members & ideal_perp(ker_phi(x)).members)


@dataclass(frozen=True)
class CorrespondenceFlags:
    faithful: bool
    nondegenerate: bool
    full: bool


def correspondence_flags(x: Correspondence) -> CorrespondenceFlags:
    nondegenerate = all(x.left_action.used(j) == k for j, k in enumerate(x.fibers))
    return CorrespondenceFlags(
        faithful=ker_phi(x).is_zero,
        nondegenerate=nondegenerate,
        full=is_full(x.module)[0],
    )


# -- internal tensor products -------------------------------------------------


def _chunks(x: Correspondence, y: Correspondence, j: int) -> list[tuple[int, int, int]]:
    """Layout of fiber ``j`` of ``X (x)_A Y``.

    Each summand ``C^{n_i}`` of ``Y``'s fiber ``j`` (canonical offset
    ``in_off``) contributes ``X (x)_A C^{n_i} = C^{k^X_i}`` at ``out_off``.
    """
    out, off = [], 0
    for i, in_off in y.left_action.segments(j):
        out.append((i, in_off, off))
        off += x.fibers[i]
    return out


class TensorProduct(Correspondence):
    """``X (x)_A Y`` with the left action of ``X`` on the first factor.

    Elements of fiber ``j`` are written in *native* coordinates: the stack,
    over summands ``C^{n_i}`` of ``Y``'s fiber ``j``, of ``k^X_i`` rows each.
    """

    __slots__ = ("left", "right")

    def __init__(self, left: Correspondence, right: Correspondence):
        if left.algebra != right.algebra:
            raise StructureError("tensor factors are correspondences over different algebras")
        algebra = left.algebra
        mx, my = left.multiplicity, right.multiplicity
        kx = np.array(left.fibers, dtype=np.int64)
        fibers = tuple(int(v) for v in my @ kx)
        mult = my @ mx
        unitaries = []
        for j, k in enumerate(fibers):
            unitaries.append(self._fiber_unitary(left, right, j, k))
        super().__init__(
            HilbertModule(algebra, fibers),
            StarHom(algebra, fibers, mult.tolist(), unitaries),
        )
        self.left = left
        self.right = right

    @staticmethod
    def _fiber_unitary(x: Correspondence, y: Correspondence, j: int, k: int) -> np.ndarray:
        # native segments: (block or None for padding, native start, size)
        native, blocks = [], []
        for i, _, out_off in _chunks(x, y, j):
            blocks.append(x.left_action.unitary(i))
            for l, off in x.left_action.segments(i):
                native.append((l, out_off + off, x.algebra.blocks[l]))
            used = x.left_action.used(i)
            if used < x.fibers[i]:
                native.append((None, out_off + used, x.fibers[i] - used))
        order = sorted(range(len(native)), key=lambda s: (native[s][0] is None, native[s][0] or 0, s))
        perm = np.zeros((k, k))
        pos = 0
        for s in order:
            _, start, size = native[s]
            perm[start:start + size, pos:pos + size] = np.eye(size)
            pos += size
        w = np.zeros((k, k), dtype=complex)
        off = 0
        for b in blocks:
            w[off:off + b.shape[0], off:off + b.shape[0]] = b
            off += b.shape[0]
        return w @ perm

    def chunks(self, j: int) -> list[tuple[int, int, int]]:
        return _chunks(self.left, self.right, j)

    def elementary(self, xi: ModuleElement, eta: ModuleElement) -> ModuleElement:
        """The elementary tensor ``xi (x) eta``."""
        if xi.parent != self.left.module or eta.parent != self.right.module:
            raise StructureError("factors do not belong to the tensor's modules")
        data = []
        for j, (k, n) in enumerate(self.module.shapes()):
            w = self.right.left_action.unitary(j)
            eta_c = w.conj().T @ eta.data[j]
            out = np.zeros((k, n), dtype=complex)
            for i, in_off, out_off in self.chunks(j):
                ni = self.algebra.blocks[i]
                out[out_off:out_off + self.left.fibers[i]] = xi.data[i] @ eta_c[in_off:in_off + ni]
            data.append(out)
        return ModuleElement(self.module, data)


def tensor(x: Correspondence, y: Correspondence) -> TensorProduct:
    return TensorProduct(x, y)


def gram_quotient_tensor(x: Correspondence, y: Correspondence, rtol: float = GRAM_RTOL):
    """Fiber sizes and multiplicities of ``X (x)_A Y`` from Gram matrices alone.

    Independent of :class:`TensorProduct`: for each fiber ``j`` it spans the
    localized space by ``xi (x) y`` (``xi`` a matrix unit of ``X``, ``y`` a
    basis vector of ``Y_j (x) C^{n_j} = C^{k^Y_j}``), forms the Gram matrix of
    the balanced inner product ``<y1, phi_Y(<xi1, xi2>) y2>``, discards its
    null space, and reads each block multiplicity off the trace of the
    compressed action of a minimal projection.
    """
    if x.algebra != y.algebra:
        raise StructureError("tensor factors are correspondences over different algebras")
    algebra = x.algebra
    xs = [e for _, e in x.module.basis()]
    projections = [algebra.unit(l, 0, 0) for l in range(algebra.m)]
    # <xi1, xi2> and <xi1, phi_X(p_l) xi2> for every pair
    weights = [None] + projections
    acted = [xs] + [[left_act(x, p) @ e for e in xs] for p in projections]
    images = [
        [[y.left_action.realize(inner(e1, e2)) for e2 in acted[w]] for e1 in xs]
        for w in range(len(weights))
    ]
    fibers, mult = [], []
    for j, ky in enumerate(y.fibers):
        size = len(xs) * ky
        grams = np.zeros((len(weights), size, size), dtype=complex)
        for w in range(len(weights)):
            for a, _ in enumerate(xs):
                for b, _ in enumerate(xs):
                    grams[w, a * ky:(a + 1) * ky, b * ky:(b + 1) * ky] = images[w][a][b][j]
        if size == 0:
            fibers.append(0)
            mult.append([0] * algebra.m)
            continue
        vals, vecs = np.linalg.eigh(grams[0])
        keep = vals > rtol * max(vals.max(), 0.0)
        if not keep.any():
            fibers.append(0)
            mult.append([0] * algebra.m)
            continue
        v = vecs[:, keep]
        inv = np.diag(1.0 / vals[keep])
        fibers.append(int(keep.sum()))
        row = []
        for w in range(1, len(weights)):
            trace = np.trace(inv @ v.conj().T @ grams[w] @ v).real
            count = round(trace)
            if abs(trace - count) > 1e-6:
                raise ConsistencyError(f"non-integral multiplicity {trace} in fiber {j}")
            row.append(int(count))
        mult.append(row)
    return fibers, mult


# -- bimodules -------------------------------------------------------------------


class LeftInnerProduct:
    """Inverse of ``phi_X`` restricted to ``J_X``, for a correspondence with ``phi_X(J_X) = K(X)``.

    Fiber ``j`` is the image of exactly one block ``pairing[j]`` under
    ``a -> W_j a W_j^*``, so the inverse is ``T_j -> W_j^* T_j W_j``.
    """

    __slots__ = ("parent", "pairing")

    def __init__(self, parent: Correspondence, pairing: Mapping[int, int]):
        self.parent = parent
        self.pairing = dict(pairing)

    def preimage(self, op: ModuleOperator) -> AlgElement:
        x = self.parent
        if op.parent != x.module:
            raise StructureError("operator on a different module")
        data = [np.zeros((n, n), dtype=complex) for n in x.algebra.blocks]
        for j, i in self.pairing.items():
            w = x.left_action.unitary(j)
            data[i] = w.conj().T @ op.data[j] @ w
        return AlgElement(x.algebra, data)

    def __call__(self, xi: ModuleElement, eta: ModuleElement, tol: float = DEFAULT_TOL) -> AlgElement:
        return left_inner(self, xi, eta, tol)


def _image_rank(x: Correspondence, members) -> int:
    cols = []
    for _, e in x.algebra.matrix_units(members):
        cols.append(np.concatenate([d.ravel() for d in x.left_action.realize(e)] + [np.zeros(0)]))
    if not cols or not cols[0].size:
        return 0
    return int(np.linalg.matrix_rank(np.array(cols), tol=1e-9))


def detect_bimodule(x: Correspondence) -> LeftInnerProduct | None:
    """Left inner product when ``phi_X(J_X) = K(X)``, else ``None``.

    Structural test: every nonzero fiber is a single copy of one block of
    the same size, and no block feeds two fibers. It is cross-checked
    against the rank of ``phi_X`` on matrix units of ``J_X``.
    """
    m = x.multiplicity
    blocks = x.algebra.blocks
    pairing = {}
    structural = True
    for j, k in enumerate(x.fibers):
        if k == 0:
            continue
        nz = np.flatnonzero(m[j])
        if len(nz) != 1 or m[j, nz[0]] != 1 or blocks[nz[0]] != k:
            structural = False
            break
        pairing[j] = int(nz[0])
    if structural and len(set(pairing.values())) != len(pairing):
        structural = False
    target = sum(k * k for k in x.fibers)
    numeric = _image_rank(x, jx(x).members) == target
    if structural != numeric:
        raise ConsistencyError(
            f"bimodule structure test ({structural}) disagrees with image dimension count ({numeric})"
        )
    return LeftInnerProduct(x, pairing) if structural else None


def left_inner(lip: LeftInnerProduct, xi: ModuleElement, eta: ModuleElement, tol: float = DEFAULT_TOL) -> AlgElement:
    """The unique ``a`` in ``J_X`` with ``phi_X(a) = theta_{xi, eta}``."""
    op = theta(xi, eta)
    a = lip.preimage(op)
    back = left_act(lip.parent, a)
    scale = max(1.0, op.norm())
    residual = max((spectral_norm(u - v) for u, v in zip(back.data, op.data)), default=0.0)
    if residual > tol * scale:
        raise NumericalError(f"left inner product residual {residual:.3e} exceeds tolerance")
    return a


# -- partial automorphisms ----------------------------------------------------


def from_partial_automorphism(
    algebra: FdAlgebra,
    i_ideal: Ideal,
    j_ideal: Ideal,
    block_map: Mapping[int, int],
    unitaries: Mapping[int, np.ndarray] | None = None,
) -> Correspondence:
    """Correspondence ``J A`` of the partial automorphism ``theta: I -> J``.

    ``block_map`` sends each block of ``I`` to a block of ``J`` of the same
    size; ``theta(a)`` on block ``block_map[i]`` is ``U_i a_i U_i^*``.
    The module is ``J`` itself (fiber ``n_j`` on blocks of ``J``, zero
    elsewhere) and ``a`` acts on it by left multiplication with ``theta(a)``.
    """
    block_map = {int(k): int(v) for k, v in block_map.items()}
    if set(block_map) != set(i_ideal.members):
        raise StructureError(f"block map domain {sorted(block_map)} differs from I = {i_ideal.sorted()}")
    if sorted(block_map.values()) != j_ideal.sorted():
        raise StructureError(f"block map image {sorted(block_map.values())} is not a bijection onto J = {j_ideal.sorted()}")
    for i, j in block_map.items():
        if algebra.blocks[i] != algebra.blocks[j]:
            raise StructureError(
                f"block {i} (size {algebra.blocks[i]}) paired with block {j} (size {algebra.blocks[j]})"
            )
    m = algebra.m
    fibers = [algebra.blocks[j] if j in j_ideal.members else 0 for j in range(m)]
    mult = [[0] * m for _ in range(m)]
    ws = [None] * m
    for i, j in block_map.items():
        mult[j][i] = 1
        if unitaries is not None and i in unitaries:
            ws[j] = unitaries[i]
    return Correspondence(HilbertModule(algebra, fibers), StarHom(algebra, fibers, mult, ws))
