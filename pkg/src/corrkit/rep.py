"""Concrete representations ``(pi, t)`` of a correspondence on ``C^N``.

``pi`` and ``t`` are given on matrix-unit bases (of ``A`` and of ``X``) and
extended linearly. The checkers never raise on failing input; they return
a :class:`CovarianceReport` carrying the raw defect norms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .corr import Correspondence, left_act
from .errors import NumericalError, StructureError
from .fdalg import DEFAULT_TOL, AlgElement, Ideal, spectral_norm
from .hmod import ModuleElement, ModuleOperator, inner, module_norm, right_act


@dataclass(frozen=True)
class Defect:
    name: str
    value: float
    limit: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "limit", float(self.limit))

    @property
    def passed(self) -> bool:
        return self.value <= self.limit


@dataclass(frozen=True)
class CovarianceReport:
    """Named defect norms with their pass limits."""

    tol: float
    defects: tuple[Defect, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(d.passed for d in self.defects)

    def __getitem__(self, name: str) -> Defect:
        for d in self.defects:
            if d.name == name:
                return d
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(d.name == name for d in self.defects)

    def value(self, name: str) -> float:
        return self[name].value

    def failures(self) -> list[Defect]:
        return [d for d in self.defects if not d.passed]

    def merged(self, other: CovarianceReport) -> CovarianceReport:
        return CovarianceReport(self.tol, self.defects + other.defects)

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "ok": self.ok,
            "defects": [
                {"name": d.name, "value": d.value, "limit": d.limit, "passed": d.passed} for d in self.defects
            ],
        }


def _unit_label(j, r, c) -> str:
    return f"{j}:{r},{c}"


class Representation:
    """A pair ``(pi, t)`` acting on ``C^dim``.

    Parameters
    ----------
    correspondence : Correspondence
    dim : int
    pi_units : sequence of arrays
        ``pi_units[j][r, c]`` is ``pi(e^j_{rc})``, shape ``(n_j, n_j, dim, dim)``.
    t_units : sequence of arrays
        ``t_units[j][r, c]`` is ``t`` of the fiber matrix unit, shape ``(k_j, n_j, dim, dim)``.
    levels : sequence of int, optional
        Dimensions of a grading ``C^dim = C^{d_0} + C^{d_1} + ...`` (Fock levels).
    truncated : bool
        The top level is a truncation cut; axiom checks default to the levels below it.
    """

    __slots__ = ("correspondence", "dim", "pi_units", "t_units", "levels", "truncated", "_cache")

    def __init__(self, correspondence: Correspondence, dim: int, pi_units, t_units, levels=None, truncated=False):
        self.correspondence = correspondence
        self.dim = int(dim)
        algebra = correspondence.algebra
        pis = []
        for j, n in enumerate(algebra.blocks):
            arr = np.asarray(pi_units[j], dtype=complex)
            if arr.shape != (n, n, dim, dim):
                raise StructureError(f"pi block {j}: expected shape {(n, n, dim, dim)}, got {arr.shape}")
            pis.append(arr)
        ts = []
        for j, (k, n) in enumerate(correspondence.module.shapes()):
            arr = np.asarray(t_units[j], dtype=complex)
            if arr.size == 0:
                arr = arr.reshape(k, n, dim, dim)
            if arr.shape != (k, n, dim, dim):
                raise StructureError(f"t fiber {j}: expected shape {(k, n, dim, dim)}, got {arr.shape}")
            ts.append(arr)
        self.pi_units = tuple(pis)
        self.t_units = tuple(ts)
        if levels is not None:
            levels = tuple(int(d) for d in levels)
            if sum(levels) != self.dim:
                raise StructureError(f"level dimensions {list(levels)} do not add up to {self.dim}")
        self.levels = levels
        self.truncated = bool(truncated) and levels is not None
        self._cache = {}

    def __repr__(self):
        return f"Representation(dim={self.dim}, levels={self.levels})"

    @classmethod
    def from_functions(
        cls,
        correspondence: Correspondence,
        dim: int,
        pi_unit: Callable[[int, int, int], np.ndarray],
        t_unit: Callable[[int, int, int], np.ndarray],
        **kwargs,
    ) -> Representation:
        """Build from callables returning the image of each matrix unit."""
        algebra = correspondence.algebra
        pis = [
            np.array([[pi_unit(j, r, c) for c in range(n)] for r in range(n)], dtype=complex).reshape(n, n, dim, dim)
            for j, n in enumerate(algebra.blocks)
        ]
        ts = [
            np.array([[t_unit(j, r, c) for c in range(n)] for r in range(k)], dtype=complex).reshape(k, n, dim, dim)
            for j, (k, n) in enumerate(correspondence.module.shapes())
        ]
        return cls(correspondence, dim, pis, ts, **kwargs)

    def with_t_scaled(self, factor: complex) -> Representation:
        return Representation(
            self.correspondence, self.dim, self.pi_units, [factor * t for t in self.t_units],
            self.levels, self.truncated,
        )

    # flattened stacks in basis order
    @property
    def pi_stack(self) -> np.ndarray:
        if "pi" not in self._cache:
            self._cache["pi"] = np.concatenate(
                [p.reshape(-1, self.dim, self.dim) for p in self.pi_units]
            ) if self.pi_units else np.zeros((0, self.dim, self.dim))
        return self._cache["pi"]

    @property
    def t_stack(self) -> np.ndarray:
        if "t" not in self._cache:
            parts = [t.reshape(-1, self.dim, self.dim) for t in self.t_units]
            self._cache["t"] = np.concatenate(parts) if parts else np.zeros((0, self.dim, self.dim))
        return self._cache["t"]

    def pi(self, a: AlgElement) -> np.ndarray:
        if a.parent != self.correspondence.algebra:
            raise StructureError("element of a different algebra")
        return np.tensordot(_coeffs(a.data), self.pi_stack, axes=1)

    def t(self, xi: ModuleElement) -> np.ndarray:
        if xi.parent != self.correspondence.module:
            raise StructureError("element of a different module")
        return np.tensordot(_coeffs(xi.data), self.t_stack, axes=1)

    def level_slices(self) -> list[slice]:
        if self.levels is None:
            return [slice(0, self.dim)]
        out, off = [], 0
        for d in self.levels:
            out.append(slice(off, off + d))
            off += d
        return out

    def below_cut(self) -> np.ndarray:
        """Indices of the levels below the truncation cut (all indices if untruncated)."""
        if not self.truncated:
            return np.arange(self.dim)
        return np.arange(sum(self.levels[:-1]))


def _coeffs(blocks) -> np.ndarray:
    parts = [np.asarray(b).ravel() for b in blocks]
    return np.concatenate(parts) if parts else np.zeros(0)


def zero_representation(x: Correspondence, dim: int = 1) -> Representation:
    zero = np.zeros((dim, dim))
    return Representation.from_functions(x, dim, lambda *_: zero, lambda *_: zero)


def _restrict(mat: np.ndarray, cols) -> np.ndarray:
    return mat if cols is None else mat[:, cols]


def _support(r: Representation, support):
    if support is None:
        support = r.below_cut()
    support = np.asarray(support, dtype=np.int64)
    return None if len(support) == r.dim else support


def _scale(r: Representation) -> float:
    tn = max((spectral_norm(t) for t in r.t_stack), default=0.0)
    pn = max((spectral_norm(p) for p in r.pi_stack), default=0.0)
    return max(1.0, pn, tn * tn)


def verify_representation(r: Representation, tol: float = DEFAULT_TOL, support=None) -> CovarianceReport:
    """Worst-case defects of the representation axioms on basis elements.

    Reported entries:

    ``pi_adjoint``, ``pi_multiplicative``
        ``pi`` is a *-homomorphism on matrix units.
    ``axiom_i``
        ``t(xi)^* t(eta) = pi(<xi, eta>)``.
    ``axiom_ii``
        ``pi(a) t(xi) = t(phi(a) xi)``.
    ``automatic``
        ``t(xi) pi(a) = t(xi a)``; implied by the others, limit ``10 * tol``.
    ``norm_bound``
        ``max(0, ||t(xi)|| - ||xi||)``.

    Defects are measured on vectors in ``support`` (column indices); by
    default, the levels below the cut of a truncated representation.
    """
    x = r.correspondence
    algebra, module = x.algebra, x.module
    cols = _support(r, support)
    P, T = r.pi_stack, r.t_stack
    units = list(algebra.matrix_units())
    basis = list(module.basis())
    scale = _scale(r)
    limit = tol * scale

    def norm(mat):
        return spectral_norm(_restrict(mat, cols))

    adj = 0.0
    mult = 0.0
    index = {key: idx for idx, (key, _) in enumerate(units)}
    for idx, ((j, rr, c), _) in enumerate(units):
        adj = max(adj, norm(P[idx].conj().T - P[index[(j, c, rr)]]))
        n = algebra.blocks[j]
        for c2 in range(n):
            for d in range(n):
                prod = P[idx] @ P[index[(j, c2, d)]]
                expected = P[index[(j, rr, d)]] if c2 == c else 0.0
                mult = max(mult, norm(prod - expected))
    diag = [(j, idx) for idx, ((j, rr, c), _) in enumerate(units) if rr == c]
    for j1, i1 in diag:
        for j2, i2 in diag:
            if j1 != j2:
                mult = max(mult, norm(P[i1] @ P[i2]))

    ax1 = 0.0
    for a, (_, xi) in enumerate(basis):
        ta_h = T[a].conj().T
        for b, (_, eta) in enumerate(basis):
            ax1 = max(ax1, norm(ta_h @ T[b] - r.pi(inner(xi, eta))))

    ax2 = 0.0
    auto = 0.0
    for _, a_el in units:
        pa = r.pi(a_el)
        phi = left_act(x, a_el)
        for idx, (_, xi) in enumerate(basis):
            ax2 = max(ax2, norm(pa @ T[idx] - r.t(phi @ xi)))
            auto = max(auto, norm(T[idx] @ pa - r.t(right_act(xi, a_el))))

    bound = 0.0
    for idx, (_, xi) in enumerate(basis):
        bound = max(bound, norm(T[idx]) - module_norm(xi))

    return CovarianceReport(tol, (
        Defect("pi_adjoint", adj, limit),
        Defect("pi_multiplicative", mult, limit),
        Defect("axiom_i", ax1, limit),
        Defect("axiom_ii", ax2, limit),
        Defect("automatic", auto, 10 * limit),
        Defect("norm_bound", max(bound, 0.0), limit),
    ))


def _theta_images(r: Representation):
    """``t(e_{p,s}) t(e_{q,s})^*`` at column ``s = 0`` and averaged over ``s``."""
    if "theta" not in r._cache:
        first, mean = [], []
        for t in r.t_units:
            k, n = t.shape[:2]
            if k == 0:
                first.append(np.zeros((0, 0, r.dim, r.dim), dtype=complex))
                mean.append(first[-1])
                continue
            conj = t.conj().transpose(0, 1, 3, 2)
            # prods[p, q, s] = t(e_{p,s}) t(e_{q,s})^*
            prods = np.einsum("psxy,qsyz->pqsxz", t, conj)
            first.append(prods[:, :, 0])
            mean.append(prods.mean(axis=2))
        r._cache["theta"] = (first, mean)
    return r._cache["theta"]


def _psi_pair(r: Representation, op: ModuleOperator) -> tuple[np.ndarray, float]:
    if op.parent != r.correspondence.module:
        raise StructureError("operator on a different module")
    first, mean = _theta_images(r)
    out1 = np.zeros((r.dim, r.dim), dtype=complex)
    out2 = np.zeros((r.dim, r.dim), dtype=complex)
    for j, mat in enumerate(op.data):
        if mat.size == 0:
            continue
        out1 += np.tensordot(mat, first[j], axes=2)
        out2 += np.tensordot(mat, mean[j], axes=2)
    return out1, spectral_norm(out1 - out2)


def psi_t(r: Representation, op: ModuleOperator, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Image of ``op`` under the map ``theta_{xi, eta} -> t(xi) t(eta)^*``.

    ``op`` is decomposed into rank-one operators in two ways: the matrix
    unit ``E_{pq}`` of fiber ``j`` is ``theta`` of the fiber units in column
    0, and also the average over all columns. A residual between the two
    images above ``tol`` means ``(pi, t)`` is not a representation.
    """
    out, residual = _psi_pair(r, op)
    if residual > tol * max(1.0, op.norm()) * _scale(r):
        raise NumericalError(f"psi_t is not well defined here: decompositions differ by {residual:.3e}")
    return out


def check_relative_covariance(r: Representation, ideal: Ideal, tol: float = DEFAULT_TOL, support=None) -> CovarianceReport:
    """Defects ``||pi(a) - psi_t(phi(a))||`` for matrix units ``a`` of ``ideal``.

    With ``ideal = jx(X)`` this is covariance on ``J_X``; the empty ideal passes
    vacuously. Measured on all of ``C^dim`` unless ``support`` is given.
    """
    x = r.correspondence
    if ideal.parent != x.algebra:
        raise StructureError("ideal of a different algebra")
    cols = None if support is None else np.asarray(support, dtype=np.int64)
    limit = tol * _scale(r)
    defects = []
    worst = 0.0
    for (j, rr, c), a in x.algebra.matrix_units(ideal.members):
        psi, residual = _psi_pair(r, left_act(x, a))
        worst = max(worst, residual)
        value = spectral_norm(_restrict(r.pi(a) - psi, cols))
        defects.append(Defect(f"cov[{_unit_label(j, rr, c)}]", value, limit))
    if defects:
        defects.insert(0, Defect("psi_well_defined", worst, limit))
    return CovarianceReport(tol, tuple(defects))


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    isometric_defect: float
    block_norms: tuple[float, ...]


def rep_injectivity(r: Representation, tol: float = DEFAULT_TOL) -> InjectivityReport:
    """``pi`` is injective iff it kills no block; ``t`` is then isometric."""
    algebra = r.correspondence.algebra
    norms = tuple(spectral_norm(r.pi_units[j][0, 0]) for j in range(algebra.m))
    defect = 0.0
    for idx, (_, xi) in enumerate(r.correspondence.module.basis()):
        defect = max(defect, abs(spectral_norm(r.t_stack[idx]) - module_norm(xi)))
    return InjectivityReport(all(v > tol for v in norms), defect, norms)


def psi_basis_gram_rank(r: Representation, tol: float = 1e-9) -> tuple[int, int]:
    """Rank of the images of a basis of ``K(X)`` under ``psi_t``, and ``dim K(X)``."""
    module = r.correspondence.module
    images = []
    for j, k in enumerate(module.fibers):
        for p in range(k):
            for q in range(k):
                images.append(_psi_pair(r, module.operator_unit(j, p, q))[0].ravel())
    total = sum(k * k for k in module.fibers)
    if not images:
        return 0, total
    mat = np.array(images)
    gram = mat.conj() @ mat.T
    return int(np.linalg.matrix_rank(gram, tol=tol * max(1.0, np.abs(gram).max()))), total


def generators(ideal: Ideal) -> Iterable[tuple[tuple[int, int, int], AlgElement]]:
    return ideal.parent.matrix_units(ideal.members)
