"""Truncated Fock representations.

Level ``n`` is ``X^{(x)n} (x)_A H`` where ``H = C^{n_0} + ... + C^{n_{m-1}}``
carries the identity representation of ``A``; a fiber ``M_{k x n_j}``
localizes to ``C^k``. ``X^{(x)(n+1)}`` is built as ``X (x)_A X^{(x)n}``, so
``pi`` acts through the leftmost factor and ``t(xi)`` prepends ``xi``.
Creation operators annihilate the top level, which is where the
representation axioms stop holding.

Basis order: levels ascending, fibers ascending within a level, native
tensor coordinates within a fiber.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corr import Correspondence, TensorProduct, identity_correspondence, jx, left_act
from .errors import SizeLimitError
from .fdalg import DEFAULT_TOL, Ideal, spectral_norm
from .rep import CovarianceReport, Representation, _psi_pair, _unit_label, verify_representation

DEFAULT_CAP = 10**6


def fock_dims(x: Correspondence, depth: int, cap: int = DEFAULT_CAP) -> list[int]:
    """Dimensions ``d_0, ..., d_depth`` of the localized levels.

    Uses only the recursion ``k^{(n+1)} = M^{(n)} k^X``, ``M^{(n+1)} = M^{(n)} M_X``
    in exact integers.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    blocks = x.algebra.blocks
    mx = [list(row) for row in x.left_action.multiplicity]
    kx = list(x.fibers)
    m = len(blocks)
    mult = [[int(i == j) for i in range(m)] for j in range(m)]
    dims = [sum(blocks)]
    for _ in range(depth):
        fibers = [sum(row[i] * kx[i] for i in range(m)) for row in mult]
        mult = [[sum(row[i] * mx[i][l] for i in range(m)) for l in range(m)] for row in mult]
        dims.append(sum(fibers))
    for n, d in enumerate(dims):
        if d > cap:
            raise SizeLimitError(f"Fock level {n} has dimension {d}, above the cap {cap}")
    return dims


class FockSpace:
    """The levels ``X^{(x)0} = A, X, X (x) X, ...`` up to ``depth``."""

    def __init__(self, x: Correspondence, depth: int, cap: int = DEFAULT_CAP):
        self.correspondence = x
        self.depth = depth
        self.dims = tuple(fock_dims(x, depth, cap))
        levels = [identity_correspondence(x.algebra)]
        for _ in range(depth):
            levels.append(TensorProduct(x, levels[-1]))
        self.levels = tuple(levels)
        assert tuple(sum(lv.fibers) for lv in levels) == self.dims
        self.level_offsets = tuple(int(v) for v in np.cumsum((0,) + self.dims[:-1]))
        self.fiber_offsets = tuple(
            tuple(int(base + v) for v in np.cumsum((0,) + lv.fibers[:-1]))
            for base, lv in zip(self.level_offsets, levels)
        )

    @property
    def dim(self) -> int:
        return sum(self.dims)


def build_fock(x: Correspondence, depth: int, cap: int = DEFAULT_CAP) -> Representation:
    """Creation-operator representation on the Fock space truncated at ``depth``.

    The axioms hold on levels ``0 .. depth - 1``; on the top level ``t``
    vanishes, so ``t(xi)^* t(eta) = pi(<xi, eta>)`` fails there.
    """
    space = FockSpace(x, depth, cap)
    algebra = x.algebra
    dim = space.dim
    pis = [np.zeros((n, n, dim, dim), dtype=complex) for n in algebra.blocks]
    for n, level in enumerate(space.levels):
        for j, k in enumerate(level.fibers):
            w = level.left_action.unitary(j)
            base = space.fiber_offsets[n][j]
            for i, off in level.left_action.segments(j):
                size = algebra.blocks[i]
                cols = w[:, off:off + size]
                # pi(e_rc) restricted to this fiber: W E_{off+r, off+c} W^*
                pis[i][:, :, base:base + k, base:base + k] += np.einsum("xr,yc->rcxy", cols, cols.conj())
    ts = [np.zeros((k, n, dim, dim), dtype=complex) for k, n in x.module.shapes()]
    for n in range(depth):
        level, nxt = space.levels[n], space.levels[n + 1]
        for j, kin in enumerate(level.fibers):
            wh = level.left_action.unitary(j).conj().T
            in_base = space.fiber_offsets[n][j]
            out_base = space.fiber_offsets[n + 1][j]
            for i, in_off, out_off in nxt.chunks(j):
                for r in range(x.fibers[i]):
                    row = out_base + out_off + r
                    for s in range(algebra.blocks[i]):
                        ts[i][r, s, row, in_base:in_base + kin] += wh[in_off + s]
    return Representation(x, dim, pis, ts, levels=space.dims, truncated=True)


@dataclass(frozen=True)
class DefectProfile:
    """Per-level norms of ``pi(a) - psi_t(phi(a))`` for generators ``a`` of ``J_X``."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    vacuum_norms: tuple[float, ...]

    def contract_holds(self, tol: float = DEFAULT_TOL) -> bool:
        """Zero defect on levels ``1..N`` and the full vacuum norm on level 0."""
        return all(
            abs(row[0] - vac) <= tol and all(v <= tol for v in row[1:])
            for row, vac in zip(self.rows, self.vacuum_norms)
        )

    def to_dict(self) -> dict:
        return {
            "levels": list(self.dims),
            "generators": [
                {"generator": lab, "per_level": list(row), "vacuum_norm": vac}
                for lab, row, vac in zip(self.labels, self.rows, self.vacuum_norms)
            ],
        }


def covariance_profile(r: Representation, ideal: Ideal) -> DefectProfile:
    x = r.correspondence
    slices = r.level_slices()
    labels, rows, vac = [], [], []
    for (j, rr, c), a in x.algebra.matrix_units(ideal.members):
        pa = r.pi(a)
        psi, _ = _psi_pair(r, left_act(x, a))
        diff = pa - psi
        labels.append(_unit_label(j, rr, c))
        rows.append(tuple(spectral_norm(diff[:, s]) for s in slices))
        vac.append(spectral_norm(pa[:, slices[0]]))
    dims = r.levels if r.levels is not None else (r.dim,)
    return DefectProfile(tuple(dims), tuple(labels), tuple(rows), tuple(vac))


def fock_defect_profile(r: Representation, x: Correspondence | None = None) -> DefectProfile:
    """Covariance defects on ``J_X`` of a Fock representation, resolved by level."""
    x = r.correspondence if x is None else x
    return covariance_profile(r, jx(x))


@dataclass(frozen=True)
class LevelTable:
    """Representation-axiom defects with vectors restricted to one level at a time."""

    dims: tuple[int, ...]
    names: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]  # rows[level][name]
    reports: tuple[CovarianceReport, ...]

    def column(self, name: str) -> tuple[float, ...]:
        idx = self.names.index(name)
        return tuple(row[idx] for row in self.rows)

    def to_dict(self) -> dict:
        return {
            "levels": list(self.dims),
            "per_level": [dict(zip(self.names, row)) for row in self.rows],
        }


def level_defect_table(r: Representation, tol: float = DEFAULT_TOL) -> LevelTable:
    reports = []
    for s in r.level_slices():
        reports.append(verify_representation(r, tol, support=np.arange(s.start, s.stop)))
    names = tuple(d.name for d in reports[0].defects)
    rows = tuple(tuple(d.value for d in rep.defects) for rep in reports)
    dims = r.levels if r.levels is not None else (r.dim,)
    return LevelTable(tuple(dims), names, rows, tuple(reports))
