"""Random instances for property tests and cross-checks."""
from __future__ import annotations

import numpy as np

from .corr import Correspondence, StarHom, from_partial_automorphism
from .fdalg import FdAlgebra, Ideal
from .graphalg import Graph, graph_correspondence
from .hmod import HilbertModule


def random_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_algebra(rng: np.random.Generator, max_blocks: int = 4, max_size: int = 3) -> FdAlgebra:
    m = int(rng.integers(1, max_blocks + 1))
    return FdAlgebra(tuple(int(n) for n in rng.integers(1, max_size + 1, size=m)))


def random_correspondence(
    rng: np.random.Generator,
    algebra: FdAlgebra | None = None,
    max_blocks: int = 4,
    max_size: int = 3,
    max_fiber: int = 6,
    unitaries: bool = True,
) -> Correspondence:
    """Random fibers, multiplicities (zero columns and zero corners allowed) and unitaries."""
    if algebra is None:
        algebra = random_algebra(rng, max_blocks, max_size)
    blocks = algebra.blocks
    fibers, mult = [], []
    for _ in blocks:
        k = int(rng.integers(0, max_fiber + 1))
        row = [0] * len(blocks)
        room = k
        for i in rng.permutation(len(blocks)):
            if rng.random() < 0.5 and blocks[i] <= room:
                copies = int(rng.integers(1, room // blocks[i] + 1))
                row[i] = copies
                room -= copies * blocks[i]
        fibers.append(k)
        mult.append(row)
    ws = [random_unitary(rng, k) for k in fibers] if unitaries else None
    return Correspondence(HilbertModule(algebra, fibers), StarHom(algebra, fibers, mult, ws))


def random_graph(rng: np.random.Generator, max_vertices: int = 8, max_edges: int = 20) -> Graph:
    nv = int(rng.integers(1, max_vertices + 1))
    ne = int(rng.integers(0, max_edges + 1))
    vertices = tuple(f"v{i}" for i in range(nv))
    edges = tuple(
        (f"e{i}", vertices[int(rng.integers(nv))], vertices[int(rng.integers(nv))]) for i in range(ne)
    )
    return Graph(vertices, edges)


def random_partial_automorphism(rng: np.random.Generator, max_blocks: int = 4, max_size: int = 3):
    """``(algebra, I, J, block_map, unitaries)`` with a size-preserving block bijection."""
    algebra = random_algebra(rng, max_blocks, max_size)
    m = algebra.m
    perm = list(range(m))
    # shuffle within groups of equal block size
    for size in set(algebra.blocks):
        idx = [i for i in range(m) if algebra.blocks[i] == size]
        shuffled = list(rng.permutation(idx))
        for a, b in zip(idx, shuffled):
            perm[a] = int(b)
    members = [i for i in range(m) if rng.random() < 0.6]
    block_map = {i: perm[i] for i in members}
    i_ideal = Ideal(algebra, frozenset(members))
    j_ideal = Ideal(algebra, frozenset(block_map.values()))
    unitaries = {i: random_unitary(rng, algebra.blocks[i]) for i in members}
    return algebra, i_ideal, j_ideal, block_map, unitaries


def cycle_graph(n: int) -> Graph:
    vertices = tuple(f"v{i}" for i in range(n))
    edges = tuple((f"e{i}", vertices[i], vertices[(i + 1) % n]) for i in range(n))
    return Graph(vertices, edges)


def random_bimodule(rng: np.random.Generator) -> Correspondence:
    """A cycle graph, a cycle with a tail of sinks, or a partial automorphism."""
    kind = rng.integers(3)
    if kind == 0:
        return graph_correspondence(cycle_graph(int(rng.integers(1, 6))))
    if kind == 1:
        # disjoint cycles plus isolated vertices
        n = int(rng.integers(1, 5))
        g = cycle_graph(n)
        extra = tuple(f"w{i}" for i in range(int(rng.integers(0, 3))))
        return graph_correspondence(Graph(g.vertices + extra, g.edges))
    return from_partial_automorphism(*random_partial_automorphism(rng))
