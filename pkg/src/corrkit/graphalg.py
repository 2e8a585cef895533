"""Directed graphs, their correspondences and Cuntz-Krieger relations.

Conventions: the right inner product sums over edges *into* a vertex
(``<xi, eta>(v) = sum_{r(e) = v} conj(xi(e)) eta(e)``) and the left action
reads the *source* (``phi(f) xi (e) = f(s(e)) xi(e)``).

Vertices flagged as infinite emitters have infinitely many out-edges; they
are handled symbolically (classification, ideals, relations) but have no
finite matrix model.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import formats
from .corr import Correspondence, StarHom, jx
from .errors import InputError, StructureError, UnsupportedInstance
from .fdalg import DEFAULT_TOL, FdAlgebra, spectral_norm
from .hmod import HilbertModule
from .rep import CovarianceReport, Defect, Representation, check_relative_covariance, verify_representation


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (name, source, range)
    infinite_emitters: frozenset[str] = frozenset()

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        edges = tuple((str(e), str(s), str(r)) for e, s, r in self.edges)
        seen = set()
        for v in vertices:
            if v in seen:
                raise InputError(f"duplicate vertex {v!r}")
            seen.add(v)
        names = set()
        for e, s, r in edges:
            if e in names:
                raise InputError(f"duplicate edge name {e!r}")
            names.add(e)
            for end in (s, r):
                if end not in seen:
                    raise InputError(f"edge {e!r} refers to unknown vertex {end!r}")
        infinite = frozenset(str(v) for v in self.infinite_emitters)
        for v in sorted(infinite - seen):
            raise InputError(f"infinite emitter {v!r} is not a vertex")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "infinite_emitters", infinite)

    def index(self, v: str) -> int:
        return self.vertices.index(v)

    def source(self, e: str) -> str:
        return self._edge(e)[1]

    def range(self, e: str) -> str:
        return self._edge(e)[2]

    def _edge(self, e: str):
        for edge in self.edges:
            if edge[0] == e:
                return edge
        raise KeyError(e)

    def out_edges(self, v: str) -> list[str]:
        return [e for e, s, _ in self.edges if s == v]

    def in_edges(self, v: str) -> list[str]:
        return [e for e, _, r in self.edges if r == v]

    def to_dict(self) -> dict:
        out = {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}
        if self.infinite_emitters:
            out["infinite_emitters"] = [v for v in self.vertices if v in self.infinite_emitters]
        return out


def parse_graph(text: str, source: str = "<graph>") -> Graph:
    """Parse ``{"vertices": [...], "edges": [[name, source, range], ...], "infinite_emitters": [...]}``."""
    obj = formats.load_json(text, source)
    formats.check_keys(obj, {"vertices", "edges"}, {"infinite_emitters"}, source)
    vertices = obj["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise InputError(f"{source}: 'vertices' must be a list of strings")
    edges = obj["edges"]
    if not isinstance(edges, list):
        raise InputError(f"{source}: 'edges' must be a list")
    for idx, edge in enumerate(edges):
        if not (isinstance(edge, list) and len(edge) == 3 and all(isinstance(x, str) for x in edge)):
            raise InputError(f"{source}: edges[{idx}] must be [name, source, range] strings")
    infinite = obj.get("infinite_emitters", [])
    if not isinstance(infinite, list) or not all(isinstance(v, str) for v in infinite):
        raise InputError(f"{source}: 'infinite_emitters' must be a list of strings")
    try:
        return Graph(tuple(vertices), tuple(tuple(e) for e in edges), frozenset(infinite))
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


@dataclass(frozen=True)
class VertexClassification:
    sinks: tuple[str, ...]
    sources: tuple[str, ...]
    regular: tuple[str, ...]
    infinite: tuple[str, ...]

    def to_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("sinks", "sources", "regular", "infinite")}


def classify_vertices(graph: Graph) -> VertexClassification:
    out_count = {v: 0 for v in graph.vertices}
    in_count = {v: 0 for v in graph.vertices}
    for _, s, r in graph.edges:
        out_count[s] += 1
        in_count[r] += 1
    inf = graph.infinite_emitters
    return VertexClassification(
        sinks=tuple(v for v in graph.vertices if v not in inf and out_count[v] == 0),
        sources=tuple(v for v in graph.vertices if in_count[v] == 0),
        regular=tuple(v for v in graph.vertices if v not in inf and out_count[v] > 0),
        infinite=tuple(v for v in graph.vertices if v in inf),
    )


@dataclass(frozen=True)
class GraphIdeals:
    """Vertex sets supporting ``J_X``, ``ker phi_X`` and ``phi_X^{-1}(K(X))``."""

    jx: tuple[str, ...]
    ker_phi: tuple[str, ...]
    preimage_K: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"jx": list(self.jx), "ker_phi": list(self.ker_phi), "preimage_K": list(self.preimage_K)}


def graph_ideals(graph: Graph) -> GraphIdeals:
    cls = classify_vertices(graph)
    return GraphIdeals(
        jx=cls.regular,
        ker_phi=cls.sinks,
        preimage_K=tuple(v for v in graph.vertices if v not in graph.infinite_emitters),
    )


def edge_basis(graph: Graph) -> dict[str, tuple[int, int]]:
    """Edge ``e`` -> ``(fiber r(e), row)`` in the correspondence of :func:`graph_correspondence`.

    Rows of a fiber list the incoming edges by source vertex, then by
    position in the edge list, which puts the left action in canonical form.
    """
    out = {}
    for vi, v in enumerate(graph.vertices):
        incoming = [(graph.index(s), pos, e) for pos, (e, s, r) in enumerate(graph.edges) if r == v]
        for row, (_, _, e) in enumerate(sorted(incoming)):
            out[e] = (vi, row)
    return out


def graph_correspondence(graph: Graph) -> Correspondence:
    """Blocks of size 1 per vertex, fiber ``|r^{-1}(v)|``, ``M[v][u] = #{e : u -> v}``."""
    if graph.infinite_emitters:
        names = [v for v in graph.vertices if v in graph.infinite_emitters]
        raise UnsupportedInstance(
            f"infinite emitters {names} have no finite matrix model; use graph_ideals/ck_relations"
        )
    nv = len(graph.vertices)
    if nv == 0:
        raise StructureError("a graph needs at least one vertex")
    algebra = FdAlgebra((1,) * nv)
    fibers = [0] * nv
    mult = [[0] * nv for _ in range(nv)]
    for _, s, r in graph.edges:
        fibers[graph.index(r)] += 1
        mult[graph.index(r)][graph.index(s)] += 1
    return Correspondence(HilbertModule(algebra, fibers), StarHom(algebra, fibers, mult))


def enumerate_paths(graph: Graph, length: int) -> list[tuple[str, ...]]:
    """All edge sequences ``e_1 ... e_n`` with ``r(e_i) = s(e_{i+1})``, by depth-first search."""
    if length == 0:
        return [()]
    by_source: dict[str, list[tuple[str, str]]] = {}
    for e, s, r in graph.edges:
        by_source.setdefault(s, []).append((e, r))
    out = []

    def extend(path, end):
        if len(path) == length:
            out.append(tuple(path))
            return
        for e, r in by_source.get(end, ()):
            path.append(e)
            extend(path, r)
            path.pop()

    for e, _, r in graph.edges:
        extend([e], r)
    return out


# -- Cuntz-Krieger relations ------------------------------------------------------


def ck_relations(graph: Graph) -> str:
    """Generators-and-relations presentation, one relation per line.

    Orthogonality first, then vertex relations in vertex order, then the
    two relations of each edge in edge order.
    """
    lines = [
        "p_x p_y = 0 for distinct x, y in {" + ", ".join(graph.vertices) + "}",
        "s_e* s_f = 0 for distinct e, f in {" + ", ".join(e for e, _, _ in graph.edges) + "}",
    ]
    for v in graph.vertices:
        if v in graph.infinite_emitters:
            lines.append(f"p_{v} >= sum_(e in F) s_e s_e* for every finite F in s^-1({v})")
            continue
        out = graph.out_edges(v)
        if out:
            lines.append(f"p_{v} = " + " + ".join(f"s_{e} s_{e}*" for e in out))
    for e, s, r in graph.edges:
        lines.append(f"s_{e}* s_{e} = p_{r}")
        lines.append(f"s_{e} s_{e}* <= p_{s}")
    return "\n".join(lines) + "\n"


def check_ck_family(
    graph: Graph,
    projections: Mapping[str, np.ndarray],
    isometries: Mapping[str, np.ndarray],
    tol: float = DEFAULT_TOL,
) -> CovarianceReport:
    """Check a family ``{p_v}``, ``{s_e}`` against the graph's relations.

    When the graph has no infinite emitters the induced pair
    ``pi(f) = sum f(v) p_v``, ``t(xi) = sum xi(e) s_e`` is also checked as a
    representation (entries prefixed ``rep.``) and for covariance on the
    regular vertices (entries prefixed ``cov.``).
    """
    missing = [v for v in graph.vertices if v not in projections]
    missing += [e for e, _, _ in graph.edges if e not in isometries]
    if missing:
        raise StructureError(f"family has no matrix for {missing}")
    extra = sorted(set(projections) - set(graph.vertices)) + sorted(
        set(isometries) - {e for e, _, _ in graph.edges}
    )
    if extra:
        raise StructureError(f"family names unknown vertices or edges {extra}")
    p = {v: np.asarray(projections[v], dtype=complex) for v in graph.vertices}
    s = {e: np.asarray(isometries[e], dtype=complex) for e, _, _ in graph.edges}
    shapes = {m.shape for m in list(p.values()) + list(s.values())}
    if len(shapes) != 1 or len(next(iter(shapes))) != 2 or next(iter(shapes))[0] != next(iter(shapes))[1]:
        raise StructureError(f"dimension mismatch among family matrices: {sorted(shapes)}")
    dim = next(iter(shapes))[0]

    proj = max((max(spectral_norm(m @ m - m), spectral_norm(m - m.conj().T)) for m in p.values()), default=0.0)
    orth = 0.0
    for a, u in enumerate(graph.vertices):
        for w in graph.vertices[a + 1:]:
            orth = max(orth, spectral_norm(p[u] @ p[w]))
    names = [e for e, _, _ in graph.edges]
    ranges = 0.0
    partial = 0.0
    for a, e in enumerate(names):
        partial = max(partial, spectral_norm(s[e] @ s[e].conj().T @ s[e] - s[e]))
        for f in names[a + 1:]:
            ranges = max(ranges, spectral_norm(s[e].conj().T @ s[f]))
    source_rel = 0.0
    order_rel = 0.0
    for e, src, rng in graph.edges:
        source_rel = max(source_rel, spectral_norm(s[e].conj().T @ s[e] - p[rng]))
        gap = p[src] - s[e] @ s[e].conj().T
        low = np.linalg.eigvalsh((gap + gap.conj().T) / 2)[0] if dim else 0.0
        order_rel = max(order_rel, -low)
    ck_sum = 0.0
    for v in classify_vertices(graph).regular:
        total = sum((s[e] @ s[e].conj().T for e in graph.out_edges(v)), np.zeros((dim, dim), dtype=complex))
        ck_sum = max(ck_sum, spectral_norm(p[v] - total))
    scale = max([1.0] + [spectral_norm(m) ** 2 for m in s.values()] + [spectral_norm(m) for m in p.values()])
    limit = tol * scale
    report = CovarianceReport(tol, (
        Defect("projection", proj, limit),
        Defect("orthogonal_projections", orth, limit),
        Defect("orthogonal_ranges", ranges, limit),
        Defect("partial_isometry", partial, limit),
        Defect("source_projection", source_rel, limit),
        Defect("range_inequality", max(order_rel, 0.0), limit),
        Defect("ck_sum", ck_sum, limit),
    ))
    if graph.infinite_emitters:
        return report
    rep = induced_representation(graph, p, s)
    x = rep.correspondence
    checked = verify_representation(rep, tol).merged(check_relative_covariance(rep, jx(x), tol))
    prefixed = tuple(
        Defect(("cov." if d.name.startswith(("cov", "psi")) else "rep.") + d.name, d.value, d.limit)
        for d in checked.defects
    )
    return CovarianceReport(tol, report.defects + prefixed)


def induced_representation(graph: Graph, projections, isometries) -> Representation:
    """The pair ``(pi, t)`` of a family ``{p_v}``, ``{s_e}``."""
    x = graph_correspondence(graph)
    basis = edge_basis(graph)
    by_cell = {cell: e for e, cell in basis.items()}
    dim = np.asarray(projections[graph.vertices[0]]).shape[0]
    return Representation.from_functions(
        x,
        dim,
        lambda j, r, c: projections[graph.vertices[j]],
        lambda j, r, c: isometries[by_cell[(j, r)]],
    )
