"""Acceptance suite: one test per criterion, each timed against its budget.

Each test prints a ``criterion N: PASS|FAIL`` line; the lines are repeated
in the pytest terminal summary.
"""
import itertools
import time
from pathlib import Path

import numpy as np

from corrkit.corr import (
    correspondence_flags,
    detect_bimodule,
    from_partial_automorphism,
    gram_quotient_tensor,
    jx,
    left_act,
    left_inner,
    tensor,
)
from corrkit.fdalg import FdAlgebra, ideal_meet, ideal_pairs, ideal_perp, op_norm
from corrkit.fock import build_fock, fock_defect_profile, fock_dims
from corrkit.generate import (
    random_bimodule,
    random_correspondence,
    random_graph,
    random_partial_automorphism,
)
from corrkit.graphalg import (
    Graph,
    check_ck_family,
    ck_relations,
    classify_vertices,
    enumerate_paths,
    graph_correspondence,
    parse_graph,
)
from corrkit.hmod import HilbertModule, inner, module_norm, right_act, theta
from corrkit.rep import rep_injectivity, verify_representation

GOLDEN = Path(__file__).parent / "golden"
RESULTS = []
FOCK_DIM_CAP = 100


def judge(number, title, budget, body):
    start = time.perf_counter()
    error = None
    try:
        body()
    except AssertionError as exc:
        error = exc
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    verdict = "PASS" if error is None and in_time else "FAIL"
    detail = "" if error is None else f" ({error})".splitlines()[0]
    if not in_time:
        detail += " (over budget)"
    line = f"criterion {number:2d}: {verdict}  {title}  [{elapsed:.2f}s / {budget:g}s]{detail}"
    RESULTS.append(line)
    print(line)
    if error is not None:
        raise error
    assert in_time, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def image_rank(x, members):
    rows = [np.concatenate([d.ravel() for d in left_act(x, e).data] + [np.zeros(1)])
            for _, e in x.algebra.matrix_units(members)]
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-9)) if rows else 0


def fock_instances():
    """50 random correspondences whose depth-4 Fock space stays at desk scale."""
    rng = np.random.default_rng(4)
    out = []
    while len(out) < 50:
        x = random_correspondence(rng, max_blocks=4, max_size=3, max_fiber=6)
        if x.module.dim == 0 or sum(fock_dims(x, 4)) > FOCK_DIM_CAP:
            continue
        out.append(x)
    return out


def test_criterion_01_ideal_lattice():
    def body():
        rng = np.random.default_rng(1)
        for m in range(1, 5):
            for blocks in itertools.product((1, 2), repeat=m):
                alg = FdAlgebra(blocks)
                pairs = list(ideal_pairs(alg))
                assert len(pairs) == 4**m
                for i, j in pairs:
                    assert (j <= ideal_perp(i)) == ideal_meet(j, i).is_zero
                for i in alg.ideals():
                    # perp annihilates: a in I^perp, b in I gives ab = 0 exactly
                    a = alg.element([d if k in ideal_perp(i).members else 0 * d
                                     for k, d in enumerate(alg.random_element(rng).data)])
                    b = alg.element([d if k in i.members else 0 * d
                                     for k, d in enumerate(alg.random_element(rng).data)])
                    assert op_norm(a @ b) == 0.0
    judge(1, "ideal lattice: J <= I^perp iff J & I = 0", 1.0, body)


def test_criterion_02_jx_maximality():
    def body():
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = random_correspondence(rng, max_blocks=4, max_size=3, max_fiber=6)
            target = jx(x)
            compact_dim = sum(k * k for k in x.fibers)
            injective = []
            for j in x.algebra.ideals():
                rank = image_rank(x, j.members)
                dim = sum(x.algebra.blocks[i] ** 2 for i in j.members)
                if rank == dim:
                    injective.append(j)
                    if rank == compact_dim:
                        assert j == target
            assert target in injective
            assert all(j <= target for j in injective)
    judge(2, "J_X is the unique maximal injective ideal", 5.0, body)


def test_criterion_03_graph_bridge():
    def body():
        rng = np.random.default_rng(3)
        for _ in range(200):
            g = random_graph(rng, max_vertices=8, max_edges=20)
            x = graph_correspondence(g)
            cls = classify_vertices(g)
            assert [g.vertices[i] for i in jx(x).sorted()] == list(cls.regular)
            flags = correspondence_flags(x)
            assert flags.faithful == (not cls.sinks)
            assert flags.full == (not cls.sources)
    judge(3, "graph bridge: J_X, faithful, full", 5.0, body)


def test_criterion_04_representation_identities():
    def body():
        for x in fock_instances():
            r = build_fock(x, 4)
            report = verify_representation(r)
            for name in ("pi_adjoint", "pi_multiplicative", "axiom_i", "axiom_ii", "norm_bound"):
                assert report.value(name) <= 1e-9, (name, report.value(name))
            assert report.value("automatic") <= 1e-8
            inj = rep_injectivity(r)
            assert inj.injective
            assert inj.isometric_defect <= 1e-8
    judge(4, "Fock axioms below the cut, injective, isometric", 30.0, body)


def test_criterion_05_vacuum_localization():
    def body():
        for x in fock_instances():
            r = build_fock(x, 4)
            prof = fock_defect_profile(r)
            assert len(prof.rows) == sum(x.algebra.blocks[i] ** 2 for i in jx(x).members)
            for row, vac in zip(prof.rows, prof.vacuum_norms):
                # a matrix unit acts on level 0 with norm exactly 1
                assert abs(vac - 1.0) <= 1e-9
                assert abs(row[0] - vac) <= 1e-9
                assert max(row[1:]) <= 1e-9
    judge(5, "covariance on J_X fails exactly at the vacuum", 30.0, body)


def test_criterion_06_bimodule_roundtrip():
    def body():
        rng = np.random.default_rng(6)
        for _ in range(100):
            x = random_bimodule(rng)
            lip = detect_bimodule(x)
            assert lip is not None
            values = []
            # enough samples to reach rank n^2 on the largest (3 x 3) block
            for _ in range(12):
                xi, eta = x.module.random_element(rng), x.module.random_element(rng)
                a = left_inner(lip, xi, eta)
                assert left_act(x, a).allclose(theta(xi, eta), 1e-10)
                values.append(a)
            spanned = {
                i for i, n in enumerate(x.algebra.blocks)
                if np.linalg.matrix_rank(np.array([v.data[i].ravel() for v in values]), tol=1e-9) == n * n
            }
            assert spanned == set(jx(x).members)
    judge(6, "bimodule roundtrip and span of left inner products", 10.0, body)


def test_criterion_07_partial_automorphisms():
    def body():
        rng = np.random.default_rng(7)
        for _ in range(50):
            alg, i_ideal, j_ideal, block_map, us = random_partial_automorphism(rng, max_blocks=4)
            x = from_partial_automorphism(alg, i_ideal, j_ideal, block_map, us)
            assert jx(x) == i_ideal
            assert detect_bimodule(x) is not None
    judge(7, "partial automorphisms: J_X = I, bimodule", 5.0, body)


def test_criterion_08_tensor_and_fock_oracles():
    def body():
        rng = np.random.default_rng(8)
        for _ in range(50):
            x = random_correspondence(rng, max_blocks=3, max_size=2, max_fiber=4)
            y = random_correspondence(rng, algebra=x.algebra, max_fiber=4)
            t = tensor(x, y)
            fibers, mult = gram_quotient_tensor(x, y)
            assert list(t.fibers) == fibers
            assert t.multiplicity.tolist() == mult
        for _ in range(50):
            g = random_graph(rng, max_vertices=6, max_edges=10)
            dims = fock_dims(graph_correspondence(g), 5)
            assert dims[0] == len(g.vertices)
            assert dims[1:] == [len(enumerate_paths(g, n)) for n in range(1, 6)]
    judge(8, "tensor vs Gram quotient; Fock levels vs path counts", 20.0, body)


def test_criterion_09_theta_and_cauchy_schwarz():
    def body():
        rng = np.random.default_rng(9)
        for _ in range(1000):
            m = int(rng.integers(1, 4))
            alg = FdAlgebra(tuple(int(v) for v in rng.integers(1, 4, size=m)))
            mod = HilbertModule(alg, tuple(int(v) for v in rng.integers(0, 4, size=m)))
            xi, eta, zeta, omega = (mod.random_element(rng) for _ in range(4))
            assert theta(xi, eta).adjoint().allclose(theta(eta, xi), 1e-10)
            assert (theta(xi, eta) @ theta(zeta, omega)).allclose(theta(right_act(xi, inner(eta, zeta)), omega), 1e-10)
            assert op_norm(inner(xi, eta)) <= module_norm(xi) * module_norm(eta) + 1e-10
    judge(9, "theta calculus and Cauchy-Schwarz", 5.0, body)


def test_criterion_10_ck_golden():
    def body():
        edge = Graph(("u", "v"), (("e", "u", "v"),))
        e11 = np.array([[1.0, 0.0], [0.0, 0.0]])
        e22 = np.array([[0.0, 0.0], [0.0, 1.0]])
        e21 = np.array([[0.0, 0.0], [1.0, 0.0]])
        report = check_ck_family(edge, {"v": e11, "u": e22}, {"e": e21})
        assert report.ok
        assert max(d.value for d in report.defects) == 0.0
        g = parse_graph((GOLDEN / "o2_graph.json").read_text())
        assert ck_relations(g).encode() == (GOLDEN / "o2_relations.txt").read_bytes()
    judge(10, "CK family zero defect; O_2 relations golden", 1.0, body)
