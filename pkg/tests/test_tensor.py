import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrkit.corr import (
    gram_quotient_tensor,
    identity_correspondence,
    left_act,
    make_correspondence,
    tensor,
    zero_correspondence,
)
from corrkit.errors import StructureError
from corrkit.fdalg import FdAlgebra
from corrkit.generate import random_correspondence
from corrkit.graphalg import Graph, enumerate_paths, graph_correspondence
from corrkit.hmod import inner, right_act


def pair(rng, **kw):
    x = random_correspondence(rng, max_fiber=4, **kw)
    return x, random_correspondence(rng, algebra=x.algebra, max_fiber=4)


def test_zero_module_absorbs():
    alg = FdAlgebra((1, 2))
    x = make_correspondence((1, 2), (2, 3), [[1, 0], [1, 1]])
    z = zero_correspondence(alg)
    for t in (tensor(x, z), tensor(z, x)):
        assert t.fibers == (0, 0)
        assert t.module.dim == 0


def test_identity_is_unit(rng):
    for _ in range(20):
        x = random_correspondence(rng)
        e = identity_correspondence(x.algebra)
        right = tensor(x, e)
        assert right.fibers == x.fibers
        np.testing.assert_array_equal(right.multiplicity, x.multiplicity)
        # A (x) X is the essential part phi(A) X
        left = tensor(e, x)
        assert left.fibers == tuple(x.left_action.used(j) for j in range(x.algebra.m))
        np.testing.assert_array_equal(left.multiplicity, x.multiplicity)


def test_two_loops_powers():
    x = graph_correspondence(Graph(("v",), (("1", "v", "v"), ("2", "v", "v"))))
    level = x
    for n in range(1, 6):
        assert level.fibers == (2**n,)
        assert level.fibers[0] == len(enumerate_paths(Graph(("v",), (("1", "v", "v"), ("2", "v", "v"))), n))
        level = tensor(x, level)


def test_mismatched_algebras():
    with pytest.raises(StructureError):
        tensor(identity_correspondence(FdAlgebra((1,))), identity_correspondence(FdAlgebra((2,))))


def test_gram_oracle_agrees(rng):
    for _ in range(25):
        x, y = pair(rng)
        t = tensor(x, y)
        fibers, mult = gram_quotient_tensor(x, y)
        assert list(t.fibers) == fibers
        assert t.multiplicity.tolist() == mult


def test_balanced_inner_product(rng):
    for _ in range(20):
        x, y = pair(rng)
        t = tensor(x, y)
        xi1, xi2 = x.module.random_element(rng), x.module.random_element(rng)
        eta1, eta2 = y.module.random_element(rng), y.module.random_element(rng)
        lhs = inner(t.elementary(xi1, eta1), t.elementary(xi2, eta2))
        rhs = inner(eta1, left_act(y, inner(xi1, xi2)) @ eta2)
        assert lhs.allclose(rhs, 1e-10)


def test_actions_on_elementary_tensors(rng):
    for _ in range(20):
        x, y = pair(rng)
        t = tensor(x, y)
        alg = x.algebra
        xi, eta, a = x.module.random_element(rng), y.module.random_element(rng), alg.random_element(rng)
        # left action on the first factor, right action on the second
        assert (left_act(t, a) @ t.elementary(xi, eta)).allclose(t.elementary(left_act(x, a) @ xi, eta), 1e-10)
        assert right_act(t.elementary(xi, eta), a).allclose(t.elementary(xi, right_act(eta, a)), 1e-10)
        # balancing over A
        assert t.elementary(right_act(xi, a), eta).allclose(t.elementary(xi, left_act(y, a) @ eta), 1e-10)


def test_elementary_tensors_span(rng):
    for _ in range(10):
        x, y = pair(rng)
        t = tensor(x, y)
        if t.module.dim == 0:
            continue
        rows = [
            np.concatenate([d.ravel() for d in t.elementary(e1, e2).data])
            for _, e1 in x.module.basis()
            for _, e2 in y.module.basis()
        ]
        assert np.linalg.matrix_rank(np.array(rows), tol=1e-9) == t.module.dim


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    x = random_correspondence(rng, max_fiber=3)
    y = random_correspondence(rng, algebra=x.algebra, max_fiber=3)
    z = random_correspondence(rng, algebra=x.algebra, max_fiber=3)
    a, b = tensor(tensor(x, y), z), tensor(x, tensor(y, z))
    assert a.fibers == b.fibers
    np.testing.assert_array_equal(a.multiplicity, b.multiplicity)
