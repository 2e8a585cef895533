import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrkit.errors import StructureError
from corrkit.fdalg import FdAlgebra, op_norm
from corrkit.hmod import (
    HilbertModule,
    apply,
    compose,
    inner,
    is_full,
    module_norm,
    op_compose_adjoint,
    right_act,
    theta,
)


def random_module(rng, max_blocks=3, max_size=3, max_fiber=4):
    m = int(rng.integers(1, max_blocks + 1))
    blocks = tuple(int(v) for v in rng.integers(1, max_size + 1, size=m))
    fibers = tuple(int(v) for v in rng.integers(0, max_fiber + 1, size=m))
    return HilbertModule(FdAlgebra(blocks), fibers)


def test_inner_matrix_units():
    mod = HilbertModule(FdAlgebra((2,)), (1,))
    xi = mod.element([np.array([[1, 0]])])
    eta = mod.element([np.array([[0, 1]])])
    np.testing.assert_array_equal(inner(xi, eta).data[0], [[0, 1], [0, 0]])


def test_inner_positive_and_linear(rng):
    mod = HilbertModule(FdAlgebra((2, 3)), (3, 2))
    for _ in range(100):
        xi = mod.random_element(rng)
        for block in inner(xi, xi).data:
            assert np.linalg.eigvalsh(block).min() >= -1e-12
    alg = mod.algebra
    for _ in range(20):
        xi, eta, a = mod.random_element(rng), mod.random_element(rng), alg.random_element(rng)
        assert inner(xi, right_act(eta, a)).allclose(inner(xi, eta) @ a, 1e-11)
        assert inner(xi, eta).adjoint().allclose(inner(eta, xi), 1e-12)


def test_right_action(rng):
    mod = HilbertModule(FdAlgebra((2, 1)), (2, 3))
    alg = mod.algebra
    xi = mod.random_element(rng)
    assert right_act(xi, alg.identity()).allclose(xi, 0.0)
    assert right_act(xi, alg.zero()).allclose(mod.zero(), 0.0)
    for _ in range(20):
        a, b = alg.random_element(rng), alg.random_element(rng)
        assert right_act(right_act(xi, a), b).allclose(right_act(xi, a @ b), 1e-11)
    with pytest.raises(StructureError):
        right_act(xi, FdAlgebra((1,)).identity())


def test_module_norm():
    mod = HilbertModule(FdAlgebra((2,)), (1,))
    assert module_norm(mod.zero()) == 0.0
    assert module_norm(mod.element([np.array([[3.0, 4.0]])])) == pytest.approx(5.0, abs=1e-12)


def test_module_norm_singular_value_oracle(rng):
    mod = HilbertModule(FdAlgebra((3, 2)), (2, 4))
    for _ in range(30):
        xi = mod.random_element(rng)
        sv = max(np.linalg.svd(m, compute_uv=False).max() for m in xi.data)
        assert module_norm(xi) == pytest.approx(sv, rel=1e-10)
        assert module_norm(xi) ** 2 == pytest.approx(op_norm(inner(xi, xi)), rel=1e-10)


def test_theta_projection():
    mod = HilbertModule(FdAlgebra((2,)), (3,))
    xi = mod.element([np.array([[1, 0], [0, 1], [0, 0]]) / 1.0])
    p = theta(xi, xi)
    assert compose(p, p).allclose(p, 1e-11)
    assert p.adjoint().allclose(p, 1e-11)


def test_theta_applies_as_rank_one(rng):
    mod = HilbertModule(FdAlgebra((2, 3)), (2, 1))
    for _ in range(100):
        xi, eta, zeta = (mod.random_element(rng) for _ in range(3))
        assert apply(theta(xi, eta), zeta).allclose(right_act(xi, inner(eta, zeta)), 1e-11)
        assert theta(xi, eta).adjoint().allclose(theta(eta, xi), 1e-14)


def test_operator_algebra(rng):
    mod = HilbertModule(FdAlgebra((2, 1)), (3, 2))
    t = mod.random_operator(rng)
    assert op_compose_adjoint(mod.identity_operator(), t).allclose(t, 0.0)
    for _ in range(20):
        xi, eta, zeta, omega = (mod.random_element(rng) for _ in range(4))
        lhs = op_compose_adjoint(theta(xi, eta), theta(zeta, omega))
        assert lhs.allclose(theta(right_act(xi, inner(eta, zeta)), omega), 1e-10)
        s = mod.random_operator(rng)
        left = inner(op_compose_adjoint(s, xi, "apply"), zeta)
        right = inner(xi, op_compose_adjoint(op_compose_adjoint(s, opcode="adjoint"), zeta, "apply"))
        assert left.allclose(right, 1e-11)


def test_mismatched_modules():
    a = HilbertModule(FdAlgebra((1,)), (1,))
    b = HilbertModule(FdAlgebra((1,)), (2,))
    with pytest.raises(StructureError):
        inner(a.zero(), b.zero())
    with pytest.raises(StructureError):
        theta(a.zero(), b.zero())
    with pytest.raises(StructureError):
        HilbertModule(FdAlgebra((1, 1)), (1,))


def test_zero_fibers_absorb(rng):
    mod = HilbertModule(FdAlgebra((2, 1)), (0, 2))
    xi = mod.random_element(rng)
    assert xi.data[0].shape == (0, 2)
    assert np.all(inner(xi, xi).data[0] == 0)


def test_is_full_examples():
    assert is_full(HilbertModule(FdAlgebra((1, 2)), (1, 3))) == (True, FdAlgebra((1, 2)).whole())
    full, span = is_full(HilbertModule(FdAlgebra((1, 1)), (1, 0)))
    assert not full and span.sorted() == [0]


def test_is_full_span_rank_oracle(rng):
    for _ in range(30):
        mod = random_module(rng)
        # rank of the span of random inner products, block by block
        samples = [inner(mod.random_element(rng), mod.random_element(rng)) for _ in range(12)]
        spanned = set()
        for j, n in enumerate(mod.algebra.blocks):
            mat = np.array([s.data[j].ravel() for s in samples])
            if np.linalg.matrix_rank(mat, tol=1e-9) == n * n:
                spanned.add(j)
        full, witness = is_full(mod)
        assert set(witness.members) == spanned
        assert full == (len(spanned) == mod.algebra.m)


def test_compact_operators_span(rng):
    mod = HilbertModule(FdAlgebra((2, 1)), (2, 3))
    total = sum(k * k for k in mod.fibers)
    ops = [theta(mod.random_element(rng), mod.random_element(rng)) for _ in range(sum(mod.fibers) ** 2)]
    mat = np.array([np.concatenate([b.ravel() for b in op.data]) for op in ops])
    assert np.linalg.matrix_rank(mat) == total


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cauchy_schwarz(seed):
    rng = np.random.default_rng(seed)
    mod = random_module(rng)
    xi, eta = mod.random_element(rng), mod.random_element(rng)
    assert op_norm(inner(xi, eta)) <= module_norm(xi) * module_norm(eta) + 1e-10
