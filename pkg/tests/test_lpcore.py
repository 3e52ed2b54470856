import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpcrossed.lpcore import (LpVector, OperatorMatrix, WeightedSpace, disjoint_union, p_norm,
                              renormalize_weights, tensor_operator, tensor_space, unweighted_form)
from lpcrossed.opnorm import opnorm_exact

ps = st.sampled_from([1, 1.5, 2, 3, 7.5])


@given(w=st.floats(0.01, 100), p=ps)
def test_single_atom_norm(w, p):
    X = WeightedSpace(("x",), [w])
    assert p_norm(LpVector(X, [1.0]), p) == pytest.approx(w ** (1 / p), rel=1e-12)


@given(d=st.integers(1, 12), p=ps)
def test_normalized_constant_has_norm_one(d, p):
    X = WeightedSpace.normalized(d)
    assert p_norm(LpVector(X, np.ones(d)), p) == pytest.approx(1.0, rel=1e-12)


def test_euclidean():
    assert p_norm(LpVector(WeightedSpace.counting(2), [3, 4]), 2) == pytest.approx(5.0)


def test_p_below_one_rejected():
    with pytest.raises(ValueError):
        p_norm(LpVector(WeightedSpace.counting(1), [1]), 0.5)


def test_bad_weights_rejected():
    with pytest.raises(ValueError):
        WeightedSpace((0, 1), [1.0, 0.0])
    with pytest.raises(ValueError):
        WeightedSpace((0, 0), [1.0, 1.0])


def test_tensor_space_unit_and_product():
    Y = WeightedSpace((0, 1, 2), [0.5, 1.0, 2.0])
    one = WeightedSpace(("*",), [1.0])
    assert np.allclose(tensor_space(one, Y).weights, Y.weights)
    L = WeightedSpace.normalized(2)
    assert np.allclose(tensor_space(L, L).weights, 0.25)
    d = 3
    assert np.allclose(tensor_space(WeightedSpace.counting(2), WeightedSpace.normalized(d)).weights, 1 / d)
    assert tensor_space(WeightedSpace.counting(2), WeightedSpace.normalized(d)).dim == 2 * d


def test_tensor_matrix_units():
    X = WeightedSpace.normalized(2)
    e01, e10 = OperatorMatrix.matrix_unit(X, 0, 1), OperatorMatrix.matrix_unit(X, 1, 0)
    T = tensor_operator(e01, e10)
    S = T.domain
    nz = np.argwhere(np.abs(T.entries) > 0)
    assert len(nz) == 1
    r, c = nz[0]
    assert S.atoms[r] == (0, 1) and S.atoms[c] == (1, 0)
    I = OperatorMatrix.identity(X)
    assert np.array_equal(tensor_operator(I, I).entries, np.eye(4))


def test_tensor_mixed_product(rng):
    X = WeightedSpace.counting(2)
    a = OperatorMatrix(X, X, rng.normal(size=(2, 2)))
    b = OperatorMatrix(X, X, rng.normal(size=(2, 2)))
    I = OperatorMatrix.identity(X)
    lhs = tensor_operator(a, I) @ tensor_operator(I, b)
    assert np.abs((lhs - tensor_operator(a, b)).entries).max() <= 1e-14


def test_disjoint_union():
    X = WeightedSpace.counting(3)
    U = disjoint_union([X])
    assert U.space == X
    U2 = disjoint_union([WeightedSpace(("a",), [1.0]), WeightedSpace(("b",), [2.0])])
    assert list(U2.space.weights) == [1.0, 2.0]
    v = LpVector(U2.parts[1], [3.0])
    assert np.allclose(U2.extract(1, U2.embed(1, v)).coords, v.coords)
    with pytest.raises(ValueError):
        disjoint_union([])


@given(p=ps, c=st.floats(0.1, 10))
def test_renormalize_preserves_vector_norms(p, c):
    X = WeightedSpace((0, 1, 2), [0.3, 1.0, 2.5])
    R = renormalize_weights(X, c, p)
    v = LpVector(X, [1.0, -2.0, 0.5j])
    assert p_norm(R.forward @ v, p) == pytest.approx(p_norm(v, p), rel=1e-12)


def test_renormalize_identity_and_units():
    X = WeightedSpace.normalized(3)
    R = renormalize_weights(X, 1.0, 2.5)
    assert np.allclose(R.forward.entries, np.eye(3))
    R = renormalize_weights(X, 3.0, 1.5)
    assert np.allclose(R.space.weights, 1.0)
    e = OperatorMatrix.matrix_unit(X, 0, 2)
    assert np.allclose(R.conjugate(e).entries, e.entries)


def test_unweighted_form_preserves_norm_p1():
    X = WeightedSpace((0, 1), [1.0, 4.0])
    A = OperatorMatrix(X, X, [[1, 2], [3, 4]])
    B = unweighted_form(A, 1)
    assert opnorm_exact(A, 1) == pytest.approx(np.abs(B).sum(axis=0).max())
