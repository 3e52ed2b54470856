import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpcrossed.ledger import opnorm_upper
from lpcrossed.lpcore import OperatorMatrix, WeightedSpace, tensor_operator
from lpcrossed.opnorm import opnorm, opnorm_exact, opnorm_oracle, opnorm_power, witness_ratio


def op(rows, X=None):
    rows = np.asarray(rows, dtype=complex)
    X = WeightedSpace.counting(rows.shape[0]) if X is None else X
    return OperatorMatrix(X, X, rows)


def test_exact_examples():
    assert opnorm_exact(op(np.eye(4)), 1) == 1.0
    for n in (2, 5, 9):
        a = np.zeros((n, n))
        a[0, :] = 1.0
        assert opnorm_exact(op(a), 1) == pytest.approx(1.0, abs=1e-15)
    assert opnorm_exact(op([[1, 1], [0, 0]]), 2) == pytest.approx(np.sqrt(2), rel=1e-14)


def test_exact_rejects_other_p():
    with pytest.raises(ValueError):
        opnorm_exact(op(np.eye(2)), 3)


@pytest.mark.parametrize("p", [1.2, 1.5, 3, 6])
def test_diagonal(p):
    est = opnorm(op(np.diag([2.0, 1.0])), p)
    assert est.value == pytest.approx(2.0, rel=1e-12)
    w = est.witness.coords
    assert abs(w[1]) <= 1e-8 * abs(w[0])


def test_rank_one_p3():
    # maximize |x1 + x2| on the unit 3-sphere: x1 = x2 = 2^{-1/3}
    A = op([[1, 1], [0, 0]])
    expected = 2 ** (2 / 3)
    assert opnorm(A, 3).value == pytest.approx(expected, abs=1e-8)
    assert opnorm_oracle(A, 3) == pytest.approx(expected, abs=1e-8)


def test_oracle_examples():
    for p in (1.5, 3):
        assert opnorm_oracle(op(np.eye(3)), p) == pytest.approx(1.0, abs=1e-9)
    H = op(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert opnorm_oracle(H, 1) == pytest.approx(np.sqrt(2), abs=1e-9)
    X = WeightedSpace.normalized(3)
    for p in (1.5, 2, 4):
        for j, k in ((0, 0), (0, 2), (2, 1)):
            assert opnorm_oracle(OperatorMatrix.matrix_unit(X, j, k), p) == pytest.approx(1.0, abs=1e-9)


matrices = st.integers(0, 2 ** 32 - 1).map(
    lambda s: np.random.default_rng(s).normal(size=(3, 3)) + 1j * np.random.default_rng(s + 1).normal(size=(3, 3)))


@given(a=matrices, p=st.sampled_from([1.25, 1.5, 3, 5]))
def test_witness_certifies_and_riesz_thorin(a, p):
    A = op(a)
    est = opnorm(A, p)
    assert est.certified_lower_bound
    assert witness_ratio(A, est.witness, p) == pytest.approx(est.value, rel=1e-12)
    assert est.value <= opnorm_upper(A, p) * (1 + 1e-12)
    # |a_ij| = |(A e_j)_i| <= ||A||
    assert est.value >= np.abs(a).max() * (1 - 1e-12)


@given(a=matrices, p=st.sampled_from([1.5, 3]))
def test_power_matches_oracle(a, p):
    A = op(a)
    assert opnorm_power(A, p).value == pytest.approx(opnorm_oracle(A, p), abs=1e-6)


@given(a=matrices)
def test_weighted_equals_unweighted_similarity(a):
    X = WeightedSpace((0, 1, 2), [0.2, 1.0, 3.0])
    A = OperatorMatrix(X, X, a)
    D = X.weights ** (1 / 1.5)
    B = op(D[:, None] * a / D[None, :])
    assert opnorm(A, 1.5).value == pytest.approx(opnorm(B, 1.5).value, rel=1e-9)


def test_tensor_multiplicative(rng):
    X = WeightedSpace.counting(2)
    a = OperatorMatrix(X, X, rng.normal(size=(2, 2)))
    b = OperatorMatrix(X, X, rng.normal(size=(2, 2)))
    for p in (1, 2):
        assert opnorm(tensor_operator(a, b), p).value == pytest.approx(
            opnorm(a, p).value * opnorm(b, p).value, rel=1e-12)


def test_one_sided_finite_sections_decrease(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    for p in (1, 2):
        vals = [opnorm(op(a - np.diag([1.0] * t + [0.0] * (6 - t)) @ a), p).value for t in range(1, 7)]
        assert all(y <= x + 1e-12 for x, y in zip(vals, vals[1:]))
        assert vals[-1] == 0.0


def test_two_sided_finite_sections_not_monotone():
    # ||a - e_T a e_T|| can increase along nested T even for p = 2; we keep a
    # seeded witness of that so the weaker one-sided statement stays justified
    rng = np.random.default_rng(1)
    found = False
    for _ in range(20):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        vals = []
        for t in range(1, 7):
            P = np.diag([1.0] * t + [0.0] * (6 - t))
            vals.append(opnorm(op(a - P @ a @ P), 2).value)
        if any(y > x * (1 + 1e-9) for x, y in zip(vals, vals[1:])):
            found = True
            break
    assert found
    assert vals[-1] <= 1e-12


def test_l1_rank_one_obstruction():
    n = 5
    a = np.zeros((n, n))
    a[0, :] = 1.0
    for t in range(n):
        P = np.diag([1.0] * t + [0.0] * (n - t))
        assert opnorm_exact(op(a - a @ P), 1) >= 1 - 1e-12 or t == n


def test_zero_matrix():
    assert opnorm(op(np.zeros((3, 3))), 3).value == 0.0


def test_to_json_shape():
    out = opnorm(op([[1, 2], [3, 4]]), 1.5).to_json()
    assert set(out) == {"value", "witness", "certified_lower_bound", "converged"}
    assert out["certified_lower_bound"] is True
