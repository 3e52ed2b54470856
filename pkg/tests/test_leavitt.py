import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpcrossed import leavitt as lv
from lpcrossed.leavitt import LeavittElement as L

seeds = st.integers(0, 2 ** 32 - 1)
ds = st.sampled_from([2, 3])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_relations(d):
    one = L.one(d)
    for j in range(d):
        for k in range(d):
            assert L.t(d, j) * L.s(d, k) == (one if j == k else L.zero(d))
    total = L.zero(d)
    for j in range(d):
        total = total + L.s(d, j) * L.t(d, j)
    assert total == one


def test_normal_form_examples():
    d = 2
    assert L.s(2, 1) * L.t(2, 1) == L.one(d) - L.s(d, 0) * L.t(d, 0)
    assert (L.monomial(d, (0,), (1,)) * L.monomial(d, (1,), (0,))) == L.monomial(d, (0,), (0,))


@given(d=ds, seed=seeds)
def test_associative(d, seed):
    r = np.random.default_rng(seed)
    a, b, c = (lv.random_element(d, r) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(d=ds, seed=seeds)
def test_normal_form_has_no_reducible_terms(d, seed):
    x = lv.random_element(d, np.random.default_rng(seed), n_terms=6, max_len=3)
    for (mu, nu) in x.terms:
        assert not (mu and nu and mu[-1] == d - 1 and nu[-1] == d - 1)


@pytest.mark.parametrize("d", [2, 3])
def test_omega_multiplicative(d):
    units = [np.outer(np.eye(d, dtype=int)[j], np.eye(d, dtype=int)[k]) for j in range(d) for k in range(d)]
    for a, b in itertools.product(units, repeat=2):
        assert lv.omega(a) * lv.omega(b) == lv.omega(a @ b)
    assert lv.omega(np.eye(d, dtype=int)) == L.one(d)


def test_letters_out_of_range():
    with pytest.raises(ValueError):
        L.s(2, 2)
    with pytest.raises(ValueError):
        L.one(1)


def test_json_roundtrip():
    x = lv.random_element(3, np.random.default_rng(0))
    assert L.from_json(3, x.to_json()) == x
    with pytest.raises(ValueError):
        L.from_json(2, [{"mu": [0]}])


def test_representation_examples():
    R = lv.base_d_representation(L.one(2), 8)
    assert np.array_equal(R.entries, np.eye(8))
    P = lv.base_d_representation(L.s(2, 0) * L.t(2, 0), 4).entries
    assert np.array_equal(P, np.diag([1, 0, 1, 0]))
    S = L.s(2, 0) * L.t(2, 0) + L.s(2, 1) * L.t(2, 1)
    assert np.array_equal(lv.base_d_representation(S, 4).entries, np.eye(4))


@given(d=ds, seed=seeds)
def test_identity_permutation_is_base(d, seed):
    x = lv.random_element(d, np.random.default_rng(seed))
    a = lv.alt_representation(x, 27, 2, list(range(d))).entries
    assert np.array_equal(a, lv.base_d_representation(x, 27).entries)


@given(d=ds, seed=seeds)
def test_representation_multiplicative_on_safe_window(d, seed):
    # words of length <= 2 cannot push indices below M / d^2 out of a window of size M
    r = np.random.default_rng(seed)
    a, b = lv.random_element(d, r, max_len=1), lv.random_element(d, r, max_len=1)
    M = d ** 5
    safe = M // d ** 3
    lhs = lv.base_d_representation(a * b, M).entries[:, :safe]
    rhs = (lv.base_d_representation(a, M).entries @ lv.base_d_representation(b, M).entries)[:, :safe]
    assert np.abs(lhs - rhs).max() <= 1e-10


@pytest.mark.parametrize("p", [1, 1.5, 2, 3])
def test_isometry_norm(p):
    rep = lv.norm_estimate(L.s(2, 0), p, [8, 16, 32])
    assert all(v == pytest.approx(1.0, abs=1e-9) for v in rep.lower_bounds)


def test_disjoint_ranges_p2():
    rep = lv.norm_estimate(L.s(2, 0) + L.s(2, 1), 2, [4, 8, 16, 32])
    assert all(v == pytest.approx(np.sqrt(2), abs=1e-9) for v in rep.lower_bounds)
    assert rep.upper_bound == pytest.approx(2.0)


def test_norm_bounds_monotone_and_below_l1():
    x = L.s(3, 0) - L.t(3, 1) * 0.5 + L.monomial(3, (1, 2), (0,), 1j)
    for p in (1.5, 3):
        rep = lv.norm_estimate(x, p, [9, 27, 81])
        lb = rep.lower_bounds
        assert all(u <= v + 1e-12 for u, v in zip(lb, lb[1:]))
        assert lb[-1] <= rep.upper_bound + 1e-9


def test_p1_window_bounds_agree_across_permutations():
    x = L.s(2, 0) + L.t(2, 1) * 2 - L.monomial(2, (1,), (0, 1))
    a = lv.norm_estimate(x, 1, [8, 16, 32, 64]).lower_bounds
    b = lv.norm_estimate(x, 1, [8, 16, 32, 64], perm=[1, 0]).lower_bounds
    assert a == pytest.approx(b, abs=1e-12)
