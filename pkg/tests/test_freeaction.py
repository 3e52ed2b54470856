import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpcrossed import crossed as cr
from lpcrossed import freeaction as fa
from lpcrossed.groups import FiniteGroup
from lpcrossed.ledger import free_test_groups

GROUPS = free_test_groups()
seeds = st.integers(0, 2 ** 32 - 1)


def regular(name):
    X = fa.GSpace.regular(GROUPS[name])
    return X, X.diagonal_action()


def rand_diag(act, rng, support=None):
    return cr.random_element(act, rng, support=support, diagonal=True)


def test_trivial_group_family():
    X = fa.GSpace.regular(FiniteGroup.cyclic(1))
    fam = fa.synth_vanishing_family(X, forbidden=[])
    assert fam.size == 1 and np.array_equal(fam.functions, [[1]])


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_family_vanishes_exhaustively(name):
    X, _ = regular(name)
    fam = fa.synth_vanishing_family(X)
    assert fam.size == X.group.order
    for g in range(X.group.order):
        c = np.abs(fa.correlation(fam.functions, X, g))
        if g == X.group.identity:
            assert np.allclose(c, 1)
        else:
            assert c.max() <= 1e-10


def test_identity_not_forbidden():
    X, _ = regular("Z3")
    with pytest.raises(ValueError):
        fa.synth_vanishing_family(X, forbidden=[X.group.identity])


def test_non_free_action_rejected():
    G = FiniteGroup.cyclic(2)
    X = fa.GSpace(G, (0, 1, 2), np.array([[0, 1, 2], [1, 0, 2]]))
    assert not X.is_free()
    with pytest.raises(ValueError):
        fa.synth_vanishing_family(X)


def test_pair_family_z2():
    X, _ = regular("Z2")
    fam = fa.pair_family(X, 1, 0)
    assert np.array_equal(fam.functions[1], [1, -1])
    assert fa.correlation(fam.functions, X, 1)[0] == 0
    assert fam.verify()


def test_combined_pair_families_cover_all_loci():
    X, _ = regular("Z3")
    fams = [fa.pair_family(X, g, x) for g in (1, 2) for x in range(3)]
    big = fams[0]
    for f in fams[1:]:
        big = fa.combine_product(big, f)
    assert big.size == 2 ** 6
    for g in (1, 2):
        assert np.abs(fa.correlation(big.functions, X, g)).max() <= 1e-12


def test_averaging_fixes_diagonal_and_kills_off_identity(rng):
    X, act = regular("Z4")
    fam = fa.synth_vanishing_family(X)
    f = rng.normal(size=4)
    a = cr.single(act, np.diag(f))
    assert fa.averaging_operator(fam, a).allclose(a, 1e-12)
    for g in (1, 2, 3):
        P = fa.averaging_operator(fam, cr.single(act, np.diag(f), g))
        assert all(np.abs(P.coeff(h)).max() <= 1e-12 for h in range(4))


@given(name=st.sampled_from(sorted(GROUPS)), seed=seeds)
def test_averaging_is_expectation(name, seed):
    X, act = regular(name)
    fam = fa.synth_vanishing_family(X)
    a = rand_diag(act, np.random.default_rng(seed), support=range(X.group.order))
    P = fa.averaging_operator(fam, a)
    for g in range(X.group.order):
        want = cr.conditional_expectation(a) if g == X.group.identity else 0
        assert np.abs(P.coeff(g) - want).max() <= 1e-10


def test_averaging_rejects_foreign_element(rng):
    X, _ = regular("Z3")
    other = cr.IsometricAction.trivial(X.group, cr.WeightedSpace.counting(3))
    with pytest.raises(ValueError):
        fa.averaging_operator(fa.synth_vanishing_family(X), cr.unit(other))


def test_trace_examples(rng):
    X, act = regular("S3")
    mu = fa.InvariantMeasure.uniform(X)
    assert fa.trace_from_measure(mu, cr.unit(act)) == pytest.approx(1.0)
    b = cr.single(act, np.diag(rng.normal(size=6)), 3)
    assert fa.trace_from_measure(mu, b) == 0


@given(name=st.sampled_from(sorted(GROUPS)), seed=seeds)
def test_trace_is_tracial(name, seed):
    X, act = regular(name)
    r = np.random.default_rng(seed)
    mu = fa.InvariantMeasure.uniform(X)
    a, b = rand_diag(act, r), rand_diag(act, r)
    assert abs(fa.trace_from_measure(mu, a @ b) - fa.trace_from_measure(mu, b @ a)) <= 1e-10


def test_invariance_checks(rng):
    X, _ = regular("Z3")
    assert fa.check_invariance(X, np.full(3, 1 / 3))
    assert not fa.check_invariance(X, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        fa.InvariantMeasure(X, [1.0, 0.0, 0.0])
    mu = fa.InvariantMeasure.orbit_average(X, rng.dirichlet(np.ones(3)))
    assert fa.check_invariance(X, mu.prob)
    X1 = fa.GSpace.regular(FiniteGroup.cyclic(1))
    assert fa.check_invariance(X1, [1.0])
    with pytest.raises(ValueError):
        fa.check_invariance(X, [0.5, 0.2, 0.2])


def test_orbit_sum_is_invariant(rng):
    X, act = regular("Z2xZ2")
    f = np.diag(rng.normal(size=4))
    s = fa.orbit_sum(f, act)
    for g in range(4):
        assert np.allclose(act.alpha(g, s), s)
