import pytest

from lpcrossed import ledger

CHECKS = sorted(ledger.REGISTRY, key=lambda t: (t[0], t[1]))


@pytest.mark.parametrize("module,name,fn", CHECKS, ids=[f"{m}/{n}" for m, n, _ in CHECKS])
def test_quick_check(module, name, fn):
    res = ledger.run_check(module, name, fn, quick=True)
    assert res.passed, res.detail


def test_every_module_has_checks():
    mods = {m for m, _, _ in ledger.REGISTRY}
    assert mods == {"lpcore", "opnorm", "spatial", "crossed", "freeaction", "leavitt", "stabilized", "ktheory"}


def test_failure_is_reported():
    def bad(rng, quick):
        ledger._require(False, "boom", value=1.5)

    res = ledger.run_check("demo", "bad", bad)
    assert not res.passed
    assert res.detail == {"message": "boom", "counterexample": {"value": 1.5}}


def test_derived_seeds_differ():
    a = ledger.derived_rng(1, "m", "x").integers(1 << 30)
    b = ledger.derived_rng(1, "m", "y").integers(1 << 30)
    assert a != b
    assert a == ledger.derived_rng(1, "m", "x").integers(1 << 30)
