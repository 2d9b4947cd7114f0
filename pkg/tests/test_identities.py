from fractions import Fraction

import pytest

from qsid import identities as ids
from qsid import products as P
from qsid.identities import IdentityError, master_check, run_suite, verify
from qsid.partitions import count_B
from qsid.qseries import QSeries, equal_up_to


def test_registry_examples():
    assert verify("schur", {}, 500).passed
    assert verify("thm11", {"l": 3}, 300).passed
    assert verify("gauss", {}, 1000).passed


def test_report_fields():
    rep = verify("thm11", {"l": 5}, 100)
    assert rep.name == "thm11" and rep.params == {"l": 5}
    assert rep.order == 100 and rep.status == "pass"
    assert rep.elapsed_ms >= 0
    d = rep.to_dict(timing=False)
    assert d["schema"] == 1 and "elapsed_ms" not in d


@pytest.mark.parametrize("name,params,message", [
    ("thm11", {"l": 4}, "odd l"),
    ("thm13a", {"l": 3}, "even l"),
    ("kappa_product", {"l": 3, "r": 3}, "0 < r < l"),
    ("thm11", {}, "requires parameter"),
    ("gauss", {"l": 2}, "does not take"),
    ("master", {"l": 9}, "2 <= l <= 8"),
    ("vacuum_basis", {"l": 3, "s": 4}, "0 <= s <= l"),
    ("nope", {}, "known identities"),
])
def test_domain_errors(name, params, message):
    with pytest.raises(IdentityError, match=message):
        verify(name, params, 10)


def test_order_guards():
    with pytest.raises(IdentityError, match="positive"):
        verify("schur", {}, 0)
    with pytest.raises(IdentityError, match="guard"):
        verify("vacuum_basis", {"l": 3, "s": 0}, 400)
    with pytest.raises(IdentityError, match="reading"):
        verify("kappa_ll", {"l": 3}, 10, reading="nonsense")


def test_fractional_order():
    rep = verify("thm13a", {"l": 2}, Fraction(41, 2))
    assert rep.passed and rep.order == Fraction(41, 2)


def test_default_order_and_env_override(monkeypatch):
    assert ids.default_order("schur", {}) == 500
    assert ids.default_order("vacuum_basis", {"l": 3}) == 183
    monkeypatch.setenv(ids.ORDER_ENV, "40")
    assert ids.default_order("schur", {}) == 40
    assert verify("schur").order == 40
    monkeypatch.setenv(ids.ORDER_ENV, "abc")
    with pytest.raises(IdentityError):
        ids.default_order("schur", {})


def test_swap_only_relabels_mismatch():
    a = verify("schur", {}, 80, perturb=(30, 5))
    b = verify("schur", {}, 80, perturb=(30, 5), swap=True)
    assert not a.passed and not b.passed
    assert a.mismatch.exponent == b.mismatch.exponent == 30
    assert (a.mismatch.lhs, a.mismatch.rhs) == (b.mismatch.rhs, b.mismatch.lhs)


@pytest.mark.parametrize("l", [3, 5, 7, 9])
def test_thm11_summands_are_b_generating_functions(l):
    n = 150
    total = None
    for s in range((l - 1) // 2 + 1):
        b = count_B(l, s, n - 1)
        g = QSeries.from_terms(enumerate(b.counts), n, 1)
        total = g if total is None else total + g
    assert equal_up_to(total, P.thm11_rhs(l, n), n).passed


@pytest.mark.parametrize("l,u", [(2, 1), (5, 2), (7, 6), (12, 5)])
def test_kappa_shift(l, u):
    assert verify("kappa_shift", {"l": l, "u": u}, 300).passed


# -- readings of formulas that fail as printed -----------------------------------


@pytest.mark.parametrize("l", [2, 3, 4])
def test_kappa_l_l_needs_variable_q_to_the_l(l):
    assert ids.readings_that_verify("kappa_ll", {"l": l}, 200) == ["q^l"]


def test_printed_even_closed_form_fails():
    rep = verify("chain_theta_even", {"l": 2}, 60, reading=P.EQ84_PRINTED)
    assert not rep.passed
    assert ids.readings_that_verify("chain_theta_even", {"l": 4}, 120) == ["plus"]


def test_printed_sum_prefactor_fails():
    rep = verify("chain_sum_odd", {"l": 3}, 60, reading=P.EQ86_PRINTED)
    assert not rep.passed
    for name, l in [("chain_sum_even", 2), ("chain_sum_odd", 5)]:
        assert ids.readings_that_verify(name, {"l": l}, 120) == ["minus"]


@pytest.mark.parametrize("l", [2, 4, 6])
def test_thm13_unique_reading(l):
    ok = ids.readings_that_verify("thm13a", {"l": l}, 150)
    assert ok == [P.THM13_DEFAULT]


def test_printed_basis_conditions_fail_for_even_l():
    rep = verify("vacuum_basis", {"l": 4, "s": 0}, 120, reading="as-printed")
    assert not rep.passed
    assert verify("vacuum_basis", {"l": 4, "s": 0}, 120).passed


# -- chain check --------------------------------------------------------------


@pytest.mark.parametrize("l", range(2, 9))
def test_master_check(l):
    rep = master_check(l, 120)
    assert rep.passed, rep.summary()
    assert rep.name == "master"


def test_master_check_domain():
    with pytest.raises(IdentityError):
        master_check(1, 10)


# -- suites --------------------------------------------------------------------


def test_empty_suite():
    assert run_suite([]) == []


def test_malformed_suite_rejected_before_running(monkeypatch):
    calls = []
    monkeypatch.setattr(ids, "verify", lambda *a, **k: calls.append(a))
    for config in (
        {"nope": 1},
        [{"name": "schur"}, {"name": "thm11", "params": {"l": 4}}],
        [{"name": "schur", "extra": 1}],
        [{"name": "schur", "order": "x"}],
        [{"name": "schur", "perturb": {"exponent": 3}}],
        ["schur"],
    ):
        with pytest.raises(IdentityError):
            run_suite(config)
    assert calls == []


def test_fault_injection():
    config = [
        {"name": "schur", "order": 100},
        {"name": "gauss", "order": 100, "perturb": {"exponent": 10, "coeff": -1}},
        {"name": "thm11", "params": {"l": 5}, "order": 100},
    ]
    reports = run_suite(config)
    assert [r.status for r in reports] == ["pass", "fail", "pass"]
    m = reports[1].mismatch
    # q^10 is a Gauss exponent (n = -2), so the right side drops to 0 there
    assert m.exponent == 10 and m.lhs == 1 and m.rhs == 0


def test_parallel_suite_keeps_order():
    config = [{"name": "thm11", "params": {"l": l}, "order": 120} for l in (9, 3, 7, 5)]
    serial = [r.to_dict(timing=False) for r in run_suite(config)]
    parallel = [r.to_dict(timing=False) for r in run_suite(config, jobs=3)]
    assert serial == parallel
    assert [d["params"]["l"] for d in serial] == [9, 3, 7, 5]


def test_default_suite_passes():
    reports = run_suite()
    assert len(reports) == len(ids.defaults()["suite"])
    failed = [r.summary() for r in reports if not r.passed]
    assert not failed
