import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, given, settings, strategies as st

from qsid.cli import main
from qsid.partitions import CountTable, count_B

GOLDEN = Path(__file__).parent / "golden" / "l5_counts.csv"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args])

    return invoke


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


# -- verify ----------------------------------------------------------------------


def test_verify_pass(run):
    res = run("verify", "--identity", "thm11", "--l", 5, "--order", 300)
    assert res.exit_code == 0
    assert res.stdout.startswith("PASS thm11(l=5) order=300/1")


def test_verify_domain_error(run):
    res = run("verify", "--identity", "thm11", "--l", 4)
    assert res.exit_code == 2
    assert "thm11 requires odd l >= 3" in res.output


def test_verify_unknown_identity_lists_names(run):
    res = run("verify", "--identity", "bogus")
    assert res.exit_code == 2
    for name in ("schur", "thm11", "gauss", "master"):
        assert name in res.output


def test_verify_json(run):
    res = run("verify", "--identity", "gauss", "--order", 1000, "--format", "json")
    assert res.exit_code == 0
    report = json.loads(res.stdout)
    assert report["schema"] == 1
    assert report["status"] == "pass" and report["mismatch"] is None
    assert report["order"] == "1000/1"
    assert "elapsed_ms" in report


def test_verify_failing_reading_exits_one(run):
    res = run("verify", "--identity", "chain_sum_odd", "--l", 3, "--order", 60,
              "--reading", "plus", "--format", "json", "--no-timing")
    assert res.exit_code == 1
    report = json.loads(res.stdout)
    assert report["status"] == "fail"
    assert set(report["mismatch"]) == {"exponent", "lhs", "rhs"}


def test_verify_extra_params_and_fractional_order(run):
    assert run("verify", "--identity", "kappa_product", "--l", 5, "--r", 3, "--order", 100).exit_code == 0
    assert run("verify", "--identity", "kappa_shift", "--l", 5, "--u", 2).exit_code == 0
    res = run("verify", "--identity", "thm13a", "--l", 2, "--order", "41/2", "--no-timing")
    assert res.exit_code == 0 and "order=41/2" in res.stdout
    assert run("verify", "--identity", "schur", "--order", "1/0").exit_code == 2
    assert run("verify", "--identity", "schur", "--order", -3).exit_code == 2


def test_no_timing_output_is_deterministic(run):
    args = ("verify", "--identity", "master", "--l", 3, "--order", 100, "--no-timing")
    a, b = run(*args), run(*args)
    assert a.stdout == b.stdout
    assert "ms" not in a.stdout


def test_env_override(run, monkeypatch):
    monkeypatch.setenv("QSID_DEFAULT_ORDER", "50")
    res = run("verify", "--identity", "schur", "--no-timing")
    assert res.stdout.strip() == "PASS schur order=50/1"


def test_output_file(run, tmp_path):
    out = tmp_path / "r.json"
    res = run("verify", "--identity", "schur", "--order", 30, "--format", "json", "-o", out)
    assert res.exit_code == 0 and res.stdout == ""
    assert json.loads(out.read_text())["status"] == "pass"


# -- expand ------------------------------------------------------------------------


def test_expand_partition_numbers(run, tmp_path):
    spec = write_json(tmp_path / "p.json", {
        "kind": "product",
        "families": [{"modulus": 1, "residues": [0], "exp_scale": 1, "power": -1}],
    })
    res = run("expand", "--spec", spec, "--order", 6)
    assert res.exit_code == 0
    assert [int(line.split(", ")[1]) for line in res.stdout.splitlines()] == [1, 1, 2, 3, 5, 7]


def test_expand_empty_product(run, tmp_path):
    spec = write_json(tmp_path / "e.json", {"kind": "product", "families": []})
    res = run("expand", "--spec", spec, "--order", 5)
    assert res.stdout == "0/1, 1\n"


def test_expand_theta_formats(run, tmp_path):
    spec = write_json(tmp_path / "g.json", {"kind": "theta", "quad": 2, "lin": -1})
    res = run("expand", "--spec", spec, "--order", 7)
    assert [l.split(", ")[0] for l in res.stdout.splitlines()] == ["0/1", "1/1", "3/1", "6/1"]
    res = run("expand", "--spec", spec, "--order", 7, "--format", "csv")
    assert res.stdout.splitlines()[0] == "exponent,coefficient"
    res = run("expand", "--spec", spec, "--order", "7/2", "--format", "json")
    data = json.loads(res.stdout)
    assert data["order"] == "7/2" and data["terms"] == [["0/1", "1"], ["1/1", "1"], ["3/1", "1"]]


def test_expand_half_integer_exponents(run, tmp_path):
    spec = write_json(tmp_path / "h.json", {
        "kind": "product", "prefactor_exp": [-1, 8],
        "families": [{"modulus": 1, "residues": [0], "exp_scale": 1,
                      "exp_offset": [-1, 2], "sign": 1}],
    })
    res = run("expand", "--spec", spec, "--order", 2)
    assert res.stdout.splitlines()[:2] == ["-1/8, 1", "3/8, 1"]


def test_expand_parse_error_reports_position(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "theta",\n  "quad": }')
    res = run("expand", "--spec", bad, "--order", 5)
    assert res.exit_code == 2
    assert "line 2, column" in res.output


def test_expand_invalid_spec_and_divergence(run, tmp_path):
    spec = write_json(tmp_path / "x.json", {"families": [{"modulus": 0}]})
    assert run("expand", "--spec", spec, "--order", 5).exit_code == 2
    spec = write_json(tmp_path / "d.json", {"families": [
        {"modulus": 1, "residues": [0], "exp_scale": 1, "exp_offset": -2}]})
    res = run("expand", "--spec", spec, "--order", 5)
    assert res.exit_code == 1
    assert "divergent" in res.output
    assert run("expand", "--spec", tmp_path / "missing.json", "--order", 5).exit_code == 2


# -- table / count -------------------------------------------------------------------


def test_table_matches_golden(run):
    res = run("table", "--l", 5, "--nmax", 15, "--format", "csv")
    assert res.exit_code == 0
    assert res.stdout == GOLDEN.read_text()
    assert "13,12,3,6,3" in res.stdout.splitlines()


def test_table_text_and_json(run):
    res = run("table", "--l", 5, "--nmax", 3)
    assert res.stdout.splitlines()[0].split() == ["n", "A_5", "B_5_0", "B_5_1", "B_5_2"]
    data = json.loads(run("table", "--l", 3, "--nmax", 4, "--format", "json").stdout)
    assert data["columns"] == ["n", "A_3", "B_3_0", "B_3_1"]
    assert len(data["rows"]) == 4


def test_table_rejects_even_l(run):
    assert run("table", "--l", 4, "--nmax", 10).exit_code == 2


def test_count_csv_round_trip(run):
    res = run("count", "--l", 7, "--s", 2, "--nmax", 80, "--format", "csv")
    assert res.exit_code == 0
    assert CountTable.from_csv(res.stdout, 7, 2) == count_B(7, 2, 80)
    a = run("count", "--l", 5, "--nmax", 15, "--format", "json")
    assert json.loads(a.stdout)["counts"][15] == "16"
    assert run("count", "--l", 5, "--s", 3, "--nmax", 5).exit_code == 2


# -- suite -------------------------------------------------------------------------


def test_suite_default_passes(run):
    res = run("suite", "--no-timing")
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert lines[-1].endswith("passed, 0 failed")


def test_suite_unknown_name_exits_before_running(run, tmp_path):
    cfg = write_json(tmp_path / "c.json", [{"name": "schur"}, {"name": "nope"}])
    res = run("suite", "--config", cfg)
    assert res.exit_code == 2
    assert "PASS" not in res.output


def test_suite_fault_injection(run, tmp_path):
    cfg = write_json(tmp_path / "c.json", [
        {"name": "schur", "order": 60},
        {"name": "thm11", "params": {"l": 5}, "order": 60, "perturb": {"exponent": 20, "coeff": 3}},
    ])
    res = run("suite", "--config", cfg, "--format", "json", "--no-timing")
    assert res.exit_code == 1
    data = json.loads(res.stdout)
    assert (data["passed"], data["failed"]) == (1, 1)
    assert data["reports"][1]["mismatch"]["exponent"] == "20/1"


def test_suite_empty_config(run, tmp_path):
    cfg = write_json(tmp_path / "c.json", [])
    res = run("suite", "--config", cfg)
    assert res.exit_code == 0
    assert res.stdout.strip() == "0 passed, 0 failed"


def test_suite_is_deterministic_with_jobs(run, tmp_path):
    cfg = write_json(tmp_path / "c.json", [
        {"name": "thm11", "params": {"l": l}, "order": 80} for l in (3, 5, 7)
    ])
    a = run("suite", "--config", cfg, "--no-timing")
    b = run("suite", "--config", cfg, "--no-timing", "--jobs", 2)
    assert a.stdout == b.stdout


# -- exit-code contract over malformed input ---------------------------------------------

junk = st.recursive(
    st.none() | st.booleans() | st.integers(-5, 5) | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(
        st.sampled_from(["name", "params", "order", "kind", "quad", "families", "l"]),
        inner, max_size=3),
    max_leaves=8,
)


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(junk)
def test_malformed_suite_configs_exit_two_or_run(tmp_path, obj):
    path = write_json(tmp_path / "junk.json", obj)
    res = CliRunner().invoke(main, ["suite", "--config", path, "--no-timing"])
    assert res.exit_code in (0, 1, 2)
    assert res.exception is None or isinstance(res.exception, SystemExit)


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(junk)
def test_malformed_specs_never_crash(tmp_path, obj):
    path = write_json(tmp_path / "junk.json", obj)
    res = CliRunner().invoke(main, ["expand", "--spec", path, "--order", "5"])
    assert res.exit_code in (0, 1, 2)
    assert res.exception is None or isinstance(res.exception, SystemExit)


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=8))
def test_malformed_order_strings(text):
    res = CliRunner().invoke(main, ["verify", "--identity", "schur", "--order", text])
    assert res.exit_code in (0, 1, 2)
    assert res.exception is None or isinstance(res.exception, SystemExit)


def test_order_cap(run, tmp_path):
    assert run("verify", "--identity", "schur", "--order", 10**9).exit_code == 2
    spec = write_json(tmp_path / "e.json", {"kind": "product"})
    assert run("expand", "--spec", spec, "--order", 10**9).exit_code == 2
    assert run("count", "--l", 5, "--nmax", 10**9).exit_code == 2


def test_zero_denominator_in_spec(run, tmp_path):
    spec = write_json(tmp_path / "z.json", {"quad": "0/0"})
    assert run("expand", "--spec", spec, "--order", 5).exit_code == 2
    spec = write_json(tmp_path / "z2.json", {"quad": [1, 0]})
    assert run("expand", "--spec", spec, "--order", 5).exit_code == 2
