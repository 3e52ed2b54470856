import io
import json
import subprocess
import sys

import pytest

from lpcrossed.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], out=buf)
    return code, json.loads(buf.getvalue()), buf.getvalue()


def test_ktheory_od():
    code, out, _ = call("ktheory", "od", "--d", 3)
    assert code == 0
    assert out["K0"] == {"order": 2, "generator": "[1]"} and out["K1"] == {"order": 1}


def test_verify_all_quick_counts():
    code, out, _ = call("verify-all", "--quick", "--module", "ktheory", "--module", "lpcore")
    assert code == 0
    assert set(out["modules"]) == {"ktheory", "lpcore"}
    assert all(c["failed"] == 0 and c["passed"] > 0 for c in out["modules"].values())
    names = [(c["module"], c["name"]) for c in out["checks"]]
    assert names == sorted(names)


def test_malformed_matrix(data_dir):
    code, out, _ = call("opnorm", "--matrix", data_dir / "bad.json", "--p", 2)
    assert code == 2
    assert out["error"].startswith("matrix.entries[1]")


@pytest.mark.parametrize("argv", [
    ["ktheory", "od", "--d", "3", "--bogus"],
    ["nosuch"],
    [],
    ["ktheory", "od"],
    ["ktheory", "od", "--d", "1"],
    ["verify-all", "--module", "nope"],
])
def test_validation_errors(argv):
    code, out, _ = call(*argv)
    assert code == 2 and "error" in out


def test_missing_file():
    code, out, _ = call("opnorm", "--matrix", "/nonexistent.json", "--p", 2)
    assert code == 2 and "cannot read" in out["error"]


def test_opnorm_and_oracle(data_dir):
    code, out, _ = call("opnorm", "--matrix", data_dir / "mat.json", "--p", 1.5, "--oracle")
    assert code == 0
    assert out["certified_lower_bound"] is True
    assert out["value"] == pytest.approx(out["oracle"], abs=1e-6)


def test_lamperti(data_dir):
    code, out, _ = call("spatial", "lamperti", "--matrix", data_dir / "perm.json", "--p", 3)
    assert code == 0 and out["is_isometric_bijection"] and out["permutation"] == [1, 0]


def test_crossed_subcommands(data_dir):
    act, el = data_dir / "z4_action.json", data_dir / "z4_element.json"
    code, out, _ = call("crossed", "norm", "--action", act, "--element", el, "--p", 2)
    assert code == 0 and out["sup_norm"] <= out["reduced_norm"] + 1e-9 <= out["l1_norm"] + 2e-9
    code, out, _ = call("crossed", "condexp", "--action", act, "--element", el, "--g", 1)
    assert code == 0 and out["coefficient"][0][0] == [0.5, 0.0]
    code, out, _ = call("crossed", "dual", "--action", act, "--element", el, "--character", 2)
    assert code == 0 and out["conjugation_error"] <= 1e-10
    assert out["norm_after"] == pytest.approx(out["norm_before"], rel=1e-9)
    code, out, _ = call("crossed", "condexp", "--action", act, "--element", el, "--g", 9)
    assert code == 2
    code, out, _ = call("crossed", "zwindow", "--element", data_dir / "zelement.json", "--windows", "2,4")
    assert code == 0 and out["lower_bounds"][-1] <= out["upper_bound"]


def test_free(data_dir):
    code, out, _ = call("free", "synth", "--group", "S3")
    assert code == 0 and out["verified"] and out["size"] == 6
    assert max(out["max_correlation"].values()) <= 1e-10
    code, out, _ = call("free", "trace", "--group", "Z4", "--element", data_dir / "diag_el.json")
    assert code == 0 and out["trace"] == [2.5, 0.0]


def test_leavitt_norm(data_dir):
    code, out, _ = call("leavitt", "norm", "--d", 2, "--p", 1.5, "--element", data_dir / "leavitt_x.json",
                        "--windows", "8,16")
    assert code == 0 and out["lower_bounds"][-1] <= out["upper_bound"]


def test_stab(data_dir):
    code, out, _ = call("stab", "verify", "--d", 2, "--quick")
    assert code == 0 and out["all_passed"]
    code, out, _ = call("stab", "realize", "--element", data_dir / "crossed_x.json", "--M", 4, "--N", 2,
                        "--norm")
    assert code == 0 and len(out["matrix"]["entries"]) == 16
    code, out, _ = call("stab", "realize", "--sigma", data_dir / "leavitt_x.json", "--M", 4, "--N", 2)
    assert code == 2
    code, out, _ = call("stab", "realize", "--element", data_dir / "crossed_x.json", "--M", 1, "--N", 2)
    assert code == 2


def test_deterministic(data_dir):
    argv = ("opnorm", "--matrix", data_dir / "mat.json", "--p", 3, "--seed", 11)
    assert call(*argv)[2] == call(*argv)[2]
    argv = ("verify-all", "--quick", "--module", "opnorm")
    assert call(*argv)[2] == call(*argv)[2]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "lpcrossed", "ktheory", "od", "--d", "4"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["K0"]["order"] == 3
