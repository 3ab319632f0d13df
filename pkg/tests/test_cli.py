import json

import pytest
from click.testing import CliRunner

from rigidcr import fileformat
from rigidcr.cli import main
from rigidcr.fileformat import FileFormatError, parse_document
from rigidcr.hypersurface import random_rank1


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture
def files(tmp_path, runner):
    out = {}
    for kind, extra in (("gm", ()), ("lightcone", ()), ("random", ("--seed", 3)), ("envelope", ("--seed", 1))):
        r = run(runner, "model", kind, "--degree", 8, *extra)
        assert r.exit_code == 0, r.output
        p = tmp_path / ("%s.json" % kind)
        p.write_text(r.output)
        out[kind] = p
    return out


def test_model_round_trip(runner, files):
    for kind, p in files.items():
        r = run(runner, "validate", p)
        assert r.exit_code == 0, (kind, r.output)
        flags = json.loads(r.output)["flags"]
        assert all(v is not False for v in flags.values()), (kind, flags)


def test_bit_exact_round_trip(files):
    for p in files.values():
        text = p.read_text().strip()
        H = fileformat.load(str(p))
        assert fileformat.dumps(fileformat.document(H)) == text


def test_taylor_convention_round_trip(tmp_path, runner):
    r = run(runner, "model", "random", "--degree", 5, "--convention", "taylor")
    p = tmp_path / "t.json"
    p.write_text(r.output)
    H = fileformat.load(str(p))
    assert H.F == random_rank1(0, 5).F or H.convention == "taylor"
    assert fileformat.dumps(fileformat.document(H)) == r.output.strip()


def test_model_invariants_zero(runner, files):
    r = run(runner, "invariants", files["gm"], "--route", "both")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    zero = {"re": "0/1", "im": "0/1"}
    for route in ("jet", "diff"):
        assert all(doc[route][k] == zero for k in ("I0", "V0", "Q0"))
    assert doc["bridge_ok"] is True


def test_invariants_bridge(runner, files):
    doc = json.loads(run(runner, "invariants", files["random"]).output)
    assert doc["bridge_ok"] is True
    doc = json.loads(run(runner, "invariants", files["envelope"], "--route", "diff").output)
    assert "jet" not in doc and doc["diff"]["V0"] == {"re": "0/1", "im": "0/1"}


def test_invariants_at_point(runner, tmp_path):
    r = run(runner, "model", "envelope", "--degree", 7, "--seed", 2, "--at", "1/7", "1/5", "-1/4", "1/3")
    assert r.exit_code == 0
    p = tmp_path / "e.json"
    p.write_text(r.output)
    doc = json.loads(run(runner, "invariants", p).output)
    assert doc["bridge_ok"] is True
    # a truncated jet moved off the origin loses rank 1 beyond low order
    r = run(runner, "invariants", p, "--at", "1/3", "0", "0", "1/2")
    assert r.exit_code == 1 and "rank1" in r.output
    r = run(runner, "invariants", p, "--at", "x", "0", "0", "0")
    assert r.exit_code == 1


def test_equivalence_models(runner, files):
    r = run(runner, "equivalence", files["gm"], files["lightcone"])
    assert r.exit_code == 0
    assert json.loads(r.output)["verdict"] == "equivalent-up-to-truncation"
    r = run(runner, "equivalence", files["gm"], files["random"])
    assert r.exit_code == 0 and json.loads(r.output)["verdict"] == "inequivalent"


def test_equivalence_always_zero(runner, tmp_path, files):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    r = run(runner, "equivalence", bad, files["gm"])
    assert r.exit_code == 0 and json.loads(r.output)["verdict"] == "undecided"


def test_normalize_and_prenormalize(runner, files):
    r = run(runner, "normalize", files["random"], "--branch")
    doc = json.loads(r.output)
    assert r.exit_code == 0 and doc["branch"] in ("I0_nonzero", "V0_nonzero_I0_zero", "flat")
    assert "branch_data" in doc
    r = run(runner, "prenormalize", files["random"])
    assert r.exit_code == 0 and "stage_log" in json.loads(r.output)
    assert json.loads(run(runner, "normalize", files["lightcone"]).output)["branch"] == "flat"


def test_complete(runner, files):
    r = run(runner, "complete", files["gm"])
    assert r.exit_code == 0
    assert json.loads(r.output) == json.loads(files["gm"].read_text())
    r = run(runner, "complete", files["random"], "--degree", 5)
    assert json.loads(r.output)["degree"] == 5


def test_exit_codes(runner, tmp_path):
    deg = tmp_path / "deg.json"
    deg.write_text(json.dumps({"ambient_dim": 3, "degree": 4, "convention": "monomial",
                               "coefficients": [{"exp": [0, 1, 0, 1], "re": "1", "im": "0"}]}))
    r = run(runner, "normalize", deg)
    assert r.exit_code == 2 and "Levi" in r.output
    rk = tmp_path / "rank.json"
    rk.write_text(json.dumps({"ambient_dim": 3, "degree": 4, "coefficients": [
        {"exp": [1, 0, 1, 0], "re": "1"}, {"exp": [0, 1, 0, 1], "re": "1"}]}))
    r = run(runner, "normalize", rk)
    assert r.exit_code == 1 and "rank1" in r.output
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run(runner, "validate", bad).exit_code == 1
    assert run(runner, "validate", tmp_path / "missing.json").exit_code == 1
    assert run(runner, "model", "gm", "--degree", 11).exit_code == 1
    assert run(runner, "--max-degree", 12, "model", "gm", "--degree", 11).exit_code == 0
    assert run(runner, "model", "random", "--at", "0", "0", "0", "0").exit_code == 1


def test_validate_reports_failure(runner, tmp_path):
    p = tmp_path / "ph.json"
    p.write_text(json.dumps({"ambient_dim": 3, "degree": 3, "coefficients": [
        {"exp": [1, 0, 1, 0], "re": "1"}, {"exp": [3, 0, 0, 0], "re": "1"}, {"exp": [0, 0, 3, 0], "re": "1"}]}))
    r = run(runner, "validate", p)
    assert r.exit_code == 1


def test_determinism(runner, files):
    a = run(runner, "normalize", files["random"], "--branch").output
    b = run(runner, "normalize", files["random"], "--branch").output
    assert a == b
    assert run(runner, "model", "random", "--seed", 5).output == run(runner, "model", "random", "--seed", 5).output


def test_decimals_flag(runner, files):
    doc = json.loads(run(runner, "--decimals", "invariants", files["random"]).output)
    assert "approx" in doc["jet"]["I0"]


def test_c2_commands(runner, tmp_path):
    p = tmp_path / "c2.json"
    p.write_text(json.dumps({"ambient_dim": 2, "degree": 6, "coefficients": [
        {"exp": [1, 0, 1, 0], "re": "1"}, {"exp": [2, 0, 2, 0], "re": "1"}]}))
    doc = json.loads(run(runner, "normalize", p).output)
    assert doc["sphere"] is False and doc["R0"] == {"re": "4/1", "im": "0/1"}
    doc = json.loads(run(runner, "equivalence", p, p).output)
    assert doc["verdict"] == "equivalent-up-to-truncation"


def test_selftest(runner):
    r = runner.invoke(main, ["selftest", "--samples", "2"])
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["ok"] is True
    bad = [f for f in doc["fixtures"] if not f["ok"]]
    assert {f["fixture"] for f in bad} == {"printed step 5: F0230", "printed step 5: F1130"}
    assert all(f["expected_failure"] for f in bad)


# --- file format -------------------------------------------------------------

def doc(coeffs, **kw):
    d = {"ambient_dim": 3, "degree": 4, "convention": "monomial", "coefficients": coeffs}
    d.update(kw)
    return d


def test_parse_errors():
    with pytest.raises(FileFormatError):
        parse_document({"degree": 4})
    with pytest.raises(FileFormatError):
        parse_document(doc([], ambient_dim=4))
    with pytest.raises(FileFormatError):
        parse_document(doc([], convention="other"))
    with pytest.raises(FileFormatError):
        parse_document(doc([{"exp": [1, 0, 1], "re": "1"}]))
    with pytest.raises(FileFormatError):
        parse_document(doc([{"exp": [5, 0, 1, 0], "re": "1"}]))
    with pytest.raises(FileFormatError):
        parse_document(doc([{"exp": [1, 0, 1, 0], "re": "1"}, {"exp": [1, 0, 1, 0], "re": "1"}]))
    with pytest.raises(FileFormatError):
        parse_document(doc([{"exp": [1, 0, 1, 0], "re": "one"}]))


def test_non_reduced_fraction_warns():
    with pytest.warns(UserWarning, match="canonicalized"):
        H = parse_document(doc([{"exp": [1, 0, 1, 0], "re": "2/4"}]))
    assert str(H.mono(1, 0, 1, 0)) == "1/2"


def test_cli_warning_on_stderr(tmp_path):
    p = tmp_path / "w.json"
    p.write_text(json.dumps(doc([{"exp": [1, 0, 1, 0], "re": "4/4"}, {"exp": [2, 0, 0, 1], "re": "1/2"},
                                 {"exp": [0, 1, 2, 0], "re": "1/2"}], degree=3)))
    r = CliRunner().invoke(main, ["validate", str(p)])
    assert r.exit_code == 0
    assert "warning:" in r.stderr and "warning:" not in r.stdout
