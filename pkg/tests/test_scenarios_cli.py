import json
from fractions import Fraction

import pytest

from anticanonical.cli import main
from anticanonical.lattice import canonical_class, extend_isometry, pairing
from anticanonical.pairs import RegimeKind, classify, lambda_lattice, load_pair, validate
from anticanonical.pell import unit_action
from anticanonical.scenarios import BUILDERS, ScenarioError, build, verify

REGIMES = {
    "ex42": RegimeKind.BOUNDED_ONLY,
    "ex43": RegimeKind.BOUNDED_ONLY,
    "nodal_cubic_N": RegimeKind.DISTINGUISHED,
    "duval_10": RegimeKind.K_SQUARE_MINUS_ONE,
    "family_kN": RegimeKind.DISTINGUISHED,
    "remark45_n": RegimeKind.NOT_NEGATIVE_DEFINITE,
}


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_every_scenario_validates(name):
    sc = build(name)
    assert validate(sc.pair) == []
    assert classify(sc.pair).regime is REGIMES[name]


def test_negative_definite_examples(ex42, ex43):
    assert classify(ex42.pair).negative_definite and classify(ex43.pair).negative_definite


@pytest.mark.parametrize("name,params", [("nodal_cubic_N", {"N": 9}), ("family_kN", {"k": 1}),
                                         ("family_kN", {"N": 0}), ("remark45_n", {"n": -1}),
                                         ("ex42", {"k": 1}), ("nonexistent", {})])
def test_out_of_range_parameters(name, params):
    with pytest.raises(ScenarioError):
        build(name, params)


@pytest.mark.parametrize("n", range(21))
def test_remark45_class(n):
    sc = build("remark45_n", {"n": n})
    a = sc.named["A"]
    assert sc.pair.n == 2 * n + 1
    assert a.square() == -1 == pairing(a, canonical_class(sc.pair.n))


@pytest.mark.parametrize("name", ["ex42", "ex43", "nodal_cubic_N", "family_kN", "remark45_n"])
def test_verify_passes_and_is_deterministic(name):
    first = [c.to_json() for c in verify(build(name))]
    assert all(c["passed"] for c in first)
    assert first == [c.to_json() for c in verify(build(name))]
    assert {c["source"] for c in first} <= {"reference", "oracle"}


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _lines(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def ex42_file(tmp_path, capsys):
    path = tmp_path / "ex42.json"
    assert _run(capsys, "scenario", "build", "ex42", "-o", str(path))[0] == 0
    return path


def test_scenario_build_writes_loadable_file(ex42_file, ex42):
    assert load_pair(ex42_file) == ex42.pair
    data = json.loads(ex42_file.read_text(encoding="utf-8"))
    assert data["scenario"] == {"name": "ex42", "params": {}}
    assert data["named_classes"]["G1_hat"] == ex42.named["G1_hat"].to_json()


def test_scenario_build_to_stdout(capsys):
    code, out, _ = _run(capsys, "scenario", "build", "family_kN", "k=3", "N=2")
    assert code == 0
    data = json.loads(out)
    assert data["scenario"]["params"] == {"k": 3, "N": 2}


def test_pair_validate_and_classify(ex42_file, capsys, tmp_path):
    code, out, _ = _run(capsys, "pair", "validate", str(ex42_file))
    assert (code, json.loads(out)) == (0, {"valid": True, "problems": []})
    code, out, _ = _run(capsys, "pair", "classify", str(ex42_file))
    assert code == 0 and json.loads(out)["negative_definite"] is True
    data = json.loads(ex42_file.read_text(encoding="utf-8"))
    data["components"][3] = [-x for x in data["components"][3]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    code, out, _ = _run(capsys, "pair", "validate", str(bad))
    assert code == 1 and json.loads(out)["valid"] is False


def test_usage_errors(ex42_file, capsys, tmp_path):
    assert _run(capsys, "pair", "classify", str(tmp_path / "missing.json"))[0] == 2
    assert _run(capsys, "cone", "member", str(ex42_file), "--class", "1,2", "-B", "3")[0] == 2
    assert _run(capsys, "cone", "member", str(ex42_file), "--class", "x", "-B", "3")[0] == 2
    assert _run(capsys, "scenario", "build", "family_kN", "k")[0] == 2
    assert _run(capsys, "scenario", "build", "family_kN", "k=1")[0] == 2
    assert _run(capsys, "pell", "16")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_cone_member(ex42_file, ex42, capsys):
    g_hat = ",".join(map(str, ex42.named["G1_hat"].coords))
    code, out, _ = _run(capsys, "cone", "member", str(ex42_file), "--class", g_hat, "-B", "12")
    assert code == 0 and json.loads(out)["status"] == "Proven"
    g2 = ",".join(map(str, ex42.named["G2"].coords))
    code, out, _ = _run(capsys, "cone", "member", str(ex42_file), "--class", g2, "-B", "12", "--actual")
    assert json.loads(out)["status"] == "Refuted"


def test_numexc_enum_streams_json_lines(ex42_file, capsys):
    code, out, _ = _run(capsys, "numexc", "enum", str(ex42_file), "-B", "1")
    rows = _lines(out)
    assert code == 0 and rows
    assert all({"class", "degree", "effectiveness"} <= set(r) for r in rows)
    assert all(abs(r["degree"]) <= 1 for r in rows)


def test_nef_construct(ex42_file, capsys):
    code, out, _ = _run(capsys, "nef", "construct", str(ex42_file), "--seed", "1" + ",0" * 11)
    data = json.loads(out)
    assert code == 0 and data["square"] > 0 and all(Fraction(m) >= 0 for m in data["multipliers"])


def test_roots_commands(tmp_path, capsys):
    path = tmp_path / "fam.json"
    _run(capsys, "scenario", "build", "family_kN", "-o", str(path))
    code, out, _ = _run(capsys, "roots", "find", str(path), "-B", "4")
    rows = _lines(out)
    assert code == 0 and rows and all(r["status"] == "InR" for r in rows)
    code, out, _ = _run(capsys, "roots", "distinguished", str(path), "-B", "4")
    data = json.loads(out)
    assert data["found"] is True and len(data["certificate"]["roots_used"]) == 2


def test_isometry_check(ex42_file, ex42, capsys, tmp_path):
    lam = lambda_lattice(ex42.pair).rebased([ex42.named["G1"], ex42.named["G2"]])
    a = [list(r) for r in unit_action(11, (199, 60), [list(r) for r in lam.gram]).matrix]
    f = extend_isometry(a, lam, ex42.pair.components)
    matrix = tmp_path / "f.json"
    matrix.write_text(json.dumps([list(r) for r in f.matrix]), encoding="utf-8")
    probe = ",".join(map(str, ex42.named["G1_hat"].coords))
    code, out, _ = _run(capsys, "isometry", "check", str(ex42_file), str(ex42_file), "--matrix", str(matrix),
                        "-B", "12", "--probe", probe)
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "ConeNotPreserved"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([[1, 2], [3, 4]]), encoding="utf-8")
    assert _run(capsys, "isometry", "check", str(ex42_file), str(ex42_file), "--matrix", str(bad), "-B", "3")[0] == 2


def test_pell_command(capsys):
    code, out, _ = _run(capsys, "pell", "11", "--negative")
    data = json.loads(out)
    assert code == 0 and data["fundamental"] == [10, 3]
    assert data["negative_solvable"] is False and data["negative_certificate"]["kind"] == "mod4"


def test_scenario_verify_command(capsys):
    code, out, _ = _run(capsys, "scenario", "verify", "ex42")
    assert code == 0
    lines = out.splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert lines[-1] == f"{len(lines) - 1}/{len(lines) - 1} checks passed"


def test_scenario_verify_reports_mismatch(monkeypatch, capsys):
    from anticanonical import scenarios

    def broken(sc):
        return [scenarios.Check("deliberately wrong", 1, 2, "reference")]
    monkeypatch.setitem(scenarios.BATTERIES, "remark45_n", broken)
    code, out, _ = _run(capsys, "scenario", "verify", "remark45_n")
    assert code == 1 and out.startswith("FAIL [reference] deliberately wrong")
