import json

import pytest

from daggerhom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def checks(report):
    return {c["name"]: c["status"] for c in report["checks"]}


def test_verify_bar_free(capsys):
    code, out = run(capsys, "verify", "bar", "--group", "free:2", "--max-degree", "3", "--ball", "4",
                    "--samples", "50", "--seed", "7")
    rep = json.loads(out)
    assert code == 0
    assert set(checks(rep).values()) == {"pass"}
    assert rep["seed"] == 7 and rep["command"] == "verify bar"
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)


def test_verify_bar_zn(capsys):
    code, out = run(capsys, "verify", "bar", "--group", "zn:2", "--samples", "20")
    assert code == 0
    assert set(checks(json.loads(out)).values()) == {"pass"}


def test_verify_bar_finite_skips_adversary(capsys):
    code, out = run(capsys, "verify", "bar", "--group", "sym:3", "--ball", "2", "--samples", "10")
    assert code == 0
    assert checks(json.loads(out))["adversary_rejected"] == "skip"


def test_corrupted_sign_is_caught(capsys):
    code, out = run(capsys, "verify", "bar", "--group", "free:2", "--max-degree", "2", "--ball", "3",
                    "--samples", "10", "--corrupt-sign")
    assert code == 1
    assert checks(json.loads(out))["prism_identity"] == "fail"


def test_reports_are_reproducible(capsys):
    args = ("verify", "bar", "--group", "free:2", "--max-degree", "2", "--ball", "3", "--samples", "10",
            "--seed", "123")
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second


def test_torus_hh(capsys):
    code, out = run(capsys, "torus", "hh", "--p", "5", "--lambda", "6/5", "--window", "6", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["results"]["dims"] == [1, 2, 1, 0]


def test_torus_hh_both(capsys):
    code, out = run(capsys, "torus", "hh", "--p", "5", "--lambda", "6/5", "--window", "8",
                    "--min-window", "4", "--method", "both")
    rep = json.loads(out)
    assert code == 0 and checks(rep)["method_agreement"] == "pass"
    assert sorted(rep["results"]["per_window"]) == ["4", "5", "6", "7", "8"]


def test_torus_hh_degenerate(capsys):
    code, out = run(capsys, "torus", "hh", "--p", "5", "--lambda", "-1", "--window", "6")
    rep = json.loads(out)
    assert code == 1
    assert checks(rep)["stabilized"] == "fail"
    assert rep["results"]["degenerate"] is True
    assert any("root of unity" in n for n in rep["results"]["notes"])


def test_torus_require_unit(capsys):
    code = main(["torus", "hh", "--p", "5", "--lambda", "6/5", "--require-unit"])
    assert code == 2
    assert "not a 5-adic unit" in capsys.readouterr().err


def test_finite_x(capsys):
    code, out = run(capsys, "finite", "x", "--group", "sym:3", "--level", "1", "--json")
    res = json.loads(out)["results"]
    assert code == 0 and (res["h_even"], res["h_odd"]) == (3, 0)


def test_iwasawa(capsys, tmp_path):
    path = tmp_path / "z2-tower.json"
    path.write_text(json.dumps({"levels": ["cyclic:2", "cyclic:4", "cyclic:8"],
                                "maps": [{"1": "1"}, {"1": "1"}]}))
    code, out = run(capsys, "iwasawa", "--tower", str(path), "--levels", "3", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["results"]["dims"] == [2, 4, 8]


def test_iwasawa_bad_map(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"levels": ["cyclic:2", "cyclic:3"], "maps": [{"1": "1"}]}))
    code, out = run(capsys, "iwasawa", "--tower", str(path))
    assert code == 1
    assert checks(json.loads(out))["homomorphisms"] == "fail"


def test_gauge(capsys, tmp_path):
    path = tmp_path / "elem.json"
    path.write_text(json.dumps({"group": "free:2", "terms": [{"g": "abA", "coeff": "1"}]}))
    code, out = run(capsys, "gauge", "--input", str(path))
    assert code == 0
    assert json.loads(out)["results"]["gauge"] == "1/3"


def test_gauge_twisted_element(capsys, tmp_path):
    path = tmp_path / "elem.json"
    path.write_text(json.dumps({"group": "zn:2", "lambda": "6/7",
                                "terms": [{"g": [2, 2], "coeff": "25"}, {"g": [0, 0], "coeff": "3"}]}))
    code, out = run(capsys, "gauge", "--input", str(path), "--p", "5")
    assert json.loads(out)["results"]["gauge"] == "3/4"


def test_pretty_output(capsys):
    code, out = run(capsys, "finite", "x", "--group", "cyclic:4", "--pretty")
    assert code == 0
    assert out.startswith("finite x") and "pass" in out


@pytest.mark.parametrize("argv", [["bogus"], ["torus", "hh", "--lambda", "2"], [],
                                  ["torus", "hh", "--p", "5", "--lambda", "1/0"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


def test_input_errors_exit_two(capsys):
    assert main(["verify", "bar", "--group", "nope:1"]) == 2
    assert main(["torus", "hh", "--p", "4", "--lambda", "2"]) == 2
    assert main(["gauge", "--input", "/nonexistent.json"]) == 2
