from __future__ import annotations

import json

import pytest

from formdefect.cli import main

TOWER = {
    "base": {"vertices": 1, "edges": [[0, 0], [0, 0]], "basepoint": 0},
    "characters": [{"orders": [2, 2], "assignment": {"0": [1, 0], "1": [0, 1]}}],
    "alpha": [[0, 1], [1, 1], [0, -1], [1, -1]],
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_witt_command(capsys):
    form = json.dumps({"d": 4, "gram": [[["1", "0"], ["0", "0"]], [["0", "0"], ["-3", "0"]]]})
    code, out, _ = run(capsys, "--json", "witt", form)
    assert code == 0
    obj = json.loads(out)
    assert obj["signature"] == 0 and obj["rank_mod2"] == 0


def test_knot_defect_text_and_json(capsys):
    code, out, _ = run(capsys, "knot-defect", "[[1,1],[0,-1]]", "2", "1", "4")
    assert code == 0 and "verdict" in out
    code, out, _ = run(capsys, "--json", "knot-defect", "[[1,1],[0,-1]]", "1", "0", "4")
    assert code == 0
    assert json.loads(out)["verdict"] == "unobstructed-at-this-tower"


def test_bing_double(capsys):
    code, out, _ = run(capsys, "--json", "bing-double", "--a", "1", "--n", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["invariants"]["discriminant_class"]["representative"] == 21
    assert "not 3-solvable" in obj["notes"]
    code, out, _ = run(capsys, "bing-double", "--seifert", "[[-1,1],[0,-1]]", "--signature")
    assert code == 0 and "signature      -4" in out


def test_dual_primes_and_budget(capsys):
    code, out, _ = run(capsys, "dual-primes", "--count", "2")
    assert code == 0 and "p_2 = 883" in out
    code, out, _ = run(capsys, "dual-primes", "--count", "3", "--budget", "1")
    assert code == 2 and "truncated" in out
    code, out, _ = run(capsys, "distinguish", "--count", "3", "--budget", "1")
    assert code == 2


def test_tower_command(capsys):
    code, out, _ = run(capsys, "--json", "tower", json.dumps(TOWER), "--rank-group", "2")
    assert code == 0
    obj = json.loads(out)
    assert [lv["betti"] for lv in obj["levels"]] == [2, 5]
    assert obj["levels"][1]["character_rank"] == 5
    assert obj["loop_lifts"] == [{"start": s, "r": 1} for s in range(4)]


@pytest.mark.parametrize("argv", [
    [],
    ["knot-defect", "[[1]]"],
    ["bogus"],
    ["knot-defect", "[[1,2],[3]]", "1", "1", "4"],
    ["witt", "{not json"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1
