import json

import pytest

from fmc.cli import main

C = ["--features", "consts"]
STATE_CBN = "a<_>.[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y"
DRAW_TWICE_TERM = "(f = rand; set c; get c); f; f; +; print"


def fmc(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_json(capsys):
    code, out, _ = fmc(capsys, "parse", "a<x>.[x]b.y", "--json")
    data = json.loads(out)
    assert code == 0
    assert data == {"term": "a<x>.[x]b.y", "size": 6, "free_variables": ["y"],
                    "locations": ["a", "b"]}


def test_parse_error_reports_position(capsys):
    code, _, err = fmc(capsys, "parse", "a<x>.]")
    assert code == 1
    assert "position 5" in err


def test_parse_reads_file(capsys, tmp_path):
    path = tmp_path / "term.fmc"
    path.write_text("<x>.[x].[x]\n")
    code, out, _ = fmc(capsys, "parse", f"@{path}")
    assert code == 0 and out.strip() == "<x>.[x].[x]"


def test_run_prints_trace_and_result(capsys):
    code, out, _ = fmc(capsys, "run", STATE_CBN, "--mem", '{"a": ["0"]}', *C)
    lines = out.splitlines()
    assert code == 0
    assert len([l for l in lines if "|" in l]) == 7
    assert "halted with 2 after 6 steps" in out
    assert "a=ε·2" in lines[-1]


def test_run_json_and_memory_file(capsys, tmp_path):
    mem = tmp_path / "mem.json"
    mem.write_text(json.dumps({"stacks": {"c": ["*"]},
                               "suppliers": {"rnd": {"kind": "list", "items": ["6", "7"]}}}))
    code, out, _ = fmc(capsys, "run", DRAW_TWICE_TERM, "--mem", str(mem), "--json", *C)
    data = json.loads(out)
    assert code == 0
    assert data["outcome"] == "halted"
    # a list supplier is a stream: 6 is drawn first, so c ends up holding 7
    assert data["memory"] == {"out": ["13"], "c": ["7"]}
    assert data["steps"] == len(data["trace"])


def test_run_is_deterministic(capsys):
    first = fmc(capsys, "run", DRAW_TWICE_TERM, "--json", *C)
    second = fmc(capsys, "run", DRAW_TWICE_TERM, "--json", *C)
    assert first == second
    assert first[0] == 0


def test_run_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("FMC_SEED", "5")
    env = fmc(capsys, "run", "rand; rand", "--json", "--quiet", *C)
    flag = fmc(capsys, "run", "rand; rand", "--json", "--quiet", "--seed", "5", *C)
    assert env == flag


def test_run_exit_codes(capsys):
    assert fmc(capsys, "run", "<x>.x")[0] == 2
    assert fmc(capsys, "run", "[<x>.[x].x].<x>.[x].x", "--fuel", "30", "--quiet")[0] == 3
    assert fmc(capsys, "run", "*", "--fuel", "0")[0] == 1
    assert fmc(capsys, "run", "*", "--mem", "{not json")[0] == 1


def test_run_preloads_cells(capsys):
    code, out, _ = fmc(capsys, "run", "c<x>", "--json")
    assert code == 0
    code, out, _ = fmc(capsys, "run", "c<x>", "--json", "--no-cell-init")
    assert code == 2 and json.loads(out)["reason"] == "empty-stack"


def test_reduce_default_strategy_is_leftmost_innermost(capsys):
    code, out, _ = fmc(capsys, "reduce", DRAW_TWICE_TERM, *C)
    assert code == 0
    assert "4 steps" in out
    code, out, _ = fmc(capsys, "reduce", DRAW_TWICE_TERM, "--strategy", "lo", *C)
    assert "6 steps" in out


def test_reduce_json_and_divergence(capsys):
    code, out, _ = fmc(capsys, "reduce", "[y].<x>.[x]a", "--json")
    data = json.loads(out)
    assert code == 0 and data["normal_form"] == "[y]a" and len(data["log"]) == 2
    code, out, _ = fmc(capsys, "reduce", "[<x>.[x].x].<x>.[x].x", "--steps", "5")
    assert code == 3 and "loops" in out


def test_check_with_goal(capsys):
    code, out, _ = fmc(capsys, "check", "<x>.[x].[x]", "--type", "o > o o")
    assert code == 0 and out.startswith("Tλ")
    code, out, _ = fmc(capsys, "check", "<x>.[x].[x]", "--type", "o > o")
    assert code == 2 and "type error" in out


def test_check_searches_without_goal(capsys):
    code, out, _ = fmc(capsys, "check", "<x>.[x].x", "--json")
    assert code == 0 and json.loads(out)["type"] == "(>) > (>)"
    code, out, _ = fmc(capsys, "check", "[<y>.y].<x>.[x].x")
    assert code == 2 and "no type" in out


def test_check_with_context(capsys):
    code, _, _ = fmc(capsys, "check", "y.f", "--type", "> B", "--context", "f: Z > B; y: > Z")
    assert code == 0


def test_encode(capsys):
    code, out, _ = fmc(capsys, "encode", "a := 2; ((\\x. !a) (a := 3; 0))", "--mode", "cbn")
    assert code == 0 and out.strip() == STATE_CBN
    code, _, err = fmc(capsys, "encode", "return 1", "--mode", "arrow")
    assert code == 1 and "error" in err


def test_selftest_quick(capsys):
    code, out, _ = fmc(capsys, "selftest", "--json")
    data = json.loads(out)
    assert code == 0 and data["ok"]
    assert all(c["ok"] for c in data["checks"])


def test_help_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
