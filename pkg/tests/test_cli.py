import json
import subprocess
import sys

import pytest

from cqa.cli import run

from conftest import PERSON_CSV


@pytest.fixture
def files(tmp_path):
    (tmp_path / "person.csv").write_text(PERSON_CSV)
    (tmp_path / "person.dsl").write_text("fd: Name -> City, Street\n")
    rows = "\n".join(f"a{i},b{j}" for i in range(1, 4) for j in (0, 1))
    (tmp_path / "r3.csv").write_text(f"A:sym,B:sym\n{rows}\n")
    (tmp_path / "r3.dsl").write_text("fd: A -> B\n")
    return tmp_path


def cli(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_answer_golden(files, capsys):
    code, out, _ = cli(capsys, "answer", "--instance", files / "person.csv",
                       "--constraints", files / "person.dsl", "--query", "Person(n,c,s)")
    assert code == 0
    assert json.loads(out) == {
        "strategy": "qfree", "fragment": "open-quantifier-free", "free_vars": ["n", "c", "s"],
        "answers": [["Green", "Clarence", "4000 Transit"]], "stats": {"tuples": 3}}


def test_answer_table_and_query_file(files, capsys):
    (files / "q.query").write_text("# projection\nexists s.\n  Person(n, c, s)\n")
    code, out, _ = cli(capsys, "answer", "--instance", files / "person.csv", "--constraints",
                       files / "person.dsl", "--query-file", files / "q.query", "--format", "table")
    assert code == 0
    assert out == "strategy: oracle\nn      c\nBrown  Amherst\nGreen  Clarence\n"


def test_repairs(files, capsys):
    code, out, _ = cli(capsys, "repairs", "--count", "--format", "table",
                       "--instance", files / "r3.csv", "--constraints", files / "r3.dsl")
    assert (code, out) == (0, "8\n")
    code, out, _ = cli(capsys, "repairs", "--enumerate",
                       "--instance", files / "person.csv", "--constraints", files / "person.dsl")
    assert [json.loads(line) for line in out.splitlines()] == [
        [["Brown", "Amherst", "115 Klein"], ["Green", "Clarence", "4000 Transit"]],
        [["Brown", "Amherst", "120 Maple"], ["Green", "Clarence", "4000 Transit"]]]


def test_check(files, capsys):
    assert cli(capsys, "check", "--instance", files / "person.csv")[:2] == (0, '{"consistent": true}\n')
    code, out, _ = cli(capsys, "check", "--instance", files / "person.csv",
                       "--constraints", files / "person.dsl")
    assert json.loads(out) == {"consistent": False}


def test_hypergraph_stats(files, capsys):
    code, out, _ = cli(capsys, "hypergraph", "--stats", "--instance", files / "r3.csv",
                       "--constraints", files / "r3.dsl")
    assert json.loads(out) == {"vertices": 6, "edges": 3, "edge_size_histogram": {"2": 3},
                               "isolated_vertices": 0}


def test_rewrite(capsys):
    code, out, _ = cli(capsys, "rewrite", "--schema", "R(A:sym, B:sym)", "--fd", "A -> B",
                       "--phi", "B = 'x'")
    assert code == 0
    assert out.startswith("exists x_A,y_B. forall y1_B. R(x_A, y_B)")


def test_gen_writes_three_files_and_verifies(files, capsys):
    (files / "k3.edges").write_text("1 2\n2 3\n1 3\n")
    code, out, _ = cli(capsys, "gen", "threecol", "--input", files / "k3.edges",
                       "--out-prefix", files / "out" / "k3")
    report = json.loads(out)
    assert code == 0 and report["facts"] == 60 and report["agrees"] and report["yes_instance"]
    assert (files / "out" / "k3.dsl").read_text() == "fd: A -> B, C\nfd: B -> A, C\n"
    assert (files / "out" / "k3.query").read_text() == "exists x,y. R(x, y, 'b')\n"


def test_generated_files_feed_back_into_answer(files, capsys):
    (files / "f.cnf").write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n")
    cli(capsys, "gen", "monotone3sat", "--input", files / "f.cnf", "--out-prefix", files / "m")
    code, out, _ = cli(capsys, "answer", "--instance", files / "m.csv", "--constraints",
                       files / "m.dsl", "--query-file", files / "m.query")
    assert code == 0 and json.loads(out)["status"] == "undetermined"


def test_gen_large_skips_verification(files, capsys):
    (files / "f.cnf").write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n")
    code, out, _ = cli(capsys, "gen", "monotone3sat", "--large", "--input", files / "f.cnf",
                       "--out-prefix", files / "m")
    assert code == 0 and "agrees" not in json.loads(out)


@pytest.mark.parametrize("argv, code, message", [
    (["answer", "--instance", "{d}/person.csv", "--query", "Person(n,c)"], 2, "arity"),
    (["answer", "--instance", "{d}/person.csv", "--query", "Person(n,c,s) &"], 2, "column"),
    (["answer", "--instance", "{d}/missing.csv", "--query", "Person(n,c,s)"], 2, "cannot read"),
    (["answer", "--instance", "{d}/person.csv", "--constraints", "{d}/person.dsl",
      "--query", "exists s. Person(n,c,s)", "--strategy", "qfree"], 2, "qfree"),
    (["repairs", "--count", "--budget", "1", "--instance", "{d}/r3.csv",
      "--constraints", "{d}/r3.dsl"], 3, "budget"),
    (["repairs", "--count", "--budget", "0", "--instance", "{d}/r3.csv"], 2, "positive"),
    (["nosuch"], 2, "invalid choice"),
])
def test_errors_map_to_exit_codes(files, capsys, argv, code, message):
    got, _, err = cli(capsys, *[a.format(d=files) for a in argv])
    assert got == code and message in err


def test_parse_error_names_the_file(files, capsys):
    (files / "bad.dsl").write_text("fd: Name -> City\nfd: Name -> Town\n")
    code, _, err = cli(capsys, "check", "--instance", files / "person.csv",
                       "--constraints", files / "bad.dsl")
    assert code == 2 and "bad.dsl, line 2, column 1" in err


def test_selftest_is_deterministic(capsys):
    first = cli(capsys, "selftest", "--cases", "10", "--seed", "4", "--suite", "qfree")
    second = cli(capsys, "selftest", "--cases", "10", "--seed", "4", "--suite", "qfree")
    assert first == second and first[0] == 0
    assert json.loads(first[1])["agreed"] == 10


def test_console_module_entry_point(files):
    done = subprocess.run([sys.executable, "-m", "cqa", "check", "--instance",
                           str(files / "person.csv")], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout == '{"consistent": true}\n'
