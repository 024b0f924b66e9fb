import subprocess
import sys

import pytest

from amparser.cli import EXIT_INTERNAL, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from amparser.corpus import read_corpus

from builders import DATA

CORPUS = str(DATA / "mini_corpus.amr")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def stats_of(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture(scope="module")
def treebank(tmp_path_factory):
    path = tmp_path_factory.mktemp("tb") / "mini.tb"
    assert main(["convert", CORPUS, "--out", str(path)]) == EXIT_OK
    return path


def test_no_subcommand(capsys):
    code, _, err = run([], capsys)
    assert code == EXIT_USAGE and "subcommand" in err


def test_bad_option(capsys):
    assert run(["parse", "--decoder", "greedy"], capsys)[0] == EXIT_USAGE
    assert run(["convert", CORPUS, "--k", "0"], capsys)[0] == EXIT_USAGE


def test_missing_file(capsys, tmp_path):
    code, _, err = run(["convert", str(tmp_path / "nope.amr")], capsys)
    assert code == EXIT_IO and "cannot read" in err


def test_convert_writes_treebank_and_stats(capsys, tmp_path):
    out, stats = tmp_path / "t.tb", tmp_path / "s.txt"
    code, _, _ = run(["convert", CORPUS, "--out", str(out), "--stats", str(stats)], capsys)
    assert code == EXIT_OK
    s = stats_of(stats.read_text())
    assert s["sentences"] == "24" and s["accepted"] == "24"
    assert "nonprojective_pct" in s and "supertags_delexicalized" in s
    assert out.read_text().count("\n\n") >= 23


def test_convert_is_deterministic(capsys, tmp_path, treebank):
    a = tmp_path / "a.tb"
    run(["convert", CORPUS, "--out", str(a), "--jobs", "2"], capsys)
    assert a.read_text() == treebank.read_text()


def test_convert_rejects_bad_policy(capsys, tmp_path):
    bad = tmp_path / "p.json"
    bad.write_text('{"no_such_field": 1}')
    assert run(["convert", CORPUS, "--policy", str(bad)], capsys)[0] == EXIT_USAGE


def test_parse_and_eval(capsys, tmp_path, treebank):
    pred, stats = tmp_path / "pred.amr", tmp_path / "stats.txt"
    code, _, _ = run(
        ["parse", CORPUS, "--model", str(treebank), "--out", str(pred), "--stats", str(stats)], capsys
    )
    assert code == EXIT_OK
    s = stats_of(stats.read_text())
    assert s["sentences"] == "24"
    assert float(s["supertag_accuracy"]) == 1.0
    assert "status.exact-goal" in s
    assert len(read_corpus(pred.read_text())) == 24
    code, out, _ = run(["eval", str(pred), CORPUS], capsys)
    assert code == EXIT_OK
    assert stats_of(out)["f"] == "1.0000"


def test_parse_is_deterministic(capsys, tmp_path, treebank):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"p{jobs}.amr"
        run(["parse", CORPUS, "--model", str(treebank), "--out", str(path), "--jobs", jobs], capsys)
        outs.append(path.read_text())
    assert outs[0] == outs[1]


def test_parse_plain_text_and_timeout_fallback(capsys, tmp_path, treebank):
    text = tmp_path / "s.txt"
    text.write_text("the boy sleeps\n\nthe girl dances\n")
    code, out, err = run(
        ["parse", str(text), "--model", str(treebank), "--time-limit", "0", "--stats", "-"], capsys
    )
    assert code == EXIT_OK
    assert out.count("(a1 / amr-empty)") == 2
    assert "dummy graph used" in err
    assert stats_of(out)["status.error"] == "2"
    assert stats_of(out)["supertag_accuracy"] == "n/a"


def test_parse_needs_one_source(capsys, treebank):
    assert run(["parse", CORPUS], capsys)[0] == EXIT_USAGE
    assert run(["parse", "--model", str(treebank)], capsys)[0] == EXIT_USAGE


def test_parse_tables(capsys, tmp_path):
    code, out, _ = run(["parse", "--tables", str(DATA / "adversarial_type_unaware.json"), "--k", "4"], capsys)
    assert code == EXIT_OK
    assert "# ::status exact-goal" in out
    code, out, _ = run(
        ["parse", "--tables", str(DATA / "adversarial_type_unaware.json"), "--decoder", "type-unaware"], capsys
    )
    assert "# ::status subtree-fallback" in out


def test_parse_bad_tables(capsys, tmp_path):
    bad = tmp_path / "t.json"
    bad.write_text('{"tokens": []')
    assert run(["parse", "--tables", str(bad)], capsys)[0] == EXIT_IO


def test_eval_length_mismatch(capsys, tmp_path):
    one = tmp_path / "one.amr"
    one.write_text("# ::snt a\n(a / a)\n")
    assert run(["eval", str(one), CORPUS], capsys)[0] == EXIT_IO


def test_npc_yes_and_no(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("1 2\n2 3\n")
    code, out, _ = run(["npc", str(g)], capsys)
    s = stats_of(out)
    assert code == EXIT_OK and s["hamiltonian"] == "YES" and s["score"] == "2" and s["target"] == "2"
    assert s["supertag.1"] == "(v1<root> / v1 :next (s1<s>))"
    g.write_text("n 3\n1 2\n2 1\n")
    s = stats_of(run(["npc", str(g)], capsys)[1])
    assert s["hamiltonian"] == "NO"


def test_npc_sweep(capsys):
    code, out, _ = run(["npc", "--sweep", "3"], capsys)
    assert code == EXIT_OK
    assert "n=3\tdigraphs=64\tagree=64\tagreement=100.0%" in out


def test_npc_usage(capsys, tmp_path):
    assert run(["npc"], capsys)[0] == EXIT_USAGE
    bad = tmp_path / "g.txt"
    bad.write_text("1 2 3\n")
    assert run(["npc", str(bad)], capsys)[0] == EXIT_IO


def test_oracle_compare(capsys, tmp_path):
    out = tmp_path / "cmp.csv"
    code, summary, _ = run(["oracle-compare", "--count", "20", "--max-n", "5", "--k", "2", "--out", str(out)], capsys)
    assert code == EXIT_OK
    rows = out.read_text().splitlines()
    assert len(rows) == 21 and rows[0].startswith("id,n,exact")
    s = stats_of(summary)
    assert s["approx_above_exact"] == "0"
    assert float(s["projective_equal_on_projective_optimum_pct"]) == 100.0


def test_oracle_compare_guard(capsys):
    assert run(["oracle-compare", "--count", "3", "--max-n", "6", "--guard-n", "0"], capsys)[0] == EXIT_USAGE


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "amparser.cli", "npc", "--sweep", "2"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert "n=2" in proc.stdout


def test_internal_error_code_is_distinct():
    assert len({EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL}) == 4


def test_npc_triangle_and_reversed_edge(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("1 2\n2 3\n3 1\n")
    s = stats_of(run(["npc", str(g)], capsys)[1])
    assert s["hamiltonian"] == "YES" and s["score"] == "2"
    g.write_text("2 1\n")
    s = stats_of(run(["npc", str(g)], capsys)[1])
    assert s["hamiltonian"] == "NO" and float(s["score"]) < 1


def test_convert_empty_corpus(capsys, tmp_path):
    empty, out = tmp_path / "empty.amr", tmp_path / "out.tb"
    empty.write_text("")
    code, stdout, _ = run(["convert", str(empty), "--out", str(out)], capsys)
    assert code == EXIT_OK
    assert out.read_text() == ""
    assert stats_of(stdout)["sentences"] == "0"


def test_convert_skips_malformed_sentence(capsys, tmp_path):
    corpus, out = tmp_path / "c.amr", tmp_path / "out.tb"
    corpus.write_text("# ::snt the boy\n(b / boy :mod x)\n\n# ::snt the boy\n(b / boy)\n")
    code, stdout, err = run(["convert", str(corpus), "--out", str(out)], capsys)
    assert code == EXIT_OK
    assert "sentence 1: rejected" in err
    s = stats_of(stdout)
    assert s["accepted"] == "1" and s["rejected"] == "1"


def test_eval_disjoint_graphs(capsys, tmp_path):
    a, b = tmp_path / "a.amr", tmp_path / "b.amr"
    a.write_text("# ::snt x\n(b / boy)\n")
    b.write_text("# ::snt x\n(g / girl)\n")
    code, out, _ = run(["eval", str(a), str(b)], capsys)
    assert code == EXIT_OK and stats_of(out)["f"] == "0.0000"
    code, out, _ = run(["eval", str(a), str(a)], capsys)
    assert stats_of(out)["f"] == "1.0000"


def test_parse_exact_guard_falls_back_to_dummy(capsys, tmp_path):
    import random

    from amparser.decode.instances import InstanceConfig, random_table

    tables = tmp_path / "big.jsonl"
    table = random_table(random.Random(0), InstanceConfig(k=1), n=30)
    tables.write_text(table.dumps().replace("\n", "") + "\n")
    code, out, err = run(["parse", "--tables", str(tables), "--decoder", "exact"], capsys)
    assert code == EXIT_OK
    assert "# ::status error" in out and "(a1 / amr-empty)" in out
    assert "GuardError" in err
