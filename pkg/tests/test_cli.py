import json
import os
import shutil

import pytest

from secat.cli import SCHEMA_VERSION, describe, main, result_entry

import oracle
from conftest import to_oracle
from secat.modelio import corpus_model

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "data")
GOLDEN = os.path.join(HERE, "golden", "corpus_batch.txt")
SCHEMA_KEYS = {"invariant", "lower", "upper", "conclusive", "witness", "degree_bound", "notes"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def model_path(corpus_dir, name):
    return os.path.join(corpus_dir, name + ".cdga")


def test_documented_examples(capsys, corpus_dir):
    code, out, _ = run(capsys, "cat", model_path(corpus_dir, "S2"))
    assert code == 0 and "cat = 1 (conclusive)" in out
    code, out, _ = run(capsys, "tc", model_path(corpus_dir, "S3"))
    assert code == 0 and "TC = 1 (conclusive)" in out
    code, out, _ = run(capsys, "tc", model_path(corpus_dir, "S2"), "-n", "3")
    assert code == 0 and "TC_3 = 3 (conclusive)" in out
    assert "witness: x_1*x_2*x_3" in out


def test_every_command_runs(capsys, corpus_dir):
    cases = [
        ("validate", "S2"), ("cohomology", "CP2"), ("toomer", "NF"), ("cat", "CP2"),
        ("hsecat", "RC_desk", "--morphism", "phi"), ("lemma2", "L2_point_x3y3"),
    ]
    for command, name, *extra in cases:
        code, out, err = run(capsys, command, model_path(corpus_dir, name), *extra)
        assert code == 0, err
        assert out.startswith(f"model {name}")


def test_json_reports_follow_the_schema(capsys, corpus_dir):
    for argv in (["cat", "CP2"], ["tc", "S2"], ["cohomology", "S3", "--max-degree", "4"],
                 ["lemma2", "L2_point_x3"], ["hsecat", "RC_desk", "--morphism", "phi"]):
        code, out, _ = run(capsys, argv[0], model_path(corpus_dir, argv[1]), *argv[2:], "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == SCHEMA_VERSION
        assert report["command"] == argv[0]
        for entry in report["results"]:
            assert SCHEMA_KEYS <= set(entry)


def test_text_and_json_agree(capsys, corpus_dir):
    path = model_path(corpus_dir, "CP2")
    _, text, _ = run(capsys, "tc", path)
    _, js, _ = run(capsys, "tc", path, "--format", "json")
    entry = json.loads(js)["results"][0]
    assert f"TC = {entry['lower']} (conclusive)" in text
    assert f"witness: {entry['witness']}" in text


def test_bounded_wording(capsys, corpus_dir):
    code, out, _ = run(capsys, "tc", model_path(corpus_dir, "NF"), "--max-degree", "8")
    assert code == 0
    assert "TC = 4 (within degree 8, not proven beyond it)" in out


def test_one_formatter_for_all_wordings():
    def entry(lo, up, conclusive, **extra):
        return result_entry("X", lo, up, conclusive, degree_bound=9, **extra)

    assert describe(entry(2, 2, True)) == "X = 2 (conclusive)"
    assert describe(entry(2, None, False)) == "X ≥ 2 (lower bound)"
    assert describe(entry(None, 3, False)) == "X ≤ 3 (upper bound)"
    assert describe(entry(1, 3, False)) == "1 ≤ X ≤ 3 (bounds)"
    assert describe(entry(2, 2, False)) == "X = 2 (within degree 9, not proven beyond it)"
    assert describe(entry(None, None, True)) == "X: yes"
    assert describe(entry(None, None, True, verified=False, level=1)) == "X ≤ 1: conclusively refuted for this retraction"


def test_input_errors_exit_two(capsys, tmp_path, corpus_dir):
    code, _, err = run(capsys, "cat", str(tmp_path / "missing.cdga"))
    assert code == 2 and "no such file" in err
    bad = tmp_path / "bad.cdga"
    bad.write_text("name A\ngen x 2\ngen y 3\nd y = x\n")
    code, _, err = run(capsys, "cat", str(bad))
    assert code == 2 and "line 4, column 7" in err
    code, _, err = run(capsys, "hsecat", model_path(corpus_dir, "S2"), "--morphism", "nope")
    assert code == 2
    code, _, _ = run(capsys, "cat", model_path(corpus_dir, "S2"), "--max-degree", "0")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_relcat_check(capsys, corpus_dir):
    model = model_path(corpus_dir, "RC_desk")
    code, out, _ = run(capsys, "relcat-check", model, "--retraction", os.path.join(DATA, "rc_desk_retraction.cdga"),
                       "--max-degree", "3")
    assert code == 0 and "relcat ≤ 1 (upper bound)" in out
    code, out, _ = run(capsys, "relcat-check", model, "--retraction",
                       os.path.join(DATA, "rc_desk_bad_retraction.cdga"), "--max-degree", "3")
    assert code == 1 and "conclusively refuted" in out


def test_batch_of_empty_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "batch", str(tmp_path))
    assert code == 0
    assert len(out.strip().splitlines()) <= 1


def test_batch_with_an_invalid_model(capsys, tmp_path, corpus_dir):
    shutil.copy(model_path(corpus_dir, "S3"), tmp_path)
    (tmp_path / "broken.cdga").write_text("name broken\ngen x 2\ngen x 2\n")
    code, out, _ = run(capsys, "batch", str(tmp_path), "--invariants", "toomer")
    assert code == 2
    assert "broken.cdga" in out and "S3.cdga" in out
    code, out, _ = run(capsys, "batch", str(tmp_path), "--invariants", "toomer", "--format", "json")
    rows = json.loads(out)["models"]
    assert [r["file"] for r in rows] == ["S3.cdga", "broken.cdga"]
    assert any("error" in r for r in rows)


def golden_rows():
    with open(GOLDEN, encoding="utf-8") as fh:
        lines = fh.read().splitlines()[1:]
    return [line.split() for line in lines]


def test_golden_table_agrees_with_the_oracle():
    checked = 0
    for file, invariant, lower, upper, *_ in golden_rows():
        m = corpus_model(file[:-5])
        if m.top is None:
            continue
        ref = to_oracle(m.algebra())
        if invariant == "toomer":
            assert int(lower) == oracle.toomer(ref, m.top)
            checked += 1
        elif invariant == "TC":
            assert int(lower) >= oracle.zero_divisor_cup_length(oracle.Ring(ref, m.top), 2)
            checked += 1
    assert checked >= 20


def test_batch_matches_golden_file(capsys, corpus_dir):
    code, out, _ = run(capsys, "batch", corpus_dir, "--jobs", "2")
    assert code == 0
    with open(GOLDEN, encoding="utf-8") as fh:
        assert out == fh.read()
