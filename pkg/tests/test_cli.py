import json

import pytest

from inkage.cli import main
from inkage.features import FEATURE_NAMES
from inkage.synth import SynthSpec, generate_cohort

MINIMAL = "2\n100 200 0 1 1800 450 512\n110 200 10 1 1800 450 510\n"


@pytest.fixture(scope="module")
def small_cohort(tmp_path_factory):
    root = tmp_path_factory.mktemp("cohort")
    return generate_cohort(SynthSpec(seed=5, writers=12), root)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_extract_single_file(tmp_path, capsys):
    path = tmp_path / "w1_s2.svc"
    path.write_text(MINIMAL)
    code, out, _ = run(capsys, "extract", path)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0] == "recording," + ",".join(FEATURE_NAMES)
    assert lines[1].startswith("w1_s2,")


def test_extract_empty_directory(tmp_path, capsys):
    code, _, err = run(capsys, "extract", tmp_path)
    assert code == 3 and err.startswith("error: EmptyCorpus:")
    assert len(err.strip().splitlines()) == 1


def test_extract_mixed_files(tmp_path, capsys):
    (tmp_path / "a_s1.svc").write_text(MINIMAL)
    (tmp_path / "b_s1.svc").write_text("3\n1 2 3\n")
    code, out, err = run(capsys, "extract", tmp_path, "--format", "json")
    assert code == 0
    assert [r["recording"] for r in json.loads(out)] == ["a_s1"]
    assert "b_s1.svc" in err and "CountMismatch" in err

    code, _, err = run(capsys, "extract", tmp_path, "--strict")
    assert code == 6 and "CountMismatch" in err


def test_extract_all_corrupt(tmp_path, capsys):
    (tmp_path / "b_s1.svc").write_text("garbage")
    code, _, err = run(capsys, "extract", tmp_path)
    assert code == 3


def test_cohort_report(small_cohort, tmp_path, capsys):
    corpus, meta = small_cohort
    out_file = tmp_path / "report.csv"
    code, _, _ = run(capsys, "cohort", corpus, "--meta", meta, "--out", out_file)
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "feature,rho,p,t,n,band"
    assert [ln.split(",")[0] for ln in lines[1:]] == list(FEATURE_NAMES)
    assert all(ln.split(",")[4] == "12" for ln in lines[1:])

    # byte-identical on a rerun
    again = tmp_path / "again.csv"
    run(capsys, "cohort", corpus, "--meta", meta, "--out", again)
    assert again.read_bytes() == out_file.read_bytes()


def test_cohort_table1_style_and_json(small_cohort, capsys):
    corpus, meta = small_cohort
    code, out, _ = run(capsys, "cohort", corpus, "--meta", meta, "--table1-style")
    rho, p = out.splitlines()[1].split(",")[1:3]
    assert code == 0
    assert len(rho.split(".")[-1]) <= 2 and "E" in p and len(p.split("E")[0]) == 4

    code, out, _ = run(capsys, "cohort", corpus, "--meta", meta, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 12 and len(doc["rows"]) == 39


def test_cohort_too_few_writers(tmp_path, capsys):
    for w in ("a", "b"):
        (tmp_path / f"{w}_s2.svc").write_text(MINIMAL)
    meta = tmp_path / "meta.csv"
    meta.write_text("writer_id,age,sex,session\na,20,M,2\nb,30,F,2\n")
    code, _, err = run(capsys, "cohort", tmp_path, "--meta", meta)
    assert code == 4 and "TooFewWriters" in err


def test_cohort_strict_unmatched(small_cohort, tmp_path, capsys):
    corpus, meta = small_cohort
    trimmed = tmp_path / "meta.csv"
    trimmed.write_text("\n".join(meta.read_text().splitlines()[:-1]) + "\n")
    code, _, err = run(capsys, "cohort", corpus, "--meta", trimmed, "--strict")
    assert code == 8 and "UnmatchedFile" in err
    code, _, err = run(capsys, "cohort", corpus, "--meta", trimmed)
    assert code == 0 and "w0012_s2.svc" in err


def test_scatter(small_cohort, capsys):
    corpus, meta = small_cohort
    code, out, _ = run(capsys, "scatter", corpus, "--meta", meta, "--feature", "t_upm")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "age,t_upm" and len(lines) == 13
    code, out, _ = run(capsys, "scatter", corpus, "--meta", meta, "--feature", "t_downm")
    assert out.splitlines()[0] == "age,t_downm"
    code, _, err = run(capsys, "scatter", corpus, "--meta", meta, "--feature", "foo")
    assert code == 5 and "UnknownFeature" in err


def test_hist(tmp_path, capsys):
    meta = tmp_path / "meta.csv"
    meta.write_text("writer_id,age,sex,session\na,20,M,2\nb,20,F,2\nc,30,U,2\n")
    code, out, _ = run(capsys, "hist", "--meta", meta, "--hist-width", 5, "--hist-origin", 18)
    assert code == 0 and out == "bin_edge,count\n18,2\n28,1\n"


def test_hist_bad_metadata(tmp_path, capsys):
    meta = tmp_path / "meta.csv"
    meta.write_text("writer_id,age,sex,session\na,-5,M,2\n")
    code, _, err = run(capsys, "hist", "--meta", meta)
    assert code == 7 and "BadAge" in err


def test_synth_command(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("writers = 3\nplanted.nt_up = 0.29\n")
    code, _, _ = run(capsys, "synth", "--spec", spec, "--seed", 9, "--out", tmp_path / "out")
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == [
        "metadata.csv", "w0001_s2.svc", "w0002_s2.svc", "w0003_s2.svc"
    ]
    spec.write_text("writers = 0\n")
    code, _, err = run(capsys, "synth", "--spec", spec, "--out", tmp_path / "bad")
    assert code == 9 and "BadSpec" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
