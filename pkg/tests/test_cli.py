import json

import pytest

from geored.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "triangle.col").write_text("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    (tmp_path / "or.cnf").write_text("p cnf 2 1\n1 2 0\n")
    (tmp_path / "unsat.cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")
    (tmp_path / "bad.cnf").write_text("p cnf 1 1\n2 0\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_kcol(files, capsys):
    code, out, _ = run(capsys, "reduce", "--reduction", "kcol-ksat", "--k", "3", files / "triangle.col")
    assert code == 0 and out.splitlines()[0].startswith("p cnf 9 ")


def test_reduce_writes_directory(files, capsys):
    dest = files / "out"
    code, _, _ = run(capsys, "reduce", "--reduction", "kcol-ksat", files / "triangle.col", "--output", dest)
    assert code == 0
    assert sorted(p.name for p in dest.iterdir()) == ["provenance.json", "target.cnf", "witnesses.txt"]
    assert len((dest / "witnesses.txt").read_text().splitlines()) == 6


def test_reduce_foursat_phi1(files, capsys):
    run(capsys, "counterexample", "--output", files / "ce")
    code, out, _ = run(capsys, "reduce", "--reduction", "foursat-threesat", files / "ce" / "phi1.cnf")
    assert code == 0 and out.startswith("p cnf 17 18")


def test_reduce_wrong_kind(files, capsys):
    code, _, err = run(capsys, "reduce", "--reduction", "pgb-counting", files / "or.cnf")
    assert code == 2 and "expects a pgb instance" in err


def test_parse_error_exit(files, capsys):
    code, _, err = run(capsys, "solve", files / "bad.cnf")
    assert code == 2 and "out of range" in err


def test_solve(files, capsys):
    code, out, _ = run(capsys, "solve", files / "or.cnf")
    assert code == 0 and out.splitlines() == ["01", "10", "11"]
    code, out, _ = run(capsys, "solve", files / "unsat.cnf")
    assert code == 0 and out == ""


def test_budget_refusal(files, capsys):
    code, _, err = run(capsys, "solve", files / "triangle.col", "--budget", "5")
    assert code == 3 and "27 required" in err


def test_covers_phi1(files, capsys):
    run(capsys, "counterexample", "--output", files / "ce")
    code, out, _ = run(capsys, "covers", files / "ce" / "phi1.cnf")
    frozen = json.loads((__import__("pathlib").Path(__file__).parent / "regression" / "phi1_covers.json").read_text())
    assert code == 0 and len(out.splitlines()) == frozen["count"]


def test_verify_foursat(files, capsys):
    run(capsys, "counterexample", "--output", files / "ce")
    code, out, _ = run(capsys, "verify", "--reduction", "foursat-threesat", files / "ce" / "phi1.cnf", "--checks", "wi")
    report = json.loads(out)
    wi = report["properties"]["witness_isomorphism"]
    assert code == 1 and wi["status"] == "fails"
    assert wi["counts"]["source_witnesses"] == 144 and wi["counts"]["target_witnesses"] > 144


def test_verify_oneink_directory(files, capsys):
    run(capsys, "generate", "--suite", "one-in-three", "--count", "5", "--max-n", "8", "--output", files / "c")
    code, out, _ = run(
        capsys, "verify", "--reduction", "oneink-ksat", "--variant", "exact-one", files / "c", "--tolerance", "exact", "--checks", "wi,overlap"
    )
    bundle = json.loads(out)
    assert code == 0 and len(bundle["reports"]) == 5
    assert all(r["properties"]["witness_isomorphism"]["status"] == "holds" for r in bundle["reports"])


def test_verify_not_applicable_strict(files, capsys):
    args = ["verify", "--reduction", "sat-maxsatstar", files / "or.cnf", "--checks", "cover"]
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args, "--strict")[0] == 1


def test_compose_chain(files, capsys):
    code, out, _ = run(capsys, "compose", "--reduction", "identity", "--reduction", "sat-maxsatstar", files / "or.cnf", "--tolerance", "exact")
    report = json.loads(out)
    assert code == 0 and report["reduction"] == "sat-maxsatstar.identity[cnf]"
    assert report["properties"]["overlap_preservation"]["status"] == "holds"


def test_csv_format(files, capsys):
    code, out, _ = run(capsys, "verify", "--reduction", "sat-maxsatstar", files / "or.cnf", "--format", "csv", "--checks", "overlap")
    assert code == 0 and out.splitlines()[0] == "source_num,source_den,target_num,target_den,multiplicity"
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert sum(int(r[4]) for r in rows) == 3


def test_usage_errors(files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--reduction", "nope", str(files / "or.cnf")])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["solve", str(files / "or.cnf"), "--budget", "0"])
    assert run(capsys, "verify", "--reduction", "kcol-ksat", files / "triangle.col", "--checks", "bogus")[0] == 2
