import json
import subprocess
import sys

import pytest

from modcurve.cli import (FIELDS, InvariantRecord, from_csv, from_json, main, to_csv,
                          to_json)

HEADER = ",".join(FIELDS)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_invariants_positional_and_flags(capsys):
    code, out, _ = run(capsys, "invariants", "ns+", "39")
    assert code == 0 and "i=468" in out and "genus=28" in out
    code, out, _ = run(capsys, "invariants", "--family", "x0", "--level", "1", "--format", "csv")
    assert out == HEADER + "\nx0,1,0,1,1,1,1,0,formula\n"


def test_invariants_both_methods(capsys):
    code, out, _ = run(capsys, "invariants", "--family", "arith1", "--m", "2", "--level", "2",
                       "--method", "both")
    assert code == 0
    assert out.splitlines()[-1] == "MATCH" and "genus=0" in out
    assert "[bruteforce]" in out and "[formula]" in out


def test_invariants_json(capsys):
    code, out, _ = run(capsys, "invariants", "ns*", "39", "--format", "json")
    (rec,) = json.loads(out)
    assert rec["psl2_index"] == 234 and rec["genus"] == 13 and rec["m"] == 0


@pytest.mark.parametrize("argv", [
    ["invariants", "x9", "5"],
    ["invariants", "arith1", "3"],
    ["invariants", "s4", "9"],
    ["invariants", "x0"],
    ["invariants", "x0", "0"],
    ["invariants", "--family", "x0", "x1", "3"],
    ["invariants", "xfull", "300", "--method", "bruteforce"],
    ["invariants", "x0", "30", "--method", "bruteforce", "--max-sl2-elements", "100"],
    ["verify", "--max-level", "0"],
    ["table", "--min-level", "5", "--max-level", "3"],
    ["table", "--families", "x0,q"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 1


def test_table_x0(capsys):
    code, out, _ = run(capsys, "table", "--families", "x0", "--max-level", "12")
    lines = out.splitlines()
    assert code == 0 and lines[0] == HEADER and len(lines) == 13
    assert lines[11] == "x0,11,0,12,0,0,2,1,formula"


def test_table_ns_star_row(capsys):
    _, out, _ = run(capsys, "table", "--families", "ns*", "--min-level", "39",
                    "--max-level", "39")
    assert out.splitlines()[1] == "ns*,39,0,234,18,0,6,13,formula"


def test_table_empty_family_set(capsys):
    code, out, _ = run(capsys, "table", "--families", "")
    assert code == 0 and out == HEADER + "\n"


def test_table_csv_json_round_trip_and_determinism(tmp_path, capsys):
    csv_path, json_path = tmp_path / "t.csv", tmp_path / "t.json"
    args = ["table", "--families", "all", "--max-level", "10"]
    assert main([*args, "--out", str(csv_path)]) == 0
    assert main([*args, "--format", "json", "--out", str(json_path)]) == 0
    a, b = from_csv(csv_path.read_text()), from_json(json_path.read_text())
    assert a == b and len(a) > 100
    assert to_csv(a) == csv_path.read_text() and to_json(b) == json_path.read_text()
    assert b"\r" not in csv_path.read_bytes()
    again = tmp_path / "again.csv"
    main([*args, "--out", str(again)])
    assert again.read_bytes() == csv_path.read_bytes()


def test_table_bruteforce_matches_formula(capsys):
    _, f, _ = run(capsys, "table", "--families", "sp+,ns*", "--max-level", "9")
    _, b, _ = run(capsys, "table", "--families", "sp+,ns*", "--max-level", "9",
                  "--method", "bruteforce", "--backend", "numpy")
    strip = [line.rsplit(",", 1)[0] for line in f.splitlines()[1:]]
    assert strip == [line.rsplit(",", 1)[0] for line in b.splitlines()[1:]]


def test_table_unwritable_path(capsys, tmp_path):
    code, _, err = run(capsys, "table", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 1 and "cannot write" in err


def test_record_parsing_rejects_garbage():
    good = dict(zip(FIELDS, ["x0", "11", "0", "12", "0", "0", "2", "1", "formula"]))
    assert InvariantRecord.from_mapping(good).counts == (12, 0, 0, 2, 1)
    with pytest.raises(ValueError):
        InvariantRecord.from_mapping({**good, "nu2": "two"})
    with pytest.raises(ValueError):
        InvariantRecord.from_mapping({k: v for k, v in good.items() if k != "genus"})
    with pytest.raises(ValueError):
        InvariantRecord.from_mapping({**good, "level": True})


def test_verify_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--max-level", "20")
    assert code == 0 and "0 mismatched" in out
    code, out, _ = run(capsys, "verify", "--families", "s4", "--max-level", "13")
    assert code == 0 and "checked 4" in out
    report = tmp_path / "r.json"
    run(capsys, "verify", "--families", "ns+", "--max-level", "8", "--json", str(report))
    first = report.read_bytes()
    run(capsys, "verify", "--families", "ns+", "--max-level", "8", "--json", str(report),
        "--workers", "3")
    assert report.read_bytes() == first


def test_verify_reports_engine_failures(capsys):
    code, _, err = run(capsys, "verify", "--families", "xfull", "--max-level", "8",
                       "--max-sl2-elements", "200")
    assert code == 2 and "CapExceeded" in err


def _ref(tmp_path, *rows, header=True):
    path = tmp_path / "ref.csv"
    path.write_text("".join(f"{r}\n" for r in ([HEADER] if header else []) + list(rows)))
    return str(path)


def test_compare_agree(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", _ref(tmp_path, "ns+,39,0,468,24,0,12,28,formula"))
    assert code == 0 and "1 agree" in out


def test_compare_disagree(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", _ref(tmp_path, "ns+,39,0,468,24,0,12,27,formula",
                                               "x0,11,0,12,0,0,2,1,formula"))
    assert code == 3 and "line 2: DISAGREE" in out and "1 agree, 1 disagree" in out


def test_compare_empty_file(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, out, _ = run(capsys, "compare", str(path))
    assert code == 0 and "compared 0" in out


def test_compare_malformed_and_unknown(capsys, tmp_path):
    code, out, err = run(capsys, "compare", _ref(
        tmp_path, "x0,11,0,12,0,0,2,1,formula", "zz,1,0,1,1,1,1,0,formula",
        "x0,abc,0,1,1,1,1,0,formula", "s4,9,0,1,1,1,1,0,formula", "x0,3"))
    assert "line 3: warning: unknown family" in err
    assert "line 4:" in err and "line 5:" in err and "line 6:" in err
    assert code == 1 and "1 agree" in out


def test_compare_bad_header(capsys, tmp_path):
    code, _, err = run(capsys, "compare", _ref(tmp_path, "x0,1", header=False))
    assert code == 1 and "bad header" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "modcurve", "invariants", "x0", "11"],
                         capture_output=True, text=True, check=True).stdout
    assert "genus=1" in out
