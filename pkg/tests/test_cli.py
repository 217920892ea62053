import csv
import io
import json
import subprocess
import sys

import pytest

from tamlab.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, Config, InputError, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_local_tamagawa(capsys):
    code, out, _ = run(capsys, "local", "--a4", "-3", "--a6", "-4")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["tamagawa"] == 1
    assert [r["p"] for r in doc["local"]] == [2, 3]


def test_local_single_prime(capsys):
    code, out, _ = run(capsys, "local", "--a4", "0", "--a6", "1", "--p", "5")
    row = json.loads(out)["local"][0]
    assert code == EXIT_OK and row["kodaira"] == "I0" and row["cp"] == 1


@pytest.mark.parametrize("argv", [
    ["local", "--a4", "0", "--a6", "0"],
    ["local", "--a4", "-3", "--a6", "2"],
    ["local", "--a4", "1", "--a6", "1", "--p", "4"],
    ["density", "--p", "2", "--c", "0"],
    ["density"],
    ["series"],
    ["series", "--s", "-2"],
    ["census", "--x", "100000000"],
    ["heights", "--a4", "0", "--a6", "1", "--bound", "0"],
    ["convenient", "--a4", "-3", "--a6", "-4", "--fe-positivity"],
    ["verify", "--suite", "nonsense"],
    ["local", "--a4", "1", "--a6", "1", "--prime-cutoff", "0"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT and err.startswith("tamlab: error:")


def test_density_exact(capsys):
    code, out, _ = run(capsys, "density", "--p", "2", "--c", "1")
    assert code == EXIT_OK and json.loads(out) == [{"p": 2, "c": 1, "delta": "241/396"}]


def test_density_types_csv(capsys):
    code, out, _ = run(capsys, "density", "--p", "3", "--types", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and list(rows[0]) == ["p", "kodaira", "c", "delta_prime", "delta_hat"]
    assert {"p": "3", "kodaira": "IV*", "c": "1", "delta_prime": "7/19683", "delta_hat": "0"} in rows


def test_density_series_and_m(capsys):
    code, out, _ = run(capsys, "density", "--series", "--s", "-1", "--prime-cutoff", "1000")
    row = json.loads(out)[0]
    assert code == EXIT_OK and abs(float(row["L_Tam"]) - 1.8186) < float(row["error_bound"])
    code, out, _ = run(capsys, "density", "--m", "1", "--prime-cutoff", "1000")
    row = json.loads(out)[0]
    assert code == EXIT_OK and abs(float(row["P_Tam"]) - 0.50534) < float(row["error_bound"])


def test_series_rows(capsys):
    code, out, _ = run(capsys, "series", "--m", "1", "2", "--s", "0", "1/2", "--prime-cutoff", "500",
                       "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 4
    assert rows[2]["s"] == "0" and rows[3]["s"] == "1/2"


def test_census_csv_and_json_agree(capsys, tmp_path):
    code, out, _ = run(capsys, "census", "--x", "1000", "--format", "csv", "--shards", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and list(rows[0]) == ["X", "m", "N_m", "N", "ratio"]
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "census", "--x", "1000", "--out", str(path), "--sample-oracle-rate", "0.5")
    doc = json.loads(path.read_text())
    assert code == EXIT_OK and out == ""
    assert {r["m"]: int(r["N_m"]) for r in rows} == {k: v for k, v in doc["tam_histogram"].items()}
    assert doc["oracle_checked"] > 0 and doc["summary"]["N"] == int(rows[0]["N"])


def test_heights_command(capsys):
    code, out, _ = run(capsys, "heights", "--a4", "0", "--a6", "1", "--bound", "10")
    doc = json.loads(out)
    assert code == EXIT_OK and not doc["height_formula_applies"]
    assert len(doc["points"]) == 5 and all(p["canonical"] == 0 for p in doc["points"])
    code, out, _ = run(capsys, "heights", "--a4", "-3", "--a6", "-4", "--bound", "10")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["height_formula_applies"]
    assert all(p["method"] == "local-sum" and p["inequality_holds"] for p in doc["points"])


def test_convenient_command(capsys):
    code, out, _ = run(capsys, "convenient", "--a4", "-3", "--a6", "-4")
    assert code == EXIT_OK and json.loads(out)["case"] == "one-component"
    code, out, _ = run(capsys, "convenient", "--a4", "-7", "--a6", "2", "--fe-positivity")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["case"] == "two-component" and doc["fe_positivity"]["certified"]


def test_verify_exact_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "exact")
    assert code == EXIT_OK and all(ch["passed"] for ch in json.loads(out))
    assert "criterion  1 PASS" in err


def test_verify_failure_exit_code(capsys):
    code, out, err = run(capsys, "verify", "--suite", "series")
    by_number = {ch["criterion"]: ch["passed"] for ch in json.loads(out)}
    assert by_number[4] is True
    assert code == (EXIT_OK if by_number[5] else EXIT_FAIL)


def test_config_validation():
    with pytest.raises(InputError):
        Config(precision_bits=32)
    with pytest.raises(InputError):
        Config(output_format="xml")
    assert Config().output_format == "json"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tamlab", "density", "--p", "3", "--c", "2"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)[0]["delta"] == "510641/6377184"
