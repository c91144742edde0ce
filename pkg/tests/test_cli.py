import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from eisprod.cli import main
from eisprod.eisenstein import eisenstein_family
from eisprod.qseries import QExpansion, eta_quotient
from eisprod.solver import ExpressionCertificate


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def delta_file(tmp_path):
    p = tmp_path / "delta.json"
    p.write_text(json.dumps(eta_quotient([(1, 24)], 12).to_json()))
    return p


def test_eisenstein_example(capsys):
    code, out, _ = run(["eisenstein", "--weight", "4", "--level", "1", "--index", "0,0", "--prec", "3"], capsys)
    assert code == 0
    f = QExpansion.from_json(json.loads(out)["expansion"])
    coeffs = [f[m].coords[0] for m in range(3)]
    assert [c / coeffs[0] for c in coeffs] == [1, 240, 2160]


def test_bounds_example(capsys):
    code, out, _ = run(["bounds", "--k", "4", "--l", "8", "--level", "1", "--generated"], capsys)
    assert code == 0
    assert json.loads(out)["N0"] == 1


def test_bounds_not_explicit(capsys):
    code, out, _ = run(["bounds", "--k", "1", "--l", "1", "--level", "5", "--generated"], capsys)
    assert code == 0
    assert json.loads(out)["N0"] == "NotExplicit"


def test_express_delta_example(delta_file, tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code, _, _ = run(["express", "--target", str(delta_file), "--k", "4", "--l", "8", "--level-products", "1",
                      "--level-eis", "1", "-o", str(out_path)], capsys)
    assert code == 0
    data = json.loads(out_path.read_text())
    assert sorted(c for _, c in data["classical_terms"]) == ["-691/432000", "691/432000"]
    # round trip through the reader is bit-exact
    assert ExpressionCertificate.from_json(data).to_json() == data

    code, out, _ = run(["cusps", "--certificate", str(out_path), "--gamma", "0,-1,1,0", "--prec", "5"], capsys)
    assert code == 0
    (item,) = json.loads(out)["cusps"]
    assert QExpansion.from_json(item["expansion"]) == eta_quotient([(1, 24)], 5)


def test_no_solution_exit_2(delta_file, capsys):
    code, out, err = run(["express", "--target", str(delta_file), "--k", "4", "--l", "8",
                          "--level-products", "1"], capsys)
    assert code == 2
    assert json.loads(out)["status"] == "no_solution"
    assert "no solution" in err


def test_tampered_certificate_exit_3(delta_file, tmp_path, capsys):
    cert_path = tmp_path / "cert.json"
    assert run(["express", "--target", str(delta_file), "--k", "4", "--l", "8", "--level-products", "1",
                "--level-eis", "1", "-o", str(cert_path)], capsys)[0] == 0
    data = json.loads(cert_path.read_text())
    term = data["product_terms"][0]
    term[2]["coords"][0] = str(Fraction(term[2]["coords"][0]) + 1)
    cert_path.write_text(json.dumps(data))
    code, _, err = run(["cusps", "--certificate", str(cert_path), "--gamma", "1,0,0,1"], capsys)
    assert code == 3
    assert "verification" in err


@pytest.mark.parametrize("argv,field", [
    (["eisenstein", "--weight", "4", "--level", "1", "--index", "0", "--prec", "3"], "--index"),
    (["eisenstein", "--weight", "0", "--level", "1", "--index", "0,0", "--prec", "3"], "weight"),
    (["bounds", "--k", "x", "--l", "8", "--level", "1"], "k"),
    (["cusps", "--certificate", "/nonexistent.json", "--all-cusps"], "--certificate"),
    (["frobnicate"], "frobnicate"),
    (["bounds", "--k", "1", "--l", "1", "--level", "1", "--bogus"], "--bogus"),
])
def test_malformed_exit_1(argv, field, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert field in err


def test_malformed_target_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = run(["express", "--target", str(p), "--k", "4", "--l", "8", "--level-products", "1"], capsys)
    assert code == 1 and "--target" in err
    p.write_text(json.dumps({"width": 1}))
    code, _, err = run(["express", "--target", str(p), "--k", "4", "--l", "8", "--level-products", "1"], capsys)
    assert code == 1 and "--target" in err


def test_short_target_exit_1(tmp_path, capsys):
    p = tmp_path / "short.json"
    p.write_text(json.dumps(eta_quotient([(1, 24)], 2).to_json()))
    code, _, err = run(["express", "--target", str(p), "--k", "4", "--l", "8", "--level-products", "1",
                        "--level-eis", "1"], capsys)
    assert code == 1 and "--target" in err


def test_rank_and_family(tmp_path, capsys):
    code, out, _ = run(["rank", "--weight", "4", "--level", "2", "--cache-dir", str(tmp_path)], capsys)
    assert code == 0 and json.loads(out)["rank"] == 3
    code, out, _ = run(["rank", "--weight", "2", "--level", "1", "--constant-terms"], capsys)
    assert code == 0 and json.loads(out)["constant_term_rank"] == 0
    code, out, _ = run(["family", "--weight", "3", "--level", "3", "--prec", "10", "--cache-dir", str(tmp_path)],
                       capsys)
    assert code == 0
    assert os.path.exists(json.loads(out)["cache_file"])


def test_family_json_round_trip(tmp_path, capsys):
    code, out, _ = run(["eisenstein", "--weight", "3", "--level", "4", "--index", "1,3", "--prec", "9"], capsys)
    assert code == 0
    doc = json.loads(out)["expansion"]
    assert QExpansion.from_json(doc).to_json() == doc
    assert QExpansion.from_json(doc) == eisenstein_family(3, 4, 9)[(1, 3)]


def test_cold_and_warm_cache_identical(tmp_path, capsys):
    cache = tmp_path / "cache"
    argv = ["eisenstein", "--weight", "5", "--level", "3", "--index", "1,1", "--prec", "20", "--cache-dir", str(cache)]
    code1, cold, _ = run(argv, capsys)
    assert os.listdir(cache)
    code2, warm, _ = run(argv, capsys)
    code3, nocache, _ = run(argv[:-2] + ["--no-cache"], capsys)
    assert code1 == code2 == code3 == 0
    assert cold == warm == nocache
    # a larger cached truncation serves a smaller request
    code4, small, _ = run(argv[:-4] + ["--prec", "7", "--cache-dir", str(cache)], capsys)
    code5, small_cold, _ = run(argv[:-4] + ["--prec", "7", "--no-cache"], capsys)
    assert small == small_cold


def test_check_parity(capsys):
    code, out, _ = run(["check", "--suite", "parity"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_console_script(tmp_path):
    env = dict(os.environ, EISPROD_CACHE_DIR=str(tmp_path))
    r = subprocess.run([sys.executable, "-m", "eisprod.cli", "bounds", "--k", "12", "--l", "4", "--level", "1"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0
    assert json.loads(r.stdout)["B"] == {"B(16,1)": 2}
    r = subprocess.run([sys.executable, "-m", "eisprod.cli", "bounds"], capture_output=True, text=True, env=env)
    assert r.returncode == 1
