"""
Tests for the lck command-line tool.
"""

import json
from unittest.mock import patch

import pytest

from app.core.lck_analysis import V_VANISHES
from app.core.triples import build_abelian_kahler
from app.models.report_models import VerificationSummaryModel
from config.settings import get_settings
from main import main


def _flags(text):
    """First and last token of every unindented line."""
    lines = [line.split() for line in text.splitlines() if line and not line.startswith(" ")]
    return {parts[0]: parts[-1] for parts in lines}


@pytest.fixture
def d4_files(temp_dir):
    algebra, triple = str(temp_dir / "d4.json"), str(temp_dir / "d4_triple.json")
    assert main(["example", "d4", "-o", algebra, "--triple", triple]) == 0
    return algebra, triple


def test_check_d4(d4_files, capsys):
    assert main(["check", d4_files[0]]) == 0
    out = capsys.readouterr().out
    flags = _flags(out)
    assert flags["hermitian"] == "✓"
    assert flags["kahler"] == "✗"
    assert flags["lck"] == "✓"
    assert flags["vaisman"] == "✗"
    assert flags["integrable_lck"] == "✓"
    assert "|theta|^2 = 1, n = 1" in out
    assert "witness:" in out


def test_check_triple_document_as_json(d4_files, capsys):
    assert main(["check", d4_files[1], "--report", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["triple"]["in_a"] is True
    assert data["structure"]["flags"]["unimodular"] is True
    assert data["structure"]["lee"]["norm_sq"] == "1"


def test_check_flat_algebra_shows_note(document_service, temp_dir, capsys):
    path = str(temp_dir / "flat.json")
    document_service.write(document_service.algebra_to_document(*build_abelian_kahler(2, document_service.backend)), path)
    assert main(["check", path]) == 0
    assert V_VANISHES in capsys.readouterr().out


def test_jacobi_violation_exits_with_invariant_code(temp_dir, capsys):
    path = temp_dir / "bad.json"
    path.write_text(json.dumps({
        "dim": 4,
        "brackets": [
            {"i": 0, "j": 1, "terms": [{"k": 2, "coeff": "1"}]},
            {"i": 1, "j": 2, "terms": [{"k": 1, "coeff": "1"}]},
        ],
        "metric": [["1" if i == j else "0" for j in range(4)] for i in range(4)],
        "J": [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]],
    }), encoding="utf-8")
    assert main(["check", str(path)]) == 3
    assert "[invariant]" in capsys.readouterr().err


def test_malformed_json_exits_with_usage_code(temp_dir, capsys):
    path = temp_dir / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert main(["check", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_usage_errors():
    assert main([]) == 2
    assert main(["example", "gb"]) == 2
    assert main(["example", "d4", "--n", "x"]) == 2


def test_example_gb_with_rational_b(temp_dir):
    path = temp_dir / "gb.json"
    assert main(["example", "gb", "--b", "7/2", "-o", str(path)]) == 0
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["dim"] == 4
    coefficients = {term["coeff"] for record in data["brackets"] for term in record["terms"]}
    assert "7/2" in coefficients or "-7/2" in coefficients


def test_example_dim_writes_to_stdout(capsys):
    assert main(["example", "dim", "--n", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["dim"] == 8


def test_example_without_triple(temp_dir):
    assert main(["example", "r2c", "--c", "2", "--triple", str(temp_dir / "t.json")]) == 2


def test_classify4(d4_files, capsys):
    assert main(["classify4", d4_files[1]]) == 0
    assert capsys.readouterr().out == "D4\n"


def test_correspond_round_trip_is_bit_exact(d4_files, temp_dir):
    moved, back = str(temp_dir / "moved.json"), str(temp_dir / "back.json")
    assert main(["correspond", "--to-c", "3", d4_files[1], "-o", moved]) == 0
    assert json.loads(open(moved, encoding="utf-8").read())["c"] == "3"
    assert main(["correspond", "--to-c", "1", moved, "-o", back]) == 0
    assert open(back, encoding="utf-8").read() == open(d4_files[1], encoding="utf-8").read()


def test_semidirect_from_matrices(document_service, temp_dir, capsys):
    h, out = str(temp_dir / "h.json"), str(temp_dir / "product.json")
    document_service.write(document_service.algebra_to_document(*build_abelian_kahler(1, document_service.backend)), h)
    code = main([
        "semidirect", "--c", "1", "--h", h,
        "--u", '[["0", "0"], ["0", "-1"]]',
        "--v", '[["0", "1"], ["0", "0"]]',
        "-o", out,
    ])
    assert code == 0
    assert main(["check", out]) == 0
    assert _flags(capsys.readouterr().out)["integrable_lck"] == "✓"


def test_search_is_deterministic(capsys):
    argv = ["search", "--n", "1", "--c", "1", "--samples", "4", "--seed", "5", "--fix-v-zero"]
    assert main(argv) == 0
    first = capsys.readouterr()
    assert main(argv + ["--workers", "1"]) == 0
    second = capsys.readouterr()
    assert first.out == second.out
    assert len(json.loads(first.out)) >= 1
    assert "hit 0: FamilyGb(" in first.err


def test_search_rejects_negative_samples():
    assert main(["search", "--n", "1", "--c", "1", "--samples", "-1"]) == 2


def test_search_rejects_conflicting_v_options(capsys):
    assert main(["search", "--n", "1", "--c", "1", "--fix-v-zero", "--require-v-nonzero"]) == 2
    assert "both fixed to zero and required nonzero" in capsys.readouterr().err


def test_verify_builders(capsys):
    assert main(["verify-paper", "--only", "builders"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1].startswith("[verify] OK")
    assert "[FAIL]" not in out


def test_verify_by_section(capsys):
    assert main(["verify-paper", "--only", "section3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].startswith("[verify] OK")
    assert all(line.startswith("[PASS] residuals: ") for line in lines[:-1])
    assert len(lines) > 1


def test_verify_failure_exit_code(capsys):
    failing = VerificationSummaryModel(passed=False, total=1, failures=1, first_failure="dim4: x", results=[])
    with patch("app.cli.commands.VerificationService") as service:
        service.return_value.run.return_value = failing
        assert main(["verify-paper", "--report", "json"]) == 1
    assert json.loads(capsys.readouterr().out)["first_failure"] == "dim4: x"


def test_json_logging_goes_to_stderr(d4_files, monkeypatch, capsys):
    monkeypatch.setenv("LOG_FORMAT", "json")
    get_settings.cache_clear()
    capsys.readouterr()
    assert main(["--log-level", "INFO", "classify4", d4_files[1]]) == 0
    captured = capsys.readouterr()
    assert captured.out == "D4\n"
    records = [json.loads(line) for line in captured.err.splitlines() if line.strip()]
    assert any(record["message"] == "Classified dimension-4 triple as D4" for record in records)
    assert all(record["level"] in ("DEBUG", "INFO", "WARNING") for record in records)
