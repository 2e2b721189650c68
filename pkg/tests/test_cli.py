"""CLI: subcommands, exit codes, structured errors, report round-trip."""

import json
import os

import pytest

from parahiggs.cli import run
from parahiggs.corpus import ex1_document, exn_document


@pytest.fixture()
def ex1_path(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(ex1_document()))
    return str(path)


@pytest.fixture()
def exn_path(tmp_path):
    path = tmp_path / "exn.json"
    path.write_text(json.dumps(exn_document()))
    return str(path)


class TestExitCodes:
    def test_verify_ex1_success(self, ex1_path, tmp_path):
        out = tmp_path / "report.json"
        assert run(["verify", ex1_path, "--depth", "2", "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["verification"]["all_pass"]

    def test_transform_exn_domain_error(self, exn_path, capsys):
        assert run(["transform", exn_path]) == 1
        err = capsys.readouterr().err
        doc = json.loads(err)
        assert doc["error"]["type"] == "AssumptionViolated"
        assert doc["error"]["witness"]["failures"][0]["item"] == 2

    def test_verify_exn_exit_one(self, exn_path, tmp_path):
        out = tmp_path / "r.json"
        assert run(["verify", exn_path, "--depth", "2", "-o", str(out)]) == 1

    def test_malformed_json_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["validate", str(bad)]) == 2

    def test_bad_expression_usage_error(self, tmp_path):
        doc = ex1_document()
        doc["higgs"][0][0] = "q + 1"
        path = tmp_path / "bad_expr.json"
        path.write_text(json.dumps(doc))
        assert run(["validate", str(path)]) == 2

    def test_missing_file(self, capsys):
        assert run(["validate", "/nonexistent/input.json"]) == 2


class TestSubcommands:
    def test_validate(self, ex1_path, tmp_path):
        out = tmp_path / "v.json"
        assert run(["validate", ex1_path, "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["validation"]["assumptions"]["ok"]

    def test_residues(self, ex1_path, tmp_path):
        out = tmp_path / "r.json"
        assert run(["residues", ex1_path, "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert "frame_table" in doc["residues"]
        assert doc["residues"]["k_convention"] == "uniform"

    def test_spectral_with_samples(self, ex1_path, tmp_path):
        out = tmp_path / "s.json"
        csv = tmp_path / "s.csv"
        assert (
            run(
                [
                    "spectral",
                    ex1_path,
                    "-o",
                    str(out),
                    "--emit-curve-samples",
                    "10",
                    "--samples-output",
                    str(csv),
                ]
            )
            == 0
        )
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "z_re,z_im,zeta_re,zeta_im"
        assert len(lines) == 11

    def test_transform_and_parabolic(self, ex1_path, tmp_path):
        out = tmp_path / "t.json"
        assert run(["transform", ex1_path, "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["transform"]["rank"] == 2
        assert doc["transform"]["transformed_punctures"] == ["-1", "1"]
        out2 = tmp_path / "p.json"
        assert run(["parabolic", ex1_path, "-o", str(out2)]) == 0
        doc2 = json.loads(out2.read_text())
        assert doc2["parabolic"]["checks"]["residues_preserve_flags"]

    def test_text_format(self, ex1_path, tmp_path, capsys):
        assert run(["verify", ex1_path, "--depth", "2", "--format", "text"]) == 0
        text = capsys.readouterr().out
        assert "all-pass" in text


class TestRoundTrip:
    def test_report_reingested_identical(self, ex1_path, tmp_path):
        first = tmp_path / "report1.json"
        second = tmp_path / "report2.json"
        assert run(["report", ex1_path, "--depth", "2", "-o", str(first)]) == 0
        assert run(["report", str(first), "--depth", "2", "-o", str(second)]) == 0
        assert json.loads(first.read_text()) == json.loads(second.read_text())
