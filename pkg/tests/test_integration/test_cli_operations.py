import json

import pytest
from typer.testing import CliRunner

from toroidal.catalog import get_example
from toroidal.main import app
from toroidal.schemas.etd import EtdFile
from toroidal.schemas.report import Report


class TestCliOperations:
    """
    Exit codes, reports and input diagnostics of the toroidal command
    """

    @pytest.fixture
    def runner(self) -> CliRunner:
        return CliRunner()

    @staticmethod
    def report(result) -> dict:
        return json.loads(result.stdout)

    def test_validate(self, runner):
        result = runner.invoke(app, ["validate", "--example", "xytw", "--window", "6"])

        assert result.exit_code == 0, result.output
        report = self.report(result)
        assert report["command"] == "validate"
        assert report["input_fingerprint"] == get_example("xytw").fingerprint()
        assert [v["name"] for v in report["verdicts"]] == ["etd_axioms", "cover"]
        assert report["dims"]["vertical"] == [0, 2]
        assert report["dims"]["unused"] == [1, 3]
        assert report["dims"]["log_smooth"] is False
        assert len(report["witnesses"]) == 10, "One row per face of P"

    def test_global_window(self, runner):
        result = runner.invoke(app, ["--window", "5", "validate", "--example", "a1"])

        assert result.exit_code == 0, result.output
        assert self.report(result)["arguments"] == {"window": 5}

    def test_validate_file(self, runner, tmp_path):
        path = tmp_path / "quadrant.yaml"
        path.write_text(
            "name: quadrant\nambient_rank: 2\np_generators: [[1, 0], [0, 1]]\nfacets: max\n"
        )
        result = runner.invoke(app, ["validate", str(path), "--window", "4"])

        assert result.exit_code == 0, result.output
        assert self.report(result)["etd"] == "quadrant"

    def test_malformed_json(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"ambient_rank": 2,\n "p_generators": [[1, 0]\n')
        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 2
        assert "not valid JSON" in result.stderr
        assert '"line":' in result.stderr

    def test_schema_violation(self, runner, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"ambient_rank": 2, "p_generators": [[1, 0], [0, 1, 0]]}))
        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 2
        assert "p_generators" in result.stderr

    def test_missing_input(self, runner):
        result = runner.invoke(app, ["validate"])

        assert result.exit_code == 2
        assert "--example" in result.stderr

    def test_failed_validation_prints_a_witness(self, runner, tmp_path):
        path = tmp_path / "steep.json"
        path.write_text(
            json.dumps(
                {
                    "ambient_rank": 2,
                    "p_generators": [[1, 0], [0, 1]],
                    "q_generators": [[1, 2]],
                    "window": 4,
                }
            )
        )
        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 1
        report = self.report(result)
        assert report["verdicts"][0]["name"] == "BasisNotFaceUnionError"
        assert report["witnesses"][0]["point"] == [1, 1]

    def test_basechange(self, runner):
        result = runner.invoke(
            app, ["basechange", "--example", "bacha", "--primes", "2,3,5"]
        )

        assert result.exit_code == 1, "bacha fails in characteristic 2"
        assert "Unexpected error" not in result.stderr
        report = self.report(result)
        assert report["dims"]["p0"] == 3
        assert report["dims"]["failed_primes"] == [2]
        assert report["dims"]["passed_primes"] == [3, 5]
        assert {w["prime"] for w in report["witnesses"]} == {2}

    def test_reports_are_deterministic(self, runner):
        for args in (
            ["validate", "--example", "xytw", "--window", "6"],
            ["basechange", "--example", "bacha", "--primes", "2,3"],
            ["frobenius", "--example", "a1", "--p", "3", "--window", "6"],
        ):
            first, second = runner.invoke(app, args), runner.invoke(app, args)
            digests = {Report.model_validate_json(r.stdout).digest() for r in (first, second)}
            assert len(digests) == 1, f"{args[0]} differs between runs"

    def test_basechange_rejects_composites(self, runner):
        result = runner.invoke(app, ["basechange", "--example", "bacha", "--primes", "2,4"])

        assert result.exit_code == 2

    def test_wforms(self, runner):
        result = runner.invoke(app, ["wforms", "--example", "xytw", "--window", "4"])

        assert result.exit_code == 0, result.output
        rows = {
            tuple(row["face"]): row
            for row in self.report(result)["witnesses"]
            if "relative_rank" in row
        }
        assert rows[(0,)]["relative_rank"] == 1
        assert rows[(3,)]["relative_rank"] == 2
        assert rows[()]["relative_rank"] == 0
        assert rows[(0,)]["ring"] == "ZZ"

    def test_frobenius(self, runner):
        result = runner.invoke(app, ["frobenius", "--example", "a1", "--p", "2", "--window", "8"])

        assert result.exit_code == 0, result.output
        names = [v["name"] for v in self.report(result)["verdicts"]]
        assert names == ["frobenius_map", "cartier", "vanishing_iff_pE"]

        composite = runner.invoke(app, ["frobenius", "--example", "a1", "--p", "4"])
        assert composite.exit_code == 2

    def test_kcomplex(self, runner):
        args = ["kcomplex", "--example", "a1", "--mt", "1", "--window", "6", "--ubound", "6"]

        assert runner.invoke(app, args).exit_code == 0
        corrupted = runner.invoke(app, args + ["--corrupt"])
        assert corrupted.exit_code == 1, corrupted.stderr
        assert not self.report(corrupted)["verdicts"][0]["passed"]
        stable = runner.invoke(app, args + ["--stability"])
        assert stable.exit_code == 0, stable.output
        assert "ubound_stable" in [v["name"] for v in self.report(stable)["verdicts"]]

    def test_hodge(self, runner):
        result = runner.invoke(
            app, ["hodge", "--example", "bacha", "--char", "2", "--window", "6"]
        )

        assert result.exit_code == 0, result.output
        report = self.report(result)
        assert report["dims"]["totals"] == report["dims"]["predicted"]

    def test_simplex(self, runner):
        result = runner.invoke(app, ["simplex", "--edges", "1,0,0;0,1,0;1,1,2"])

        assert result.exit_code == 0, result.output
        dims = self.report(result)["dims"]
        assert dims["elementary"] is True
        assert dims["standard"] is False

    def test_catalog_and_export(self, runner, tmp_path):
        result = runner.invoke(app, ["catalog"])
        assert result.exit_code == 0
        names = [w["name"] for w in self.report(result)["witnesses"]]
        assert names == ["a1", "bacha", "danilov-pair", "xytw"]

        target = tmp_path / "a1.json"
        exported = runner.invoke(app, ["export", "--example", "a1", "-o", str(target)])
        assert exported.exit_code == 0
        restored = EtdFile.model_validate_json(target.read_text())
        assert restored.fingerprint() == get_example("a1").fingerprint()

    def test_schema(self, runner):
        result = runner.invoke(app, ["schema", "etd"])
        assert result.exit_code == 0
        assert "p_generators" in json.loads(result.stdout)["properties"]

        assert runner.invoke(app, ["schema", "bogus"]).exit_code == 2

    def test_output_formats(self, runner):
        csv_result = runner.invoke(
            app, ["--format", "csv", "validate", "--example", "a1", "--window", "4"]
        )
        assert csv_result.exit_code == 0
        assert csv_result.stdout.splitlines()[0] == "face,rank,facets,essential,bad,chart"

        text_result = runner.invoke(
            app, ["--format", "text", "validate", "--example", "a1", "--window", "4"]
        )
        assert text_result.exit_code == 0
        assert "etd_axioms" in text_result.stdout
