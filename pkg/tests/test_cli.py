"""Tests for the command-line interface."""

import json
from unittest.mock import patch

from typer.testing import CliRunner

from flowlab import __version__, config
from flowlab.cli import app
from flowlab.errors import CertificateViolation

runner = CliRunner()

BINOM = """\
P = [[1.0, 1.0]]
Q = [[2.0, 1.0]]

[params]
alpha = 0.6
beta = 0.3
L = 3
"""


class TestVersion:
    """Tests for the version flag."""

    def test_version(self):
        """--version prints the version and exits 0."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert f"Flowlab version {__version__}" in result.output

    def test_single_version_source(self, write_file):
        """Reports and --version share __version__; config holds no copy."""
        assert not hasattr(config, "VERSION")
        path = write_file("binom.toml", BINOM)
        result = runner.invoke(app, ["pipeline", str(path), "--op", "binomcheck"])
        assert json.loads(result.output)["provenance"]["version"] == __version__


class TestCommands:
    """Tests for the analysis subcommands."""

    def test_report_to_stdout(self, write_file):
        """Without --out the JSON report goes to stdout."""
        path = write_file("binom.toml", BINOM)
        result = runner.invoke(app, ["pipeline", str(path), "--op", "binomcheck"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["results"]["K"] == 3
        assert payload["certificates"][0]["name"] == "binomial"

    def test_report_to_file(self, write_file, tmp_path):
        """--out writes the report and prints a summary."""
        path = write_file("binom.toml", BINOM)
        out = tmp_path / "reports" / "binom.json"
        result = runner.invoke(
            app, ["pipeline", str(path), "--op", "binomcheck", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert "Report written to" in result.output
        assert json.loads(out.read_text())["config"]["op"] == "binomcheck"

    def test_csv_export(self, write_file, tmp_path):
        """--csv writes one file per series."""
        path = write_file("binom.toml", BINOM)
        csv_dir = tmp_path / "csv"
        result = runner.invoke(
            app,
            [
                "pipeline",
                str(path),
                "--op",
                "binomcheck",
                "--out",
                str(tmp_path / "r.json"),
                "--csv",
                str(csv_dir),
            ],
        )
        assert result.exit_code == 0
        assert (csv_dir / "01_binomial.csv").exists()

    def test_set_override(self, write_file):
        """--set overrides the document's parameters."""
        path = write_file("binom.toml", BINOM)
        result = runner.invoke(
            app, ["pipeline", str(path), "--op", "binomcheck", "--set", "L=6"]
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["config"]["params"] == {"L": 6}

    def test_metric(self, write_file):
        """metric takes two files and a kind."""
        first = write_file("a.json", '{"atoms": [[0, 0.5], [1, 0.5]]}')
        second = write_file("b.json", '{"atoms": [[0, 0.25], [1, 0.75]]}')
        result = runner.invoke(app, ["metric", str(first), str(second), "--kind", "tv"])
        assert result.exit_code == 0
        assert json.loads(result.output)["results"]["total_variation"] == 0.5


class TestExitCodes:
    """Tests for error reporting."""

    def test_malformed_toml(self, write_file):
        """Malformed input exits 1."""
        path = write_file("bad.toml", "alpha = = 1\n")
        result = runner.invoke(app, ["pipeline", str(path), "--op", "binomcheck"])
        assert result.exit_code == 1
        assert "Error" in result.output

    def test_unknown_operation(self, write_file):
        """Unknown operations exit 1."""
        path = write_file("binom.toml", BINOM)
        result = runner.invoke(app, ["pipeline", str(path), "--op", "nope"])
        assert result.exit_code == 1
        assert "unknown operation" in result.output

    def test_missing_input(self, tmp_path):
        """A missing input file exits 1."""
        result = runner.invoke(app, ["tail", str(tmp_path / "absent.toml"), "--op", "eigen"])
        assert result.exit_code == 1

    def test_domain_error(self, write_file):
        """Violated preconditions exit 1."""
        path = write_file("binom.toml", BINOM)
        result = runner.invoke(
            app, ["pipeline", str(path), "--op", "binomcheck", "--set", "beta=0.9"]
        )
        assert result.exit_code == 1

    def test_certificate_violation(self, write_file):
        """Certificate violations exit 2."""
        path = write_file("binom.toml", BINOM)
        with patch("flowlab.cli.run", side_effect=CertificateViolation("term above bound")):
            result = runner.invoke(app, ["pipeline", str(path), "--op", "binomcheck"])
        assert result.exit_code == 2
        assert "Certificate violation" in result.output


class TestBatch:
    """Tests for the run command."""

    def test_batch(self, write_file, tmp_path):
        """Batch jobs run and write their reports."""
        write_file("binom.toml", BINOM)
        batch = write_file(
            "batch.toml",
            '[[job]]\ncommand = "pipeline"\nop = "binomcheck"\n'
            'input = "binom.toml"\nout = "out/b.json"\n',
        )
        result = runner.invoke(app, ["run", str(batch)])
        assert result.exit_code == 0
        assert (tmp_path / "out" / "b.json").exists()
        assert "Batch: batch.toml" in result.output

    def test_batch_failure(self, write_file):
        """A failing job sets the exit code."""
        batch = write_file(
            "batch.toml",
            '[[job]]\ncommand = "pipeline"\nop = "binomcheck"\ninput = "missing.toml"\n',
        )
        result = runner.invoke(app, ["run", str(batch)])
        assert result.exit_code == 1
