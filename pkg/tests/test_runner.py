"""End-to-end tests of the command-line runner."""

import io
import logging
import math

import numpy as np
import orjson
import pytest

from src.core.errors import ScenarioValidationError
from src.core.types import BoundaryCondition
from src.runner import COMMAND_CLASSES, Scenario
from src.runner.cli import main
from src.spectral import birman_schwinger, shooting
from src.spectral.gfun import g
from src.utils.file_utils import read_potential_csv, write_potential_csv


@pytest.fixture(autouse=True)
def _restore_logging():
    """main() reconfigures the root logger; put it back afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


class TestScenario:
    @pytest.mark.parametrize("path,fmt,expected", [
        (None, None, "csv"),
        ("out.json", None, "json"),
        ("out.JSON", None, "json"),
        ("out.json", "csv", "csv"),
        ("out.txt", None, "csv"),
    ])
    def test_resolved_format(self, path, fmt, expected):
        scenario = Scenario(command="curve", output_path=path, format=fmt)
        assert scenario.resolved_format() == expected

    def test_unknown_command(self):
        with pytest.raises(ScenarioValidationError):
            Scenario.from_mapping({"command": "plot"})

    def test_every_command_has_schema(self, config):
        for name, cls in COMMAND_CLASSES.items():
            command = cls(config)
            assert command.get_name() == name
            assert command.get_description()
            assert command.get_input_schema()["type"] == "object"


class TestCurve:
    def test_writes_curve_and_companion(self, tmp_path):
        code, _ = run("curve", "--n", "16", "--out", str(tmp_path / "fig.csv"))
        assert code == 0

        lines = (tmp_path / "fig.csv").read_text().splitlines()
        assert lines[0] == "theta,radius4,re,im"
        assert len(lines) == 17
        line = (tmp_path / "fig_line.csv").read_text().splitlines()
        assert len(line) == 17
        assert all(row.split(",")[1] == "1" for row in line[1:])

    def test_deterministic(self, tmp_path):
        run("curve", "--n", "16", "--out", str(tmp_path / "a.csv"))
        run("curve", "--n", "16", "--out", str(tmp_path / "b.csv"))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a_line.csv").read_bytes() == (tmp_path / "b_line.csv").read_bytes()

    def test_json_companion(self, tmp_path):
        code, _ = run("curve", "--n", "8", "--out", str(tmp_path / "fig.json"))
        assert code == 0
        doc = orjson.loads((tmp_path / "fig_line.json").read_bytes())
        assert doc["command"] == "curve" and doc["status"] == "success"
        assert len(doc["records"]) == 8


class TestVerbs:
    def test_extremal_json(self, tmp_path):
        path = tmp_path / "ext.json"
        code, _ = run("extremal", "--m", "1", "--theta", repr(math.pi / 2), "--out", str(path))
        assert code == 0

        doc = orjson.loads(path.read_bytes())
        record = doc["records"][0]
        assert math.hypot(record["c_re"], record["c_im"]) == pytest.approx(1.0, rel=1e-12)
        assert record["lambda_re"] == pytest.approx(0.0, abs=1e-12)
        assert record["lambda_im"] == pytest.approx(0.25 * g(1.0).value ** 2, rel=1e-12)
        assert record["bs_residual"] <= 1e-10
        assert doc["metadata"]["b"] == record["b"]

    def test_gfun_stdout(self):
        code, text = run("gfun", "--a", "0", "1")
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == "a,g,argmax,attained,lower,upper,large_a"
        zero = lines[1].split(",")
        assert zero[1] == "1" and zero[3] == "false" and zero[2] == ""
        assert float(lines[2].split(",")[1]) == pytest.approx(1.06943, abs=1e-4)

    def test_keller_stdout(self):
        code, text = run("keller", "--gamma", "1")
        assert code == 0
        header, row = text.splitlines()
        assert header == "gamma,keller,cosh_sup,t_star,ratio,exceeds"
        assert float(row.split(",")[1]) == pytest.approx(0.245035, abs=1e-5)
        assert row.endswith("true")

    def test_delta_eigs_whole_line(self):
        code, text = run("delta-eigs", "--bc", "whole-line", "--c-re", "2", "--format", "json")
        assert code == 0
        doc = orjson.loads(text)
        assert doc["records"][0]["lambda_re"] == pytest.approx(-1.0)
        assert doc["records"][0]["margin"] == pytest.approx(0.0, abs=1e-12)

    def test_delta_eigs_dirichlet(self):
        code, text = run("delta-eigs", "--c-re", "4", "--b", "1")
        assert code == 0
        assert len(text.splitlines()) == 2

    def test_shoot_zero_potential(self):
        code, text = run("shoot", "--potential", "zero")
        assert code == 0
        assert text == "lambda_re,lambda_im,modulus,theta\n"

    def test_verify_bs_from_csv(self, tmp_path):
        samples = shooting.gaussian_bumps([2.0], [0.5], [3.0 - 1.0j]).sample(120)
        csv_path = write_potential_csv(tmp_path / "v.csv", samples)

        back = read_potential_csv(csv_path)
        assert np.array_equal(back.nodes, samples.nodes)
        assert np.array_equal(back.values, samples.values)

        out = tmp_path / "bs.csv"
        code, _ = run("verify-bs", "--potential", "csv", "--potential-file", str(csv_path),
                      "--mu", "1", "1", "--mu", "0.5", "-2", "--out", str(out))
        assert code == 0
        rows = out.read_text().splitlines()
        assert len(rows) == 3
        assert all(r.endswith("true") for r in rows[1:])

    def test_verify_bs_honours_configured_iteration_cap(self, tmp_path, monkeypatch):
        user = tmp_path / "user.yaml"
        user.write_text("birman_schwinger:\n  power_max_iter: 3\n")
        monkeypatch.setenv("HS_CONFIG", str(user))
        seen = []
        original = birman_schwinger.verify_norm_bound

        def recording(*args, **kwargs):
            seen.append(kwargs["max_iter"])
            return original(*args, **kwargs)

        monkeypatch.setattr(birman_schwinger, "verify_norm_bound", recording)
        code, _ = run("verify-bs", "--potential", "gaussian-bumps", "--seed", "2", "--mu", "1", "1")
        assert code == 0
        assert seen == [3]

    def test_shoot_output_is_deterministic_and_exact(self, tmp_path):
        samples = shooting.gaussian_bumps([2.0], [0.5], [8.0]).sample(200)
        csv_path = write_potential_csv(tmp_path / "v.csv", samples)
        seeds = [-7.0 + 0.1j, -5.0 + 0.1j, -3.0 + 0.1j, -1.0 + 0.1j]
        argv = ["shoot", "--potential", "csv", "--potential-file", str(csv_path)]
        for z in seeds:
            argv += ["--lambda-seed", repr(z.real), repr(z.imag)]

        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(*argv, "--out", str(first))[0] == 0
        assert run(*argv, "--out", str(second))[0] == 0
        assert first.read_bytes() == second.read_bytes()

        pot = shooting.from_samples(read_potential_csv(csv_path))
        direct = shooting.find_eigenvalues(pot, BoundaryCondition.dirichlet(), seeds)
        again = shooting.find_eigenvalues(pot, BoundaryCondition.dirichlet(), seeds)
        assert direct.eigenvalues == again.eigenvalues

        rows = [line.split(",") for line in first.read_text().splitlines()[1:]]
        assert len(rows) == len(direct) >= 1
        for row, lam in zip(rows, direct):
            assert complex(float(row[0]), float(row[1])) == lam

    def test_run_config(self, tmp_path):
        scenario = {
            "command": "gfun",
            "parameters": {"a": [1.0]},
            "output_path": str(tmp_path / "g.csv"),
        }
        path = tmp_path / "scenario.json"
        path.write_bytes(orjson.dumps(scenario))

        code, _ = run("run", "--config", str(path))
        assert code == 0
        value = float((tmp_path / "g.csv").read_text().splitlines()[1].split(",")[1])
        assert value == pytest.approx(1.06943, abs=1e-4)


class TestExitStatus:
    @pytest.mark.parametrize("argv", [
        ["extremal", "--theta", "1"],
        ["extremal", "--m", "1", "--theta", "7"],
        ["delta-eigs", "--bc", "neumann", "--c-re", "1", "--b", "0.5"],
        ["plot"],
        ["curve", "--n", "1"],
        ["shoot", "--potential", "sech2"],
    ])
    def test_validation_errors(self, argv, capsys):
        code, out = run(*argv)
        assert code == 1
        assert out == ""
        assert capsys.readouterr().err.strip()

    def test_unknown_parameter_in_scenario_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_bytes(orjson.dumps({"command": "curve", "parameters": {"bogus": 1}}))
        code, _ = run("run", "--config", str(path))
        assert code == 1

    def test_missing_scenario_file(self, tmp_path):
        code, _ = run("run", "--config", str(tmp_path / "absent.json"))
        assert code == 1

    def test_audit_failure_exits_two(self, tmp_path, monkeypatch, capsys):
        def failing_audit(potential, bc, seed_grid=None, config=None, nodes=600):
            entry = shooting.AuditEntry(lam=-2.0 + 0.5j, margin=-0.3, certificate=0.2)
            return shooting.AuditReport(potential=potential.name, bc=bc, v_norm=1.0, entries=[entry])

        monkeypatch.setattr(shooting, "enclosure_audit", failing_audit)
        out = tmp_path / "audit.csv"
        code, _ = run("audit", "--potential", "zero", "--out", str(out))

        assert code == 2
        assert "audit failed" in capsys.readouterr().err
        rows = out.read_text().splitlines()
        assert rows[1].endswith("false")

    def test_foreign_exception_exits_two(self, monkeypatch, capsys):
        def broken_search(*args, **kwargs):
            raise ValueError("solver rejected its input")

        monkeypatch.setattr(shooting, "find_eigenvalues", broken_search)
        code, out = run("shoot", "--potential", "zero")

        assert code == 2
        assert out == ""
        assert "unexpected error: solver rejected its input" in capsys.readouterr().err

    def test_audit_passes_for_zero_potential(self):
        code, text = run("audit", "--potential", "zero", "--bc", "robin", "--sigma", "1")
        assert code == 0
        assert text.splitlines() == ["lambda_re,lambda_im,margin,certificate,passed"]


class TestBuildPotential:
    def test_whole_line_reuses_halfline_family(self):
        from src.runner.commands import PotentialParams, build_potential

        params = PotentialParams(potential="gaussian-bumps", seed=3)
        pot = build_potential(params, BoundaryCondition.whole_line())
        assert pot.domain is shooting.Domain.WHOLE_LINE
        assert pot.lower == -pot.support_radius
