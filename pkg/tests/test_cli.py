import json
import math
import os
import re
import subprocess
import sys
from pathlib import Path

import pytest

from zenopath import ProtocolReport
from zenopath.cli import main
from zenopath.configio import load_toml, parse_experiment, parse_instance
from zenopath.errors import ConfigError

ROTATING = """
[instance]
family = "rotating-projector"
total_angle = 1.5707963267948966

[protocol]
epsilon = 0.1
N = 25
seed = 7

[outputs]
formats = ["json", "csv"]
"""

CONSTANT_EXPLICIT = """
[instance]
family = "explicit"

[instance.hamiltonian]
n_qubits = 1

[[instance.hamiltonian.terms]]
support = [0]
generator = "matrix"
real = [[0.0, 0.0], [0.0, 1.0]]
weight = 1.0

[protocol]
epsilon = 0.2
N = 3
"""

GAPLESS = """
[instance]
family = "explicit"

[instance.hamiltonian]
n_qubits = 1

[[instance.hamiltonian.terms]]
support = [0]
generator = "matrix"
real = [[0.0, 0.0], [0.0, 0.0]]
weight = 1.0
"""

UNSAT = """
[instance]
family = "sat-projector"
n_vars = 1
clauses = [[1], [-1]]
"""

FRUSTRATED_MEASURED = """
[instance]
family = "stabilizer-path"
n_qubits = 2
generators_initial = ["XI", "IX"]
generators_final = ["ZZ", "XX"]

[protocol]
epsilon = 0.05
delta = 0.05
N = 10
"""

EXPLICIT_PATH = """
[instance]
family = "explicit"
path_kind = "linear"

[instance.initial]
n_qubits = 2

[[instance.initial.terms]]
support = [0]
generator = "computational-projector"
bits = "1"
weight = 0.5

[[instance.initial.terms]]
support = [0, 1]
generator = "pauli-projector"
pauli = "ZZ"
weight = 0.5

[instance.final]
n_qubits = 2

[[instance.final.terms]]
support = [0]
generator = "computational-projector"
bits = "1"
weight = 1.0

[protocol]
epsilon = 0.2
N = 4
"""


def write(tmp_path, name, text):
    target = tmp_path / name
    target.write_text(text)
    return str(target)


class TestVerify:
    def test_rotating_passes(self, tmp_path, capsys):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        code = main(["verify", "--config", cfg, "--samples", "17", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "frustration_free=pass" in out
        report = json.loads((tmp_path / "ff_report.json").read_text())
        assert report["passed"] is True
        assert report["n_samples"] == 17

    def test_unsat_instance_fails(self, tmp_path):
        cfg = write(tmp_path, "unsat.toml", UNSAT)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_malformed_file(self, tmp_path):
        cfg = write(tmp_path, "bad.toml", "[instance\nfamily=")
        assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "nope.toml")]) == 1

    def test_usage_error(self):
        assert main(["verify"]) == 1


class TestSchedule:
    def test_rotating(self, tmp_path, capsys):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        code = main(["schedule", "--config", cfg, "--epsilon", "0.1", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "N=25" in out
        time_scale = float(re.search(r"conventional_time=(\S+)", out).group(1))
        assert time_scale == pytest.approx(1 / math.sin(math.pi / 50), abs=1e-9)
        lines = (tmp_path / "schedule.csv").read_text().splitlines()
        assert lines[0] == "n,s,gap,delta_norm,ratio"
        assert len(lines) == 26
        first = lines[1].split(",")
        assert int(first[0]) == 1
        assert float(first[2]) == pytest.approx(1.0)
        assert float(first[3]) == pytest.approx(math.sin(math.pi / 50), abs=1e-12)

    def test_constant_path(self, tmp_path, capsys):
        cfg = write(tmp_path, "const.toml", CONSTANT_EXPLICIT)
        code = main(["schedule", "--config", cfg, "--epsilon", "0.5", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "N=1" in out
        assert "conventional_time=nan" in out

    def test_gapless_exits_3(self, tmp_path):
        cfg = write(tmp_path, "gapless.toml", GAPLESS)
        assert main(["schedule", "--config", cfg, "--epsilon", "0.1", "--out", str(tmp_path)]) == 3


class TestRun:
    def test_rotating_ideal_summary(self, tmp_path, capsys):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        code = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert code == 0
        line = capsys.readouterr().out.strip().splitlines()[-1]
        match = re.fullmatch(
            r"success_exact=(\S+) bound=(\S+) N=(\d+) mode=(\S+) seed=(\d+)", line
        )
        assert match
        assert float(match.group(1)) == pytest.approx(math.cos(math.pi / 50) ** 50, abs=1e-9)
        assert float(match.group(2)) == pytest.approx(1 - 25 * math.sin(math.pi / 50) ** 2, abs=1e-9)
        assert match.group(3) == "25"
        assert match.group(5) == "7"

    def test_constant_run_succeeds(self, tmp_path, capsys):
        cfg = write(tmp_path, "const.toml", CONSTANT_EXPLICIT)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        assert "success_exact=1.0" in capsys.readouterr().out

    def test_explicit_path_runs(self, tmp_path, capsys):
        cfg = write(tmp_path, "path.toml", EXPLICIT_PATH)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["report"]["N_used"] == 4

    def test_emitted_json_round_trips(self, tmp_path):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        payload = json.loads((tmp_path / "out" / "report.json").read_text())
        parsed = ProtocolReport.from_dict(payload["report"])
        assert parsed.to_dict() == payload["report"]

    def test_deterministic_outputs(self, tmp_path):
        cfg = write(
            tmp_path,
            "traj.toml",
            ROTATING.replace("N = 25", "N = 25\ndelta = 0.05\nmode = \"both\"\ntrajectories = 200"),
        )
        main(["run", "--config", cfg, "--out", str(tmp_path / "a")])
        main(["run", "--config", cfg, "--out", str(tmp_path / "b")])
        csv_a = (tmp_path / "a" / "steps.csv").read_bytes()
        csv_b = (tmp_path / "b" / "steps.csv").read_bytes()
        assert csv_a == csv_b
        report_a = json.loads((tmp_path / "a" / "report.json").read_text())
        report_b = json.loads((tmp_path / "b" / "report.json").read_text())
        report_a.pop("timestamp")
        report_b.pop("timestamp")
        assert report_a == report_b

    def test_seed_override_changes_trajectories(self, tmp_path):
        cfg = write(
            tmp_path,
            "traj.toml",
            ROTATING.replace("N = 25", "N = 25\ndelta = 0.05\nmode = \"both\"\ntrajectories = 400"),
        )
        main(["run", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
        main(["run", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
        rate = lambda d: json.loads((tmp_path / d / "report.json").read_text())["report"][
            "overall_success_empirical"
        ]["rate"]
        assert rate("a") != rate("b")

    def test_frustrated_measured_run_exits_4(self, tmp_path):
        cfg = write(tmp_path, "bell.toml", FRUSTRATED_MEASURED)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 4

    def test_csv_only_format(self, tmp_path):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        main(["run", "--config", cfg, "--out", str(tmp_path / "out"), "--format", "csv"])
        assert (tmp_path / "out" / "steps.csv").exists()
        assert not (tmp_path / "out" / "report.json").exists()


class TestGapScan:
    def test_rotating_profile(self, tmp_path, capsys):
        cfg = write(tmp_path, "rot.toml", ROTATING)
        code = main(["gap-scan", "--config", cfg, "--samples", "9", "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "gap_profile.csv").read_text().splitlines()
        assert lines[0] == "s,gap,ground_energy"
        assert len(lines) == 10
        for row in lines[1:]:
            _, gap, energy = row.split(",")
            assert float(gap) == pytest.approx(1.0, abs=1e-12)
            assert float(energy) == pytest.approx(0.0, abs=1e-12)

    def test_gapless_marked_nan(self, tmp_path):
        cfg = write(tmp_path, "gapless.toml", GAPLESS)
        main(["gap-scan", "--config", cfg, "--samples", "3", "--out", str(tmp_path)])
        rows = (tmp_path / "gap_profile.csv").read_text().splitlines()[1:]
        assert all(r.split(",")[1] == "nan" for r in rows)


class TestConfigParsing:
    def test_unknown_protocol_field_named(self, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text(ROTATING + "\nwild_field = 1\n")
        data = load_toml(cfg)
        from zenopath.configio import parse_protocol

        data["protocol"]["wild_field"] = 1
        with pytest.raises(ConfigError, match="wild_field"):
            parse_protocol(data["protocol"], parse_instance(data["instance"], tmp_path))

    def test_missing_instance_table(self, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text("[protocol]\nepsilon = 0.1\n")
        with pytest.raises(ConfigError, match="instance"):
            parse_experiment(cfg)

    def test_dimacs_reference(self, tmp_path):
        (tmp_path / "f.cnf").write_text("p cnf 2 1\n1 2 0\n")
        cfg = tmp_path / "c.toml"
        cfg.write_text('[instance]\nfamily = "sat-projector"\ndimacs = "f.cnf"\n')
        instance = parse_instance(load_toml(cfg)["instance"], tmp_path)
        assert instance.metadata["satisfying_count"] == 3

    def test_bad_generator_named(self, tmp_path):
        text = CONSTANT_EXPLICIT.replace('generator = "matrix"', 'generator = "mystery"')
        cfg = tmp_path / "c.toml"
        cfg.write_text(text)
        with pytest.raises(ConfigError, match="terms\\[0\\]"):
            parse_instance(load_toml(cfg)["instance"], tmp_path)


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "rot.toml", ROTATING)
    env = dict(os.environ)
    src = str(Path(__file__).resolve().parent.parent / "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run(
        [sys.executable, "-m", "zenopath", "run", "--config", cfg, "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("success_exact=")
