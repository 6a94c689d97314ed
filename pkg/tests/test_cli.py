import json
import subprocess
import sys

import pytest

from pointvortex.cli import main
from pointvortex.config import load_scenario, parse_scenario, resolve_scenario
from pointvortex.errors import ConfigError

BUNDLED = ("sphere_antipodal_pair", "torus_pair_translate", "torus_four_vortex")


def run_cli(args, cwd=None, env_extra=None):
    import os

    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "pointvortex", *args],
        capture_output=True, text=True, cwd=cwd, env=env,
    )


class TestConfigParsing:
    def test_bundled_scenarios_resolve(self):
        for name in BUNDLED:
            cfg = resolve_scenario(name)
            assert cfg.name == name
            cfg.state()  # constructible

    def test_dump_round_trip(self):
        for name in BUNDLED:
            cfg = resolve_scenario(name)
            again = parse_scenario(json.loads(json.dumps(cfg.to_dict())))
            assert again == cfg

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="no such config"):
            resolve_scenario("does_not_exist")

    def test_json_error_reports_line(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"surface": {"kind": "sphere",}}')
        with pytest.raises(ConfigError, match="line 1"):
            load_scenario(bad)

    def test_field_errors_name_the_field(self):
        base = {
            "surface": {"kind": "sphere"},
            "vortices": [
                {"chart": 0, "coord": [0.5, 0.0], "strength": 1.0},
                {"chart": 0, "coord": [-0.5, 0.0], "strength": -1.0},
            ],
        }
        bad = json.loads(json.dumps(base))
        bad["vortices"][1]["strength"] = 1.0
        with pytest.raises(ConfigError, match="sum to zero"):
            parse_scenario(bad)
        bad = json.loads(json.dumps(base))
        bad["integrator"] = {"dt": -0.1}
        with pytest.raises(ConfigError, match="integrator.dt"):
            parse_scenario(bad)
        bad = json.loads(json.dumps(base))
        bad["surface"] = {"kind": "flat_torus"}
        with pytest.raises(ConfigError, match="surface.tau"):
            parse_scenario(bad)
        bad = json.loads(json.dumps(base))
        bad["vortices"][0].pop("coord")
        with pytest.raises(ConfigError, match=r"vortices\[0\]"):
            parse_scenario(bad)


class TestRunCommand:
    def test_bundled_run_and_outputs(self, tmp_path):
        code = main(["run", "torus_pair_translate", "--out-dir", str(tmp_path)])
        assert code == 0
        csv = (tmp_path / "torus_pair_translate.csv").read_text().splitlines()
        assert csv[0] == (
            "t,z1_re,z1_im,chart1,z2_re,z2_im,chart2,H,a_1,b_1,min_sep"
        )
        assert len(csv) == 102  # header + t=0 + 100 records
        diags = (tmp_path / "torus_pair_translate.jsonl").read_text().splitlines()
        summary = json.loads(diags[-1])
        assert summary["status"] == "ok"
        assert summary["energy_drift"] < 1e-9

    def test_sphere_header_has_no_circulation_columns(self, tmp_path):
        code = main(["run", "sphere_antipodal_pair", "--out-dir", str(tmp_path)])
        assert code == 0
        header = (tmp_path / "sphere_antipodal_pair.csv").read_text().splitlines()[0]
        assert header == "t,z1_re,z1_im,chart1,z2_re,z2_im,chart2,H,min_sep"

    def test_sphere_pair_latitude_column_constant(self, tmp_path):
        assert main(["run", "sphere_antipodal_pair", "--out-dir", str(tmp_path)]) == 0
        rows = (tmp_path / "sphere_antipodal_pair.csv").read_text().splitlines()[1:]
        radii = []
        for row in rows:
            cells = row.split(",")
            radii.append(abs(complex(float(cells[1]), float(cells[2]))))
        assert max(abs(r - radii[0]) for r in radii) < 1e-7

    def test_torus_pair_direction_column_constant(self, tmp_path):
        assert main(["run", "torus_pair_translate", "--out-dir", str(tmp_path)]) == 0
        rows = (tmp_path / "torus_pair_translate.csv").read_text().splitlines()[1:]
        pts = [complex(float(r.split(",")[1]), float(r.split(",")[2])) for r in rows]
        # uniform translation: successive displacements all point the same way
        from pointvortex.surfaces import reduce_centered

        steps = [reduce_centered(1j, b - a) for a, b in zip(pts, pts[1:])]
        dirs = [s / abs(s) for s in steps]
        assert max(abs(d - dirs[0]) for d in dirs) < 1e-8

    def test_byte_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "torus_four_vortex", "--out-dir", str(a)]) == 0
        assert main(["run", "torus_four_vortex", "--out-dir", str(b)]) == 0
        assert (a / "torus_four_vortex.csv").read_bytes() == (
            b / "torus_four_vortex.csv"
        ).read_bytes()

    def test_invalid_config_exits_one(self, tmp_path):
        cfg = tmp_path / "unbalanced.json"
        cfg.write_text(json.dumps({
            "surface": {"kind": "sphere"},
            "vortices": [
                {"chart": 0, "coord": [0.5, 0.0], "strength": 1.0},
                {"chart": 0, "coord": [-0.5, 0.0], "strength": 1.0},
            ],
        }))
        proc = run_cli(["run", str(cfg)], cwd=tmp_path)
        assert proc.returncode == 1
        assert "sum to zero" in proc.stderr

    def test_collision_exits_two(self, tmp_path):
        cfg = tmp_path / "collide.json"
        cfg.write_text(json.dumps({
            "name": "collide",
            "surface": {"kind": "flat_torus", "tau": [0.0, 1.0]},
            "vortices": [
                {"chart": 0, "coord": [0.21, 0.33], "strength": 1.0},
                {"chart": 0, "coord": [0.68, 0.41], "strength": -0.6},
                {"chart": 0, "coord": [0.45, 0.72], "strength": 0.8},
                {"chart": 0, "coord": [0.82, 0.15], "strength": -1.2},
            ],
            "base_circulations": {"a": [0.3], "b": [-0.2]},
            "integrator": {"method": "rk4", "dt": 0.005, "steps": 3000,
                           "record_every": 50},
            "collision_threshold": 0.25,
        }))
        proc = run_cli(["run", str(cfg), "--out-dir", str(tmp_path)], cwd=tmp_path)
        assert proc.returncode == 2
        assert "collided" in proc.stderr
        diags = (tmp_path / "collide.jsonl").read_text().splitlines()
        assert json.loads(diags[-1])["status"] == "collision"
        # the partial trajectory is still written
        assert (tmp_path / "collide.csv").exists()

    def test_dump_config_round_trips_through_cli(self, tmp_path):
        proc = run_cli(["run", "sphere_antipodal_pair", "--dump-config"])
        assert proc.returncode == 0
        reparsed = parse_scenario(json.loads(proc.stdout))
        assert reparsed == resolve_scenario("sphere_antipodal_pair")

    def test_parallel_jobs(self, tmp_path):
        code = main([
            "run", "sphere_antipodal_pair", "torus_pair_translate",
            "--out-dir", str(tmp_path), "--jobs", "2",
        ])
        assert code == 0
        assert (tmp_path / "sphere_antipodal_pair.csv").exists()
        assert (tmp_path / "torus_pair_translate.csv").exists()

    def test_log_env_accepted(self, tmp_path):
        proc = run_cli(
            ["run", "torus_pair_translate", "--out-dir", str(tmp_path)],
            env_extra={"VORTEX_LOG": "info"},
        )
        assert proc.returncode == 0


class TestVerifyCommand:
    def test_single_scenario_prints_per_vortex_residuals(self, capsys):
        code = main(["verify", "torus_four_vortex"])
        out = capsys.readouterr().out
        assert code == 0
        for k in range(4):
            assert f"velocity[{k}]" in out

    def test_corrupted_tolerance_fails_but_reports(self, capsys):
        code = main([
            "verify", "--suite", "quick",
            "--override", "sphere_green_normalization=1e-15",
        ])
        out = capsys.readouterr().out
        assert code != 0
        assert "FAIL" in out
        assert "sphere_green_normalization" in out
        # the rest of the table is still printed
        assert "velocity_equivalence_torus" in out

    def test_bad_override_reports_config_error(self):
        assert main(["verify", "--override", "nonsense"]) == 1
