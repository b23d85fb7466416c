import json

import numpy as np
import pytest

from bathforge import cli, renorm
from bathforge.errors import ConfigError, NonConvergenceError


def read_table(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    names = lines[0].split(",")
    cols = {n: [] for n in names}
    for row in lines[1:]:
        for n, v in zip(names, row.split(",")):
            cols[n].append(v)
    return {
        n: (vals if n == "method" else np.array(vals, dtype=float)) for n, vals in cols.items()
    }


def run_cli(args, tmp_path, config=None, fmt="toml"):
    argv = list(args)
    if config is not None:
        cfg_path = tmp_path / f"config.{fmt}"
        if fmt == "json":
            cfg_path.write_text(json.dumps(config))
        else:
            lines = []
            for section, table in config.items():
                lines.append(f"[{section}]")
                for key, val in table.items():
                    if isinstance(val, str):
                        lines.append(f'{key} = "{val}"')
                    else:
                        lines.append(f"{key} = {val}")
            cfg_path.write_text("\n".join(lines))
        argv += ["--config", str(cfg_path)]
    return cli.run(argv)


class TestConfig:
    def test_defaults_load(self):
        cfg = cli.load_config(None)
        assert cfg.spec.k == -2.30
        assert cfg.spec.omega_r == 1.0  # reduced
        assert cfg.resonator.mass == 1.0
        assert cfg.out_format == "csv"

    def test_hz_conversion_anchors_reduced_units(self):
        cfg = cli.load_config(None)
        # W/2pi = 0.914 MHz maps to the reduced resonance 1.0, and
        # T = 300 K to k_B T / (hbar W) ~ 6.84e6
        assert cfg.spec.omega_r == 1.0
        assert cfg.resonator.temperature == pytest.approx(6.84e6, rel=1e-3)

    def test_quality_target_calibration(self):
        cfg = cli.load_config(None)
        res = renorm.Resonator.anchored(1.0, 1.0)
        gamma = cfg.spec.j_res / renorm.dressed_mass(cfg.spec, res)
        assert gamma == pytest.approx(1.0 / 215.0, rel=1e-9)

    def test_json_config(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"bath": {"k": -1.9, "omega_r_hz": 1e6, "j_res": 2e-3}}))
        cfg = cli.load_config(p)
        assert cfg.spec.k == -1.9
        assert cfg.spec.j_res == 2e-3

    def test_toml_config(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text("[bath]\nk = -2.0\nomega_r_hz = 5e5\nq_target = 80.0\n")
        cfg = cli.load_config(p)
        assert cfg.spec.k == -2.0

    def test_bath_requires_exactly_one_normalization(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"bath": {"k": -2.3, "omega_r_hz": 1e6}}))
        with pytest.raises(ConfigError):
            cli.load_config(p)
        p.write_text(
            json.dumps({"bath": {"k": -2.3, "omega_r_hz": 1e6, "j_res": 1e-3, "q_target": 10}})
        )
        with pytest.raises(ConfigError):
            cli.load_config(p)

    def test_grid_validation(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"grids": {"omega_min": 2.0, "omega_max": 1.0}}))
        with pytest.raises(ConfigError) as err:
            cli.load_config(p)
        assert err.value.field == "grids"

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            cli.load_config("does/not/exist.toml")


class TestExitCodes:
    def test_success(self, tmp_path):
        assert run_cli(["spectral", "--out", str(tmp_path / "o")], tmp_path) == 0

    def test_config_error_is_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text('bath = "nope"\n')
        code = cli.run(["spectral", "--config", str(bad)])
        assert code == 2
        assert capsys.readouterr().err.startswith("ERROR 2:")

    def test_nonconvergence_is_3(self, tmp_path, capsys, monkeypatch):
        def explode(cfg):
            raise NonConvergenceError("self-energy PV integral for Re Sigma stalled")

        monkeypatch.setitem(cli.__dict__, "_cmd_spectral", explode)
        code = cli.run(["spectral", "--out", str(tmp_path / "o")])
        assert code == 3
        err = capsys.readouterr().err
        assert err.startswith("ERROR 3:")
        assert "Sigma" in err


class TestOutputs:
    def test_byte_stable(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(["spectral", "--out", str(a)], tmp_path) == 0
        assert run_cli(["spectral", "--out", str(b)], tmp_path) == 0
        assert (a / "spectral.csv").read_bytes() == (b / "spectral.csv").read_bytes()

    def test_header_records_version_and_config(self, tmp_path):
        out = tmp_path / "o"
        run_cli(["spectral", "--out", str(out)], tmp_path)
        lines = (out / "spectral.csv").read_text().splitlines()
        assert lines[0].startswith("# bathforge ")
        assert lines[1].startswith("# config: ")
        resolved = json.loads(lines[1].removeprefix("# config: "))
        assert resolved["bath"]["k"] == -2.3
        assert lines[2].startswith("# columns: ")

    def test_spectral_columns_parse(self, tmp_path):
        out = tmp_path / "o"
        run_cli(["spectral", "--out", str(out)], tmp_path)
        data = read_table(out / "spectral.csv")
        assert set(data) == {"omega_over_omega_r", "j", "j_normalized", "log_slope"}
        assert np.all(data["j"] >= 0.0)

    def test_kernel_trace_columns(self, tmp_path):
        out = tmp_path / "o"
        run_cli(["kernel", "--out", str(out)], tmp_path)
        text = (out / "kernel.csv").read_text().splitlines()
        header = [l for l in text if not l.startswith("#")][0]
        assert header == "t_omega_r,mu_normalized,method"

    def test_renorm_json(self, tmp_path):
        out = tmp_path / "o"
        run_cli(["renorm", "--out", str(out)], tmp_path)
        doc = json.loads((out / "renorm.json").read_text())
        assert doc["closed_form"]["method"] == "closed_form"
        assert doc["quadrature"]["method"] == "quadrature"
        assert doc["closed_form"]["delta_k"] == pytest.approx(
            doc["quadrature"]["delta_k"], rel=1e-9
        )
        assert doc["gamma_over_omega_r"] == pytest.approx(1.0 / 215.0, rel=1e-9)

    def test_json_format_mirror(self, tmp_path):
        out = tmp_path / "o"
        run_cli(["spectral", "--out", str(out), "--format", "json"], tmp_path)
        doc = json.loads((out / "spectral.json").read_text())
        assert "columns" in doc and "config" in doc
        assert len(doc["columns"]["j"]) == 200


class TestFigures:
    def test_figure2_curves(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli(["figures", "--which", "2", "--out", str(out)], tmp_path) == 0
        data = read_table(out / "figure2.csv")
        assert "omega_over_omega_r" in data
        curves = [n for n in data if n.startswith("j_norm")]
        assert len(curves) == 2
        for name in curves:
            assert np.all(data[name] >= 0.0)
            # unimodal: single sign change of the increments
            dj = np.diff(data[name])
            flips = np.sum(np.sign(dj[:-1]) != np.sign(dj[1:]))
            assert flips == 1

    def test_figure3_transient_negativity(self, tmp_path):
        out = tmp_path / "o"
        assert run_cli(["figures", "--which", "3", "--out", str(out)], tmp_path) == 0
        data = read_table(out / "figure3.csv")
        for name in (n for n in data if n.startswith("mu_norm")):
            assert data[name][0] > 0.0
            assert np.min(data[name]) < 0.0  # transient negativity

    def test_unknown_figure(self, tmp_path, capsys):
        assert run_cli(["figures", "--which", "7"], tmp_path) == 2


class TestSelftest:
    def test_passes(self, tmp_path, capsys):
        assert run_cli(["selftest"], tmp_path) == 0
        out = capsys.readouterr().out
        assert "failed" in out
        assert "0 failed" in out
        assert "PASS" in out


class TestThreadCap:
    def test_env_var_respected(self, monkeypatch):
        from bathforge import parallel

        monkeypatch.setenv("BATHFORGE_THREADS", "2")
        assert parallel.thread_count() == 2
        monkeypatch.setenv("BATHFORGE_THREADS", "bogus")
        assert parallel.thread_count() == 1
        monkeypatch.delenv("BATHFORGE_THREADS")
        assert parallel.thread_count() >= 1
