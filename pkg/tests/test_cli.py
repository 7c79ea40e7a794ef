"""CLI behaviour: CSV schema, exit codes, reproducibility, preset round-trips."""

import numpy as np
import pytest

from jcdephase import cli, coherence, model
from jcdephase.presets import PRESETS

MODEL_TOML = """
[qubit]
omega0 = 1.0

[[modes]]
omega = 0.8
g = 0.01

[[modes]]
omega = 0.7
g = 0.01

[environment]
temperature = 1.0
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "model.toml"
    path.write_text(MODEL_TOML)
    return str(path)


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return comments, header, rows


def comment_map(comments):
    out = {}
    for line in comments:
        body = line.lstrip("# ")
        if " = " in body:
            key, _, value = body.partition(" = ")
            out[key] = value
    return out


class TestCoherenceCommand:
    def test_csv_schema(self, config_path, tmp_path):
        out = str(tmp_path / "coh.csv")
        rc = cli.main(["coherence", "--config", config_path, "--method", "general",
                       "--t-end", "100", "--samples", "50", "--out", out, "--no-timestamp"])
        assert rc == 0
        comments, header, rows = read_csv(out)
        assert header == ["t", "re_r_general", "im_r_general", "abs_r_general"]
        assert len(rows) == 50
        meta = comment_map(comments)
        assert meta["run.main.modes[1].omega"] == "0.7"
        assert meta["grid.samples"] == "50"
        assert not any("generated_at" in c for c in comments)
        # data row values round-trip as floats and start at r = 1
        assert [float(x) for x in rows[0]] == [0.0, 1.0, 0.0, 1.0]

    def test_reproducible_without_timestamp(self, config_path, tmp_path):
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        for out in (out1, out2):
            assert cli.main(["coherence", "--config", config_path, "--method",
                             "general,pair-closed-form", "--t-end", "200",
                             "--samples", "64", "--out", out, "--no-timestamp"]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_timestamp_present_by_default(self, config_path, tmp_path):
        out = str(tmp_path / "c.csv")
        assert cli.main(["coherence", "--config", config_path, "--method", "general",
                         "--t-end", "50", "--samples", "16", "--out", out]) == 0
        comments, _, _ = read_csv(out)
        assert any("generated_at" in c for c in comments)

    def test_method_mismatch_exit_code(self, config_path, tmp_path, capsys):
        rc = cli.main(["coherence", "--config", config_path, "--method", "degenerate",
                       "--t-end", "50", "--samples", "16",
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "category=method-mismatch" in capsys.readouterr().err

    def test_regime_violation_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text(MODEL_TOML.replace("g = 0.01", "g = 0.15", 1))
        rc = cli.main(["coherence", "--config", str(bad), "--method", "general",
                       "--t-end", "50", "--samples", "16",
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 3
        assert "category=dispersive-regime" in capsys.readouterr().err

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text(MODEL_TOML + "\n[extra]\nfoo = 1\n")
        rc = cli.main(["coherence", "--config", str(bad), "--method", "general",
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "category=config" in capsys.readouterr().err

    def test_io_error_exit_code(self, config_path, tmp_path, capsys):
        rc = cli.main(["coherence", "--config", config_path, "--method", "general",
                       "--t-end", "50", "--samples", "16",
                       "--out", str(tmp_path / "missing_dir" / "x.csv")])
        assert rc == 5
        assert "category=io" in capsys.readouterr().err

    def test_numerical_error_exit_code(self, tmp_path, capsys):
        hot = tmp_path / "hot.toml"
        hot.write_text(MODEL_TOML.replace("omega = 0.7", "omega = 0.8")
                                 .replace("temperature = 1.0", "temperature = 500.0"))
        spec = model.load_model_toml(str(hot))
        t_end = 1.1 * np.pi / model.dispersive_shift(spec)
        rc = cli.main(["coherence", "--config", str(hot), "--method", "general",
                       "--t-end", str(t_end), "--samples", "32",
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 4
        assert "category=branch-tracking" in capsys.readouterr().err

    def test_dispersive_warning_on_stderr(self, tmp_path, capsys):
        warn = tmp_path / "warn.toml"
        warn.write_text(MODEL_TOML.replace("omega = 0.7", "omega = 0.9"))
        rc = cli.main(["coherence", "--config", str(warn), "--method", "general",
                       "--t-end", "50", "--samples", "16",
                       "--out", str(tmp_path / "w.csv"), "--no-timestamp"])
        assert rc == 0
        assert "warning" in capsys.readouterr().err


class TestCompareCommand:
    def test_vacuum_deviation_negligible(self, tmp_path):
        cold = tmp_path / "cold.toml"
        cold.write_text(MODEL_TOML.replace("temperature = 1.0", "temperature = 0.0"))
        out = str(tmp_path / "cmp.csv")
        rc = cli.main(["compare", "--config", str(cold), "--method",
                       "general,pair-closed-form", "--t-end", "500", "--samples", "100",
                       "--out", out, "--no-timestamp"])
        assert rc == 0
        comments, header, rows = read_csv(out)
        assert header[-1] == "abs_deviation"
        meta = comment_map(comments)
        assert float(meta["summary.max_abs_deviation"]) <= 1e-10

    def test_oracle_compare_summary(self, config_path, tmp_path):
        out = str(tmp_path / "cmp.csv")
        rc = cli.main(["compare", "--config", config_path,
                       "--t-end", "300", "--samples", "150", "--weight-tol", "1e-2",
                       "--out", out, "--no-timestamp"])
        assert rc == 0
        comments, header, rows = read_csv(out)
        assert "abs_r_exact-oracle" in header
        assert "sigma_z_exact-oracle" in header
        meta = comment_map(comments)
        assert "summary.max_abs_deviation" in meta
        assert "summary.at_t" in meta
        assert float(meta["run.main.oracle.discarded_weight"]) <= 1e-2


class TestSweepCommand:
    def test_holes_marked_empty(self, config_path, tmp_path):
        out = str(tmp_path / "sw.csv")
        rc = cli.main(["sweep", "--config", config_path, "--param", "modes[1].omega",
                       "--param-values", "0.75,1.0,0.85", "--t-end", "4000",
                       "--samples", "1500", "--out", out, "--no-timestamp"])
        assert rc == 0
        _, header, rows = read_csv(out)
        assert header == ["modes[1].omega", "t_max", "flag"]
        assert rows[1][1] == "" and rows[1][2] == "invalid"
        assert rows[0][1] != ""

    def test_sweep_requires_axis(self, config_path, tmp_path, capsys):
        rc = cli.main(["sweep", "--config", config_path,
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 2


class TestFitCommand:
    def test_synthetic_exponential_via_preset_grid(self, config_path, tmp_path):
        out = str(tmp_path / "fit.csv")
        rc = cli.main(["fit", "--config", config_path, "--t-end", "2000",
                       "--samples", "1000", "--out", out, "--no-timestamp"])
        assert rc == 0
        comments, header, rows = read_csv(out)
        meta = comment_map(comments)
        gamma = float(meta["fit.main.gamma"])
        assert gamma > 0
        assert "fit.main.rms_residual" in meta
        assert header == ["t", "abs_r_general", "fit_general", "deviation_general"]
        # deviation column is abs_r - fit
        row = rows[10]
        assert float(row[3]) == pytest.approx(float(row[1]) - float(row[2]), abs=1e-12)


class TestPresets:
    def test_all_ids_present(self):
        expected = {f"2{c}" for c in "abcdef"} | {"3a", "3b"} | {f"4{c}" for c in "abcdef"} \
            | {f"A3{c}" for c in "abcdefgh"}
        assert set(PRESETS) == expected

    def test_unknown_preset_is_config_error(self, tmp_path, capsys):
        rc = cli.main(["coherence", "--preset", "9z", "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_wrong_command_for_preset(self, tmp_path, capsys):
        rc = cli.main(["sweep", "--preset", "2a", "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_preset_parameters_match_captions(self):
        p2a = PRESETS["2a"]
        assert [run.label for run in p2a.runs] == ["T0.5", "T1.0", "T2.0"]
        spec = p2a.runs[1].spec
        assert spec.temperature == 1.0
        assert [m.omega for m in spec.modes] == [0.8, 0.7]
        assert [m.g for m in spec.modes] == [0.01, 0.02]
        assert PRESETS["2d"].runs[0].methods == ("degenerate",)
        assert PRESETS["3b"].sweep_param == "modes[1].omega"
        spec4f = PRESETS["4f"].runs[0].spec
        assert spec4f.n_modes == 10
        assert spec4f.modes[0].omega == pytest.approx(0.7)
        assert spec4f.modes[-1].omega == pytest.approx(0.8)
        diffs = np.diff([m.omega for m in spec4f.modes])
        assert np.allclose(diffs, diffs[0])
        a3d = PRESETS["A3d"].runs[0].spec
        assert [m.omega for m in a3d.modes] == [0.8, 0.9]
        assert a3d.temperature == 1.0

    def test_preset_roundtrip_from_echo(self, tmp_path):
        """Rebuilding the spec from the CSV echo reproduces the data rows."""
        out = str(tmp_path / "p2a.csv")
        rc = cli.main(["coherence", "--preset", "2a", "--t-end", "150",
                       "--samples", "40", "--out", out, "--no-timestamp"])
        assert rc == 0
        comments, header, rows = read_csv(out)
        meta = comment_map(comments)
        times = coherence.time_grid(float(meta["grid.t_end"]), int(meta["grid.samples"]))
        for label in ("T0.5", "T1.0", "T2.0"):
            spec = model.parse_model_config({
                "qubit": {"omega0": float(meta[f"run.{label}.qubit.omega0"])},
                "modes": [
                    {"omega": float(meta[f"run.{label}.modes[{j}].omega"]),
                     "g": float(meta[f"run.{label}.modes[{j}].g"])}
                    for j in range(2)
                ],
                "environment": {
                    "temperature": float(meta[f"run.{label}.environment.temperature"])},
            })
            assert meta[f"run.{label}.methods"] == "general"
            series = coherence.r_general(spec, times)
            col = header.index(f"abs_r_general_{label}")
            got = np.array([float(r[col]) for r in rows])
            assert np.array_equal(got, np.abs(series.values))

    def test_inset_comments_on_coherence_preset(self, tmp_path):
        # override to a small grid; the inset table is computed on its own grid
        preset_small = str(tmp_path / "p4a.csv")
        rc = cli.main(["coherence", "--preset", "4a", "--t-end", "100", "--samples", "30",
                       "--out", preset_small, "--no-timestamp"])
        assert rc == 0
        comments, header, _ = read_csv(preset_small)
        assert any(c.startswith("# inset.tmax.N2 = ") for c in comments)
        assert any(c.startswith("# inset.tmax.N10 = ") for c in comments)
        assert "abs_r_general_N10" in header
