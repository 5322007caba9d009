"""Command-line interface: config parsing, subcommands, output files."""
import numpy as np
import pytest

import modsel.sim_harness as sh
from modsel.cli import main, scenario_from_config
from modsel.core import Dataset


def write_config(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


BASE_CONFIG = """
[scenario]
design = "equicorrelated"
rho = 0.3
n = 40
p = 6
coef = [1.0, 0.7]
phi = 1.0
replicates = 3
seed = 11
engine = "enumerate"
gibbs_sweeps = 150
gibbs_burn_in = 30

[[bundles]]
name = "zbb"
coef = "zellner"
model = "betabinomial"
tau = 25.0
"""


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


class TestConfigParsing:
    def test_scenario_fields_and_overrides(self, tmp_path):
        cfg_path = write_config(tmp_path, BASE_CONFIG)
        import tomli
        with open(cfg_path, "rb") as fh:
            cfg = tomli.load(fh)
        sc = scenario_from_config(cfg)
        assert (sc.n, sc.p, sc.coef) == (40, 6, (1.0, 0.7))
        assert sc.seed == 11 and sc.engine == "enumerate"
        assert sc.bundles[0].name == "zbb" and sc.bundles[0].tau == 25.0
        over = scenario_from_config(cfg, seed=99, engine="gibbs")
        assert over.seed == 99 and over.engine == "gibbs"

    def test_missing_required_keys(self):
        with pytest.raises(ValueError, match="n, p and coef"):
            scenario_from_config({"scenario": {"n": 10, "p": 4}})

    def test_unknown_design_kind(self):
        cfg = {"scenario": {"design": "fractal", "n": 10, "p": 4,
                            "coef": [1.0]}}
        with pytest.raises(ValueError, match="design kind"):
            scenario_from_config(cfg)

    def test_bundles_default_to_standard_triple(self):
        cfg = {"scenario": {"n": 30, "p": 5, "coef": [1.0]}}
        sc = scenario_from_config(cfg)
        assert [b.name for b in sc.bundles] == [b.name for b in
                                                sh.standard_bundles()]

    def test_design_variants_parse(self):
        base = {"n": 30, "p": 4, "coef": [1.0]}
        sc = scenario_from_config(
            {"scenario": dict(base, design="misspecified-mean",
                              omitted=[0.5], rho=0.2)})
        assert isinstance(sc.design, sh.MisspecifiedMean)
        sc = scenario_from_config(
            {"scenario": dict(base, design="heteroskedastic", recipe="ar1",
                              param=0.4)})
        assert isinstance(sc.design, sh.Heteroskedastic)
        assert sc.design.param == 0.4


class TestEngineSubcommands:
    def test_enumerate_writes_complete_table(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out = tmp_path / "enum"
        assert main(["enumerate", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_csv(out / "models.csv")
        assert header == ["model_bitmask", "size", "log_evidence",
                          "log_prior", "probability"]
        probs = [float(r[4]) for r in rows]
        assert sum(probs) == pytest.approx(1.0, abs=1e-9)
        assert probs == sorted(probs, reverse=True)
        for r in rows:
            assert bin(int(r[0])).count("1") == int(r[1])
        header, rows = read_csv(out / "pips.csv")
        assert header == ["variable", "name", "pip"]
        assert len(rows) == 6 and rows[0][1] == "x1"
        assert "complete=True" in capsys.readouterr().out

    def test_replicate_flag_changes_data(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        main(["enumerate", "--config", cfg, "--out", str(tmp_path / "a")])
        main(["enumerate", "--config", cfg, "--out", str(tmp_path / "b"),
              "--replicate", "2"])
        a = (tmp_path / "a" / "models.csv").read_text()
        b = (tmp_path / "b" / "models.csv").read_text()
        assert a != b

    def test_gibbs_subcommand_runs(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out = tmp_path / "gibbs"
        assert main(["gibbs", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_csv(out / "pips.csv")
        assert all(0.0 <= float(r[2]) <= 1.0 for r in rows)

    def test_ortho_dp_subcommand_runs(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG.replace(
            'design = "equicorrelated"', 'design = "orthogonal"'))
        out = tmp_path / "dp"
        assert main(["ortho-dp", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_csv(out / "models.csv")
        assert sum(float(r[4]) for r in rows) == pytest.approx(1.0, abs=1e-9)

    def test_criterion_mode_normalizes_weights(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out = tmp_path / "l0"
        assert main(["enumerate", "--config", cfg, "--out", str(out),
                     "--criterion", "ebic:0.5"]) == 0
        _, rows = read_csv(out / "models.csv")
        assert sum(float(r[4]) for r in rows) == pytest.approx(1.0, abs=1e-12)
        assert all(float(r[3]) == 0.0 for r in rows)
        with pytest.raises(ValueError, match="unknown criterion"):
            main(["enumerate", "--config", cfg, "--out", str(out),
                  "--criterion", "aicc"])

    def test_data_file_input(self, tmp_path):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((50, 5))
        y = 1.2 * X[:, 0] + rng.standard_normal(50)
        data_path = tmp_path / "data.csv"
        Dataset(y=y, X=X, names=("a", "b", "c", "d", "e")).to_csv(data_path)
        cfg = write_config(tmp_path, f"""
[data]
file = "{data_path}"

[scenario]
p_bar = 4
seed = 2
""")
        out = tmp_path / "fit"
        assert main(["enumerate", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_csv(out / "pips.csv")
        assert [r[1] for r in rows] == ["a", "b", "c", "d", "e"]
        assert float(rows[0][2]) > 0.99


class TestBoundsSubcommands:
    def test_tail_bound_dominates_reference(self, capsys):
        assert main(["bounds", "tail", "--family", "chisq", "--nu", "5",
                     "--w", "20", "--reference"]) == 0
        out = capsys.readouterr().out
        vals = {}
        for token in out.split():
            if "=" in token:
                key, _, val = token.partition("=")
                vals[key] = val
        assert vals["applicable"] == "True"
        assert float(vals["bound"]) >= float(vals["reference"])

    def test_tail_missing_parameter_exits(self):
        with pytest.raises(SystemExit):
            main(["bounds", "tail", "--family", "ncchisq", "--w", "10"])

    def test_fmoment_has_no_left_tail(self):
        with pytest.raises(SystemExit):
            main(["bounds", "tail", "--family", "fmoment", "--side", "left",
                  "--nu1", "4", "--nu2", "30", "--w", "3.5"])

    def test_noncentral_families(self, capsys):
        assert main(["bounds", "tail", "--family", "ncchisq", "--side",
                     "left", "--nu", "4", "--lam", "50", "--w", "10",
                     "--reference"]) == 0
        assert "ratio=" in capsys.readouterr().out
        assert main(["bounds", "tail", "--family", "f", "--nu1", "3",
                     "--nu2", "40", "--w", "15", "--lam", "2.5"]) == 0
        assert "bound=" in capsys.readouterr().out

    def test_global_curves_csv(self, tmp_path, capsys):
        out = tmp_path / "curves.csv"
        assert main(["bounds", "global", "--case", "1", "--n-from", "100",
                     "--n-to", "300", "--n-step", "100",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header[:3] == ["n", "spurious", "nonspurious_small"]
        assert [int(r[0]) for r in rows] == [100, 200, 300]
        assert "rows=3" in capsys.readouterr().out

    def test_global_lambda_rule_switch(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        common = ["bounds", "global", "--case", "3", "--n-from", "200",
                  "--n-to", "200", "--n-step", "100"]
        main(common + ["--out", str(a)])
        main(common + ["--lambda-rule", "quarter-n", "--out", str(b)])
        assert a.read_text() != b.read_text()

    def test_global_invalid_case_exits(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["bounds", "global", "--case", "9", "--n-from", "100",
                  "--n-to", "200", "--n-step", "100",
                  "--out", str(tmp_path / "x.csv")])


class TestSimulate:
    def test_single_run_outputs_and_determinism(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--seed", "5",
                     "--out", str(out_a)]) == 0
        assert "all inequality checks hold" in capsys.readouterr().out
        main(["simulate", "--config", cfg, "--seed", "5",
              "--out", str(out_b)])
        for name in ("summary.csv", "pips.csv", "checks.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_seed_flag_is_mandatory_and_matters(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        with pytest.raises(SystemExit):
            main(["simulate", "--config", cfg, "--out", str(tmp_path / "x")])
        main(["simulate", "--config", cfg, "--seed", "5",
              "--out", str(tmp_path / "a")])
        main(["simulate", "--config", cfg, "--seed", "6",
              "--out", str(tmp_path / "c")])
        assert ((tmp_path / "a" / "summary.csv").read_text()
                != (tmp_path / "c" / "summary.csv").read_text())

    def test_sweep_writes_per_size_rows(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG + """
[sweep]
n_grid = [30, 45]
""")
        out = tmp_path / "sweep"
        assert main(["simulate", "--config", cfg, "--seed", "4",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out / "curves.csv")
        assert header == ["n", "bundle", "metric", "mean", "se"]
        assert sorted({int(r[0]) for r in rows}) == [30, 45]
        assert len(rows) == 6

    def test_plotdata_format(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        out = tmp_path / "plot"
        assert main(["simulate", "--config", cfg, "--seed", "5",
                     "--out", str(out), "--format", "plotdata"]) == 0
        header, rows = read_csv(out / "plotdata.csv")
        assert header == ["x", "series", "value"]
        assert any(r[1] == "zbb/prob_truth" for r in rows)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
