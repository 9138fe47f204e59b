"""Config-driven runner: subcommands, exit codes, CSV determinism."""

import json

import numpy as np
import pytest

from spdekit import cli


def write_config(path, text):
    path.write_text(text)
    return str(path)


BASE_SIM = """
[model]
kind = transport_heat
sigma = 1.0

[grid]
modes = 16

[scheme]
kind = euler_maruyama
dt = 1e-4

[experiment]
t = 0.01
u0 = cos
base_seed = 7

[output]
directory = {out}
prefix = run
"""


class TestSimulate:
    def test_zero_horizon_single_snapshot(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini", BASE_SIM.format(out=tmp_path / "o").replace("t = 0.01", "t = 0.0")
        )
        assert cli.main(["simulate", "--config", cfg]) == 0
        lines = (tmp_path / "o" / "run_norms.csv").read_text().strip().splitlines()
        assert lines[0] == "t,l2,h1,mode0"
        assert len(lines) == 2  # header + one snapshot

    def test_norms_row_count_and_columns(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", BASE_SIM.format(out=tmp_path / "o"))
        assert cli.main(["simulate", "--config", cfg]) == 0
        lines = (tmp_path / "o" / "run_norms.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 101  # header + N+1 rows at T/dt = 100

    def test_missing_dt_names_key(self, tmp_path, capsys):
        text = BASE_SIM.format(out=tmp_path / "o").replace("dt = 1e-4\n", "")
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["simulate", "--config", cfg]) == 2
        assert "scheme.dt" in capsys.readouterr().err

    def test_manifest_written_with_hash(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", BASE_SIM.format(out=tmp_path / "o"))
        cli.main(["simulate", "--config", cfg])
        manifest = json.loads((tmp_path / "o" / "run_manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert len(manifest["config_hash"]) == 64
        assert manifest["seed"] == 7

    def test_seed_override(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", BASE_SIM.format(out=tmp_path / "o"))
        cli.main(["simulate", "--config", cfg, "--seed", "99"])
        manifest = json.loads((tmp_path / "o" / "run_manifest.json").read_text())
        assert manifest["seed"] == 99

    def test_reruns_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", BASE_SIM.format(out=tmp_path / "o"))
        cli.main(["simulate", "--config", cfg])
        first = (tmp_path / "o" / "run_norms.csv").read_bytes()
        cli.main(["simulate", "--config", cfg])
        assert (tmp_path / "o" / "run_norms.csv").read_bytes() == first

    def test_save_spectra_flag(self, tmp_path):
        text = BASE_SIM.format(out=tmp_path / "o").replace(
            "u0 = cos", "u0 = cos\nsave_spectra = true"
        )
        cfg = write_config(tmp_path / "c.ini", text)
        cli.main(["simulate", "--config", cfg])
        lines = (tmp_path / "o" / "run_spectra.csv").read_text().strip().splitlines()
        assert lines[0] == "t,k,re,im"
        assert len(lines) == 1 + 101 * 17

    def test_blow_up_exits_three(self, tmp_path, capsys):
        text = """
[model]
kind = reaction_diffusion
theta = 1.0
m = 4

[grid]
modes = 16

[scheme]
kind = euler_maruyama
dt = 1e-4

[noise]
kind = white

[experiment]
t = 1.0
u0 = cos
u0_amplitude = 50.0
base_seed = 2

[output]
directory = {out}
prefix = x
""".format(out=tmp_path / "o")
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["simulate", "--config", cfg]) == 3
        assert "blew up" in capsys.readouterr().err

    def test_invalid_model_exponent_exits_two(self, tmp_path, capsys):
        text = BASE_SIM.format(out=tmp_path / "o").replace(
            "kind = transport_heat\nsigma = 1.0",
            "kind = reaction_diffusion\ntheta = -1.0\nm = 2",
        )
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["simulate", "--config", cfg]) == 2
        assert "m must be >= 3" in capsys.readouterr().err


class TestConfigHash:
    def test_reordering_and_formatting_invariant(self, tmp_path):
        a = cli.load_config(write_config(tmp_path / "a.ini", BASE_SIM.format(out="out")))
        shuffled = BASE_SIM.format(out="out").replace(
            "kind = euler_maruyama\ndt = 1e-4", "dt = 0.0001\nkind = euler_maruyama"
        )
        b = cli.load_config(write_config(tmp_path / "b.ini", shuffled))
        assert a.semantic_hash() == b.semantic_hash()

    def test_value_change_changes_hash(self, tmp_path):
        a = cli.load_config(write_config(tmp_path / "a.ini", BASE_SIM.format(out="out")))
        changed = BASE_SIM.format(out="out").replace("sigma = 1.0", "sigma = 1.5")
        b = cli.load_config(write_config(tmp_path / "b.ini", changed))
        assert a.semantic_hash() != b.semantic_hash()


VERIFY_TEMPLATE = """
[model]
kind = transport_heat
sigma = {sigma}

[grid]
modes = 16

[scheme]
kind = euler_maruyama
dt = 1e-4

[experiment]
t = 0.01
u0 = cos
n_paths = 3
base_seed = 5
checks = {checks}

[output]
directory = {out}
prefix = v
"""


class TestVerify:
    def read_rows(self, tmp_path):
        lines = (tmp_path / "o" / "v_reports.csv").read_text().strip().splitlines()
        header = lines[0].split(",")
        return [dict(zip(header, line.split(","))) for line in lines[1:]]

    def test_mass_conservation_single_row(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="1.0", checks="mass_conservation", out=tmp_path / "o"),
        )
        assert cli.main(["verify", "--config", cfg]) == 0
        rows = self.read_rows(tmp_path)
        assert len(rows) == 1
        assert rows[0]["name"] == "mass_conservation"
        assert rows[0]["pass"] == "true"

    def test_gronwall_supercritical_skipped(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="2.5", checks="gronwall", out=tmp_path / "o"),
        )
        assert cli.main(["verify", "--config", cfg]) == 0
        rows = self.read_rows(tmp_path)
        assert rows[0]["pass"] == "skipped"
        assert "sigma >= 2" in rows[0]["note"]

    def test_mass_conservation_skipped_for_additive_noise(self, tmp_path):
        text = VERIFY_TEMPLATE.format(
            sigma="1.0", checks="mass_conservation", out=tmp_path / "o"
        ).replace("kind = transport_heat\nsigma = 1.0", "kind = additive_heat")
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["verify", "--config", cfg]) == 0
        rows = self.read_rows(tmp_path)
        assert rows[0]["pass"] == "skipped"
        assert "Brownian" in rows[0]["note"]

    def test_empty_check_list_header_only(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="1.0", checks="", out=tmp_path / "o"),
        )
        assert cli.main(["verify", "--config", cfg]) == 0
        lines = (tmp_path / "o" / "v_reports.csv").read_text().strip().splitlines()
        assert len(lines) == 1

    def test_unknown_check_is_config_error(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="1.0", checks="nonsense", out=tmp_path / "o"),
        )
        assert cli.main(["verify", "--config", cfg]) == 2
        assert "nonsense" in capsys.readouterr().err

    def test_failing_check_exits_one(self, tmp_path):
        # a 16-interval partition cannot pin the quadratic variation to 5%
        text = VERIFY_TEMPLATE.format(
            sigma="1.0", checks="quadratic_variation", out=tmp_path / "o"
        ).replace("n_paths = 3", "n_paths = 50\nqv_intervals = 16")
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["verify", "--config", cfg]) == 1
        rows = self.read_rows(tmp_path)
        assert rows[0]["pass"] == "false"

    def test_out_flag_overrides_directory(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="1.0", checks="mass_conservation", out=tmp_path / "o"),
        )
        other = tmp_path / "elsewhere"
        assert cli.main(["verify", "--config", cfg, "--out", str(other)]) == 0
        assert (other / "v_reports.csv").exists()

    def test_verify_rerun_byte_identical(self, tmp_path):
        checks = "mass_conservation, gronwall, ito_isometry, gaussian_moment"
        text = (
            VERIFY_TEMPLATE.format(sigma="1.0", checks=checks, out=tmp_path / "o")
            .replace("n_paths = 3", "n_paths = 32")
            .replace("dt = 1e-4", "dt = 5e-6")
        )
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["verify", "--config", cfg]) == 0
        first = (tmp_path / "o" / "v_reports.csv").read_bytes()
        cli.main(["verify", "--config", cfg])
        assert (tmp_path / "o" / "v_reports.csv").read_bytes() == first


BURGERS_TEMPLATE = """
[model]
kind = burgers

[grid]
modes = 32

[scheme]
kind = exponential_euler
dt = 1e-3

[noise]
kind = {noise}

[experiment]
t = 0.05
w0 = sin
w0_amplitude = {amp}
n_paths = {n}
base_seed = 3
picard_maxit = {maxit}

[output]
directory = {out}
prefix = b
"""


class TestBurgers:
    def test_requires_burgers_model(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "c.ini",
            VERIFY_TEMPLATE.format(sigma="1.0", checks="", out=tmp_path / "o"),
        )
        assert cli.main(["burgers", "--config", cfg]) == 2
        assert "model.kind = burgers" in capsys.readouterr().err

    def test_ensemble_file_contract(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.ini",
            BURGERS_TEMPLATE.format(
                noise="mean_free_white", amp="0.5", n=3, maxit=25, out=tmp_path / "o"
            ),
        )
        assert cli.main(["burgers", "--config", cfg]) == 0
        files = sorted(p.name for p in (tmp_path / "o").glob("b_seed*.csv"))
        assert files == ["b_seed000.csv", "b_seed001.csv", "b_seed002.csv"]
        summary = (tmp_path / "o" / "b_summary.csv").read_text().strip().splitlines()
        assert len(summary) == 1 + 3 + 1  # header, three seeds, ensemble row
        assert summary[-1].startswith("ensemble,")

    def test_zero_noise_matches_reference(self, tmp_path):
        # the w column of a zero-noise run equals a directly computed remainder
        cfg = write_config(
            tmp_path / "c.ini",
            BURGERS_TEMPLATE.format(noise="list", amp="0.5", n=1, maxit=25, out=tmp_path / "o")
            .replace("kind = list", "kind = list\nvalues = 0.0"),
        )
        assert cli.main(["burgers", "--config", cfg]) == 0
        lines = (tmp_path / "o" / "b_seed000.csv").read_text().strip().splitlines()[1:]
        w_col = np.array([float(line.split(",")[2]) for line in lines])

        from conftest import sin_field
        from spdekit.burgers import BurgersProblem, sample_linear_part, solve_remainder
        from spdekit.burgers import _lp_rows
        from spdekit.noise import CovarianceSpec, NoiseSampler
        from spdekit.spectral import TorusGrid

        g = TorusGrid(32)
        q = CovarianceSpec.from_eigenvalues(g, np.zeros(33))
        prob = BurgersProblem(g, 0.05, 1e-3, sin_field(g, 0.5), q=q)
        v = sample_linear_part(prob, NoiseSampler(q, 3, 0))
        w, _, _, _ = solve_remainder(prob, v)
        ref = _lp_rows(w.states, prob.p, prob.quad_points)
        assert np.allclose(w_col, ref, rtol=1e-12, atol=1e-15)

    def test_picard_failure_exit_code(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "c.ini",
            BURGERS_TEMPLATE.format(
                noise="mean_free_white", amp="8.0", n=1, maxit=1, out=tmp_path / "o"
            ).replace("picard_maxit = 1", "picard_maxit = 1\npicard_tol = 1e-14"),
        )
        assert cli.main(["burgers", "--config", cfg]) == 3
        assert "window 0" in capsys.readouterr().err


REGULARITY_TEMPLATE = """
[model]
kind = additive_heat

[grid]
modes = 256

[scheme]
kind = exact_ou
dt = 1e-3

[noise]
kind = white

[experiment]
alpha = -0.25
base_seed = 1

[output]
directory = {out}
prefix = r
"""


class TestRegularity:
    def test_fit_report_and_curve(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", REGULARITY_TEMPLATE.format(out=tmp_path / "o"))
        assert cli.main(["regularity", "--config", cfg]) == 0
        rows = (tmp_path / "o" / "r_reports.csv").read_text().strip().splitlines()
        assert len(rows) == 2
        assert "holder_exponent" in rows[1]
        curve = (tmp_path / "o" / "r_structure.csv").read_text().strip().splitlines()
        assert curve[0] == "alpha,lag,structure"
        assert len(curve) == 1 + 7  # default dyadic ladder 2^-8 .. 2^-14

    def test_divergent_alpha_config_error(self, tmp_path, capsys):
        text = REGULARITY_TEMPLATE.format(out=tmp_path / "o").replace(
            "alpha = -0.25", "alpha = 0.75"
        )
        cfg = write_config(tmp_path / "c.ini", text)
        assert cli.main(["regularity", "--config", cfg]) == 2
        assert "diverges" in capsys.readouterr().err
