"""Configuration-driven experiment runner.

Experiments are declared in a flat INI file with bracketed sections and
``key = value`` lines (see README for the grammar) and run through four
subcommands::

    spdekit simulate   --config run.ini [--seed N] [--out DIR]
    spdekit verify     --config run.ini [--seed N] [--out DIR]
    spdekit burgers    --config run.ini [--seed N] [--out DIR]
    spdekit regularity --config run.ini [--seed N] [--out DIR]

Exit status: 0 success, 1 a requested check failed, 2 configuration error,
3 numerical failure (blow-up or non-convergent Picard iteration).

All CSV bodies are deterministic functions of the configuration (17
significant digits, fixed row order); wall-clock timestamps appear only in
the JSON manifest written next to the outputs, together with a hash of the
semantic configuration values.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import burgers as burgers_mod
from . import verify as verify_mod
from .integrators import BlowUpError, SamplePath, SchemeSpec, simulate
from .models import (
    AdditiveHeat,
    Burgers,
    PorousMedium,
    ReactionDiffusion,
    TransportHeat,
)
from .noise import CovarianceSpec, NoiseSampler
from .spectral import SpectralField, TorusGrid, field_from_modes, zero_field

__all__ = ["main", "ConfigError", "RunConfig", "load_config"]


class ConfigError(Exception):
    """Invalid or missing configuration; the message names the offending key."""


MODEL_KINDS = (
    "transport_heat",
    "additive_heat",
    "reaction_diffusion",
    "porous_medium",
    "burgers",
)

KNOWN_CHECKS = (
    "mass_conservation",
    "energy_identity",
    "gronwall",
    "ito_isometry",
    "trace_identity",
    "wiener_covariance",
    "quadratic_variation",
    "ito_strat",
    "gaussian_moment",
    "ou_exactness",
    "holder_exponent",
)


class RunConfig:
    """Typed view over the parsed INI sections."""

    def __init__(self, sections: dict[str, dict[str, str]]):
        self.sections = sections

    def _raw(self, section: str, key: str, default=None, required=False):
        value = self.sections.get(section, {}).get(key)
        if value is None:
            if required:
                raise ConfigError(f"missing required key {section}.{key}")
            return default
        return value

    def get_str(self, section, key, default=None, required=False):
        return self._raw(section, key, default, required)

    def get_float(self, section, key, default=None, required=False):
        raw = self._raw(section, key, None, required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key} must be a number, got {raw!r}") from exc

    def get_int(self, section, key, default=None, required=False):
        raw = self._raw(section, key, None, required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key} must be an integer, got {raw!r}") from exc

    def get_list(self, section, key, default=None):
        raw = self._raw(section, key)
        if raw is None:
            return default if default is not None else []
        return [item.strip() for item in raw.split(",") if item.strip()]

    def get_floats(self, section, key, default=None):
        items = self.get_list(section, key, None)
        if items is None or not items:
            return default if default is not None else []
        try:
            return [float(item) for item in items]
        except ValueError as exc:
            raise ConfigError(f"{section}.{key} must be a comma list of numbers") from exc

    def semantic_hash(self) -> str:
        pairs = []
        for section in sorted(self.sections):
            for key in sorted(self.sections[section]):
                raw = self.sections[section][key].strip()
                try:
                    canon = repr(float(raw))
                except ValueError:
                    canon = raw
                pairs.append(f"{section}.{key}={canon}")
        return hashlib.sha256("\n".join(pairs).encode()).hexdigest()


def load_config(path: str | Path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    return RunConfig(sections)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_grid(cfg: RunConfig) -> TorusGrid:
    modes = cfg.get_int("grid", "modes", required=True)
    points = cfg.get_int("grid", "points", 0)
    try:
        return TorusGrid(modes, points)
    except ValueError as exc:
        raise ConfigError(f"grid section invalid: {exc}") from exc


def build_noise(cfg: RunConfig, grid: TorusGrid) -> CovarianceSpec:
    kind = cfg.get_str("noise", "kind", "white")
    if kind == "white":
        return CovarianceSpec.white(grid)
    if kind == "mean_free_white":
        return CovarianceSpec.mean_free_white(grid)
    if kind == "power":
        gamma = cfg.get_float("noise", "gamma", required=True)
        return CovarianceSpec.power(grid, gamma)
    if kind == "list":
        values = cfg.get_floats("noise", "values")
        if not values:
            raise ConfigError("noise.values required for noise.kind = list")
        lam = np.zeros(grid.n_modes + 1)
        if len(values) > grid.n_modes + 1:
            raise ConfigError(
                f"noise.values lists {len(values)} eigenvalues, grid holds {grid.n_modes + 1}"
            )
        lam[: len(values)] = values
        try:
            return CovarianceSpec.from_eigenvalues(grid, lam)
        except ValueError as exc:
            raise ConfigError(f"noise.values invalid: {exc}") from exc
    raise ConfigError(f"noise.kind must be white|mean_free_white|power|list, got {kind!r}")


def build_model(cfg: RunConfig, grid: TorusGrid):
    kind = cfg.get_str("model", "kind", required=True)
    if kind not in MODEL_KINDS:
        raise ConfigError(f"model.kind must be one of {MODEL_KINDS}, got {kind!r}")
    try:
        if kind == "transport_heat":
            sigma = cfg.get_floats("model", "sigma", [1.0])
            return TransportHeat(grid, tuple(sigma))
        q = build_noise(cfg, grid)
        if kind == "additive_heat":
            return AdditiveHeat(q)
        if kind == "reaction_diffusion":
            theta = cfg.get_float("model", "theta", required=True)
            m = cfg.get_int("model", "m", required=True)
            return ReactionDiffusion(theta, m, q)
        if kind == "porous_medium":
            m = cfg.get_int("model", "m", required=True)
            return PorousMedium(m, q)
        return Burgers(q)
    except ValueError as exc:
        raise ConfigError(f"model section invalid: {exc}") from exc


def build_scheme(cfg: RunConfig) -> SchemeSpec:
    kind = cfg.get_str("scheme", "kind", "euler_maruyama")
    dt = cfg.get_float("scheme", "dt", required=True)
    try:
        return SchemeSpec(kind, dt)
    except ValueError as exc:
        raise ConfigError(f"scheme section invalid: {exc}") from exc


def build_initial_field(cfg: RunConfig, grid: TorusGrid, key="u0") -> SpectralField:
    kind = cfg.get_str("experiment", key, "cos")
    amplitude = cfg.get_float("experiment", f"{key}_amplitude", 1.0)
    mode = cfg.get_int("experiment", f"{key}_mode", 1)
    if kind == "zero":
        return zero_field(grid)
    if mode < 1 or mode > grid.n_modes:
        raise ConfigError(f"experiment.{key}_mode must lie in 1..{grid.n_modes}")
    if kind == "cos":
        return field_from_modes(grid, [(mode, amplitude / 2.0)])
    if kind == "sin":
        return field_from_modes(grid, [(mode, amplitude / 2j)])
    raise ConfigError(f"experiment.{key} must be cos|sin|zero, got {kind!r}")


def effective_seed(cfg: RunConfig, override: int | None) -> int:
    if override is not None:
        return override
    return cfg.get_int("experiment", "base_seed", 0)


def output_dir(cfg: RunConfig, override: str | None) -> Path:
    raw = override or cfg.get_str("output", "directory", "out")
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def output_prefix(cfg: RunConfig) -> str:
    return cfg.get_str("output", "prefix", "run")


# ---------------------------------------------------------------------------
# CSV / manifest plumbing
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17e" % float(x)
    if isinstance(x, tuple):
        return ":".join(_fmt(v) for v in x)
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def write_manifest(path: Path, cfg: RunConfig, command: str, seed: int, outputs) -> None:
    manifest = {
        "command": command,
        "config_hash": cfg.semantic_hash(),
        "seed": seed,
        "outputs": sorted(str(o) for o in outputs),
        "created_unix": time.time(),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def report_row(report: verify_mod.StatReport, seed: int):
    return [
        report.name,
        report.estimate,
        report.target,
        report.se,
        report.n,
        "skipped" if report.skipped else ("true" if report.passed else "false"),
        seed,
        report.tolerance,
        report.note,
    ]


REPORT_HEADER = ["name", "estimate", "target", "se", "n", "pass", "seed", "tolerance", "note"]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def run_simulate(cfg: RunConfig, out: Path, seed: int) -> int:
    grid = build_grid(cfg)
    model = build_model(cfg, grid)
    scheme = build_scheme(cfg)
    T = cfg.get_float("experiment", "t", required=True)
    u0 = build_initial_field(cfg, grid)
    sampler = NoiseSampler(_sampler_spec(cfg, model, grid), seed, 0)
    path = simulate(model, scheme, u0, T, sampler=sampler)

    prefix = output_prefix(cfg)
    norms_file = out / f"{prefix}_norms.csv"
    l2 = np.sqrt(path.l2_sq_series())
    h1 = np.sqrt(path.h1_sq_series())
    mode0 = path.mode0_series()
    rows = [[t, a, b, c] for t, a, b, c in zip(path.times, l2, h1, mode0)]
    write_csv(norms_file, ["t", "l2", "h1", "mode0"], rows)
    outputs = [norms_file.name]

    if (cfg.get_str("experiment", "save_spectra", "false") or "").lower() in ("1", "true", "yes"):
        spec_file = out / f"{prefix}_spectra.csv"
        rows = []
        for i, t in enumerate(path.times):
            for k in range(grid.n_modes + 1):
                c = path.states[i, k]
                rows.append([t, k, c.real, c.imag])
        write_csv(spec_file, ["t", "k", "re", "im"], rows)
        outputs.append(spec_file.name)

    write_manifest(out / f"{prefix}_manifest.json", cfg, "simulate", seed, outputs)
    return 0


def _sampler_spec(cfg: RunConfig, model, grid) -> CovarianceSpec:
    if isinstance(model, TransportHeat):
        return CovarianceSpec.white(grid)
    return model.q


def _mc_config(cfg: RunConfig, seed: int) -> verify_mod.McConfig:
    return verify_mod.McConfig(
        n_paths=cfg.get_int("experiment", "n_paths", 100),
        base_seed=seed,
        tolerance_multiplier=cfg.get_float("experiment", "tolerance_multiplier", 3.0),
    )


def _simulated_paths(cfg, model, scheme, u0, T, seed, n_paths) -> list[SamplePath]:
    spec = _sampler_spec(cfg, model, model.grid)
    paths = []
    for i in range(n_paths):
        sampler = NoiseSampler(spec, seed, i)
        paths.append(simulate(model, scheme, u0, T, sampler=sampler))
    return paths


def run_verify(cfg: RunConfig, out: Path, seed: int) -> int:
    checks = cfg.get_list("experiment", "checks")
    for name in checks:
        if name not in KNOWN_CHECKS:
            raise ConfigError(
                f"experiment.checks names unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}"
            )
    grid = build_grid(cfg)
    mc = _mc_config(cfg, seed)
    reports: list[verify_mod.StatReport] = []
    for name in checks:
        reports.extend(_dispatch_check(name, cfg, grid, seed, mc))

    prefix = output_prefix(cfg)
    report_file = out / f"{prefix}_reports.csv"
    write_csv(report_file, REPORT_HEADER, [report_row(r, seed) for r in reports])
    write_manifest(out / f"{prefix}_manifest.json", cfg, "verify", seed, [report_file.name])
    failed = [r for r in reports if not r.skipped and not r.passed]
    return 1 if failed else 0


def _path_ensemble_args(cfg: RunConfig, grid: TorusGrid, seed: int):
    model = build_model(cfg, grid)
    scheme = build_scheme(cfg)
    T = cfg.get_float("experiment", "t", required=True)
    u0 = build_initial_field(cfg, grid)
    n_paths = cfg.get_int("experiment", "n_paths", 1)
    return model, scheme, T, u0, n_paths


def _dispatch_check(name, cfg, grid, seed, mc) -> list[verify_mod.StatReport]:
    if name == "mass_conservation":
        model, scheme, T, u0, n_paths = _path_ensemble_args(cfg, grid, seed)
        if isinstance(model, (AdditiveHeat, ReactionDiffusion, PorousMedium)):
            return [
                verify_mod.StatReport(
                    name="mass_conservation",
                    estimate=0.0,
                    target=0.0,
                    se=0.0,
                    n=0,
                    tol_kind="abs",
                    tolerance=0.0,
                    skipped=True,
                    note="inapplicable: mean mode is a Brownian motion for additive noise",
                )
            ]
        paths = _simulated_paths(cfg, model, scheme, u0, T, seed, n_paths)
        reps = [verify_mod.mass_conservation_check(p) for p in paths]
        worst = max(reps, key=lambda r: r.estimate)
        return [worst]

    if name == "energy_identity":
        model, scheme, T, u0, n_paths = _path_ensemble_args(cfg, grid, seed)
        if not isinstance(model, TransportHeat):
            raise ConfigError("energy_identity check requires model.kind = transport_heat")
        rel_tol = cfg.get_float("experiment", "rel_tol", 0.05)
        worst = None
        for i in range(n_paths):
            ladder = verify_mod.energy_identity_refinement(
                model, u0, T, [scheme.dt, scheme.dt / 2.0], seed, i, rel_tol
            )
            fine = ladder[-1]
            if worst is None or fine.estimate > worst.estimate:
                worst = fine
        return [worst]

    if name == "gronwall":
        model, scheme, T, u0, n_paths = _path_ensemble_args(cfg, grid, seed)
        if not isinstance(model, TransportHeat):
            raise ConfigError("gronwall check requires model.kind = transport_heat")
        slack = cfg.get_float("experiment", "slack", 0.05)
        if model.sigma_total >= 2.0:
            return [
                verify_mod.StatReport(
                    name="gronwall",
                    estimate=float("nan"),
                    target=float("nan"),
                    se=0.0,
                    n=0,
                    tol_kind="upper",
                    tolerance=slack,
                    skipped=True,
                    note=f"sigma >= 2 (sigma = {model.sigma_total:g}); bound undefined",
                )
            ]
        paths = _simulated_paths(cfg, model, scheme, u0, T, seed, n_paths)
        reps = [verify_mod.gronwall_check(p, model.sigma_seq, slack) for p in paths]
        worst = max(reps, key=lambda r: r.estimate - r.target)
        return [worst]

    if name == "ito_isometry":
        T = cfg.get_float("experiment", "t", required=True)
        phi_kind = cfg.get_str("experiment", "phi", "single_mode")
        count = cfg.get_int("experiment", "phi_count", 16)
        if phi_kind == "single_mode":
            phi, lam = np.array([1.0]), np.array([1.0])
        elif phi_kind == "inverse_k":
            phi = 1.0 / np.arange(1, count + 1)
            lam = np.ones(count)
        elif phi_kind == "white":
            phi = np.ones(2 * count + 1)
            lam = np.ones(2 * count + 1)
        else:
            raise ConfigError("experiment.phi must be single_mode|inverse_k|white")
        return [verify_mod.ito_isometry_mc(phi, lam, T, mc)]

    if name == "trace_identity":
        spec = build_noise(cfg, grid)
        T = cfg.get_float("experiment", "t", required=True)
        return [verify_mod.trace_identity_mc(spec, T, mc)]

    if name == "wiener_covariance":
        spec = build_noise(cfg, grid)
        s = cfg.get_float("experiment", "s", 0.3)
        t = cfg.get_float("experiment", "t", required=True)
        h = build_initial_field(cfg, grid, key="h")
        g = build_initial_field(cfg, grid, key="g")
        return [verify_mod.wiener_covariance_mc(spec, h, g, s, t, mc)]

    if name == "quadratic_variation":
        T = cfg.get_float("experiment", "t", required=True)
        n_int = cfg.get_int("experiment", "qv_intervals", 2**14)
        rel_tol = cfg.get_float("experiment", "rel_tol", 0.05)
        levels = [max(1, n_int // 16), max(1, n_int // 4), n_int]
        hit = 0
        worst = None
        for i in range(mc.n_paths):
            values = verify_mod.brownian_scalar_path(seed, n_int, T, stream_id=i)
            rep = verify_mod.quadratic_variation_partition(values, levels, T, rel_tol)
            hit += rep.passed
            if worst is None or abs(rep.estimate - T) > abs(worst.estimate - T):
                worst = rep
        frac = verify_mod.StatReport(
            name="quadratic_variation",
            estimate=hit / mc.n_paths,
            target=0.9,
            se=0.0,
            n=mc.n_paths,
            tol_kind="lower",
            tolerance=0.0,
            metadata={"intervals": n_int},
        )
        smooth = np.arange(2**21 + 1) / 2**21 * T
        smooth = smooth + 0.1 * np.sin(2 * np.pi * smooth / T)
        smooth_rep = verify_mod.quadratic_variation_partition(smooth, [2**21], 0.0, 1e-6)
        smooth_rep = verify_mod.StatReport(
            name="quadratic_variation_smooth",
            estimate=smooth_rep.estimate,
            target=0.0,
            se=0.0,
            n=2**21,
            tol_kind="abs",
            tolerance=1e-6,
            note="finite-variation path: partition sums vanish under refinement",
        )
        return [frac, smooth_rep]

    if name == "ito_strat":
        model, scheme, T, u0, _ = _path_ensemble_args(cfg, grid, seed)
        if not isinstance(model, TransportHeat):
            raise ConfigError("ito_strat check requires model.kind = transport_heat")
        ladder = cfg.get_floats("experiment", "dt_ladder", [1e-3, 2.5e-4, 6.25e-5])
        return [verify_mod.ito_strat_compare(model.sigma_seq, u0, ladder, T, mc)]

    if name == "gaussian_moment":
        spec = build_noise(cfg, grid)
        return [verify_mod.gaussian_moment_ratio(spec, mc)]

    if name == "ou_exactness":
        spec = build_noise(cfg, grid)
        dt = cfg.get_float("scheme", "dt", required=True)
        modes = [int(k) for k in cfg.get_floats("experiment", "ou_modes", [0, 1, 8])]
        return verify_mod.ou_variance_mc(spec, dt, modes, mc)

    if name == "holder_exponent":
        alpha = cfg.get_float("experiment", "alpha", -0.25)
        lags = cfg.get_floats(
            "experiment", "lags", [2.0**-e for e in range(8, 15)]
        )
        base_time = cfg.get_float("experiment", "base_time", 0.5)
        try:
            return [verify_mod.holder_exponent_fit(alpha, grid.n_modes, lags, base_time)]
        except ValueError as exc:
            raise ConfigError(f"holder_exponent: {exc}") from exc

    raise ConfigError(f"unknown check {name!r}")


def run_burgers(cfg: RunConfig, out: Path, seed: int) -> int:
    kind = cfg.get_str("model", "kind", required=True)
    if kind != "burgers":
        raise ConfigError(f"burgers command requires model.kind = burgers, got {kind!r}")
    grid = build_grid(cfg)
    T = cfg.get_float("experiment", "t", required=True)
    dt = cfg.get_float("scheme", "dt", required=True)
    w0 = build_initial_field(cfg, grid, key="w0")
    try:
        problem = burgers_mod.BurgersProblem(
            grid=grid,
            T=T,
            dt=dt,
            w0=w0,
            p=cfg.get_float("experiment", "p", 4.0),
            picard_tol=cfg.get_float("experiment", "picard_tol", 1e-9),
            picard_maxit=cfg.get_int("experiment", "picard_maxit", 25),
            alpha=cfg.get_float("experiment", "alpha", 0.25),
            window=cfg.get_float("experiment", "window", 0.05),
            q=build_noise(cfg, grid) if "noise" in cfg.sections else None,
        )
    except ValueError as exc:
        raise ConfigError(f"experiment section invalid: {exc}") from exc
    n_seeds = cfg.get_int("experiment", "n_paths", 1)
    prefix = output_prefix(cfg)
    outputs = []
    summary_rows = []
    n_pts = problem.quad_points
    for i in range(n_seeds):
        split = burgers_mod.solve_split(problem, seed, i)
        v_ha = burgers_mod._halpha_rows(split.v_path.states, grid, problem.alpha)
        w_lp = burgers_mod._lp_rows(split.w_path.states, problem.p, n_pts)
        u_l2 = np.sqrt(split.u_path.l2_sq_series())
        steps_per_window = max(1, int(round(problem.window / dt)))
        rows = []
        for j, t in enumerate(split.u_path.times):
            widx = min((j - 1) // steps_per_window if j else 0, len(split.picard_iters) - 1)
            rows.append(
                [t, v_ha[j], w_lp[j], u_l2[j], split.picard_iters[widx], split.residuals[widx]]
            )
        seed_file = out / f"{prefix}_seed{i:03d}.csv"
        write_csv(
            seed_file, ["t", "v_halpha", "w_lp", "u_l2", "picard_iters", "residual"], rows
        )
        outputs.append(seed_file.name)
        rep = burgers_mod.apriori_report(problem, split.w_path, split.v_path)
        summary_rows.append(
            [
                i,
                rep.metadata["sup_w_lp"],
                rep.metadata["w0_lp"],
                rep.metadata["sup_v_halpha"],
                rep.estimate,
                max(split.picard_iters),
                split.residual,
            ]
        )
    agg = [
        "ensemble",
        max(r[1] for r in summary_rows),
        max(r[2] for r in summary_rows),
        max(r[3] for r in summary_rows),
        max(r[4] for r in summary_rows),
        max(r[5] for r in summary_rows),
        max(r[6] for r in summary_rows),
    ]
    summary_file = out / f"{prefix}_summary.csv"
    write_csv(
        summary_file,
        ["seed", "sup_w_lp", "w0_lp", "sup_v_halpha", "apriori_ratio", "max_iters", "max_residual"],
        summary_rows + [agg],
    )
    outputs.append(summary_file.name)
    write_manifest(out / f"{prefix}_manifest.json", cfg, "burgers", seed, outputs)
    return 0


def run_regularity(cfg: RunConfig, out: Path, seed: int) -> int:
    grid = build_grid(cfg)
    alphas = cfg.get_floats("experiment", "alpha", [-0.25])
    lags = cfg.get_floats("experiment", "lags", [2.0**-e for e in range(8, 15)])
    base_time = cfg.get_float("experiment", "base_time", 0.5)
    prefix = output_prefix(cfg)
    reports = []
    curve_rows = []
    for alpha in alphas:
        try:
            rep = verify_mod.holder_exponent_fit(alpha, grid.n_modes, lags, base_time)
        except ValueError as exc:
            raise ConfigError(f"regularity: {exc}") from exc
        reports.append(rep)
        for lag, value in zip(rep.metadata["lags"], rep.metadata["structure_values"]):
            curve_rows.append([alpha, lag, value])
    curve_file = out / f"{prefix}_structure.csv"
    write_csv(curve_file, ["alpha", "lag", "structure"], curve_rows)
    report_file = out / f"{prefix}_reports.csv"
    write_csv(report_file, REPORT_HEADER, [report_row(r, seed) for r in reports])
    write_manifest(
        out / f"{prefix}_manifest.json", cfg, "regularity", seed, [curve_file.name, report_file.name]
    )
    return 1 if any(not r.passed for r in reports) else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spdekit",
        description="Spectral Galerkin SPDE simulation and verification on the torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "verify", "burgers", "regularity"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="path to the INI experiment file")
        cmd.add_argument("--seed", type=int, default=None, help="override experiment.base_seed")
        cmd.add_argument("--out", default=None, help="override output.directory")
    args = parser.parse_args(argv)

    runners = {
        "simulate": run_simulate,
        "verify": run_verify,
        "burgers": run_burgers,
        "regularity": run_regularity,
    }
    try:
        cfg = load_config(args.config)
        out = output_dir(cfg, args.out)
        seed = effective_seed(cfg, args.seed)
        return runners[args.command](cfg, out, seed)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except burgers_mod.PicardError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
