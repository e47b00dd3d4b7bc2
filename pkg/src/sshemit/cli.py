"""Batch command-line front end.

One subcommand per reproducible experiment; every run writes its CSV/JSON
artifacts plus a manifest.json carrying the effective parameters and wall
time into the output directory.  Parameters come from built-in defaults,
overridden by --config JSON, overridden by command-line flags.  Outputs
are deterministic for a fixed seed at any --threads value.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import dynamics, dyson, micropillar, noise, oracle, quasistatic
from .lattice import ChainParams

SCHEMA_VERSION = 1

_CHAIN_KEYS = {
    "n_sites": (int, 80),
    "j0": (float, 30.0),
    "theta_pi": (float, 1 / 4.2),  # theta as a multiple of pi
    "epsilon": (float, 0.5),
    "tau": (float, 0.5),
    "noise_dt": (float, 0.05),
    "t_total": (float, 800.0),
    "n_realizations": (int, 10),
    "dt": (float, 0.002),
    "emission_site": (int, 1),
    "initial_state": (str, "edge_mode"),
    "initial_site": (int, 1),
    "half_width": (float, 8.0),
    "n_points": (int, 4001),
}

_GRID = lambda default: (lambda s: [float(v) for v in str(s).split(",")], default)  # noqa: E731

_SCHEMAS = {
    "spectrum-single": {
        **_CHAIN_KEYS,
        "n_sites": (int, 1), "t_total": (float, 400.0), "dt": (float, 0.05),
        "initial_state": (str, "single_site"), "weighting": (str, "relative"),
        "per_realization": (int, 1),
    },
    "spectrum-chain": {**_CHAIN_KEYS, "weighting": (str, "relative"),
                       "per_realization": (int, 1)},
    "sweep-size": {**_CHAIN_KEYS, "grid": _GRID([20.0, 40.0, 80.0])},
    "sweep-theta": {**_CHAIN_KEYS, "grid_pi": _GRID([0.15, 0.20, 0.23])},
    "sweep-j0": {**_CHAIN_KEYS, "grid": _GRID([10.0, 20.0, 30.0, 50.0])},
    "trivial-chain": {**_CHAIN_KEYS, "t_total": (float, 400.0)},
    "quasistatic-dos": {
        "n_sites": (int, 80), "j0": (float, 5.0), "epsilon": (float, 0.5),
        "n_samples": (int, 2000), "bins": (int, 200),
        "thetas_pi": _GRID([0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]),
    },
    "edge-stats": {
        "n_sites": (int, 80), "j0": (float, 5.0), "epsilon": (float, 0.5),
        "n_samples": (int, 2000), "thetas_pi": _GRID([0.0, 0.1, 0.15, 0.2, 0.23]),
    },
    "dyson": {
        "epsilon": (float, 0.5), "tau": (float, 0.5),
        "self_consistent": (int, 1), "init_im": (float, -1e-5),
        "tol": (float, 1e-6), "max_iter": (int, 100), "mixing": (float, 1.0),
        "kernel_exponent": (float, 1.0),
    },
    "pillar-hopping": {
        "depth": (float, 10.0), "diameter": (float, 10.0), "distance": (float, 5.0),
        "m_eff": (float, 0.05), "dimension": (int, 1),
    },
    "pillar-sweep": {
        "variable": (str, "depth"), "depth": (float, 10.0), "diameter": (float, 10.0),
        "distance": (float, 15.0), "m_eff": (float, 0.2), "dimension": (int, 1),
        "grid": _GRID([10.0, 14.0, 18.0, 22.0, 28.0]),
    },
    "cavity-sweep": {
        "depth": (float, 18.0), "diameter": (float, 10.0), "distance": (float, 15.0),
        "m_eff": (float, 0.05), "dimension": (int, 1), "m_c": (float, 1e-4),
        "grid": _GRID([0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0]),
    },
    "validate-noise": {
        "epsilon": (float, 0.5), "tau": (float, 0.5), "noise_dt": (float, 0.05),
        "n_trajectories": (int, 10000), "t_traj": (float, 50.0),
    },
    "validate-oracle": {
        "j0": (float, 1.0), "theta_pi": (float, 0.2), "epsilon": (float, 0.5),
        "tau": (float, 0.5), "noise_dt": (float, 0.05), "t_total": (float, 40.0),
        "sizes": _GRID([2.0, 4.0, 6.0]),
    },
}


class ConfigError(Exception):
    pass


def _load_config(schema: dict, path: str | None, overrides: dict) -> dict:
    cfg = {key: default for key, (_, default) in schema.items()}
    cfg["seed"] = 12345
    cfg["threads"] = int(os.environ.get("SSH_SIM_THREADS", "1"))
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data.pop("schema_version", None)
        for key, value in data.items():
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = _coerce(schema, key, value)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in cfg:
            raise ConfigError(f"unknown override {key!r}")
        cfg[key] = _coerce(schema, key, value)
    return cfg


def _coerce(schema: dict, key: str, value):
    if key in ("seed", "threads"):
        return int(value)
    caster = schema[key][0]
    try:
        return caster(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def _evolution_config(cfg: dict) -> dynamics.EvolutionConfig:
    chain = ChainParams(n_sites=cfg["n_sites"], j0=cfg["j0"],
                        theta=cfg["theta_pi"] * np.pi)
    nz = noise.NoiseParams(epsilon=cfg["epsilon"], tau=cfg["tau"], dt=cfg["noise_dt"],
                           t_total=cfg["t_total"], n_realizations=cfg["n_realizations"],
                           seed=cfg["seed"])
    return dynamics.EvolutionConfig(
        chain=chain, noise=nz, emission_site=cfg["emission_site"],
        initial_state=cfg["initial_state"], initial_site=cfg["initial_site"],
        dt=cfg["dt"], t_total=cfg["t_total"],
    )


def _fit_to_dict(fit: dynamics.LorentzianFit) -> dict:
    return {"center_meV": fit.center, "fwhm_meV": fit.fwhm, "amplitude": fit.amplitude,
            "baseline": fit.baseline, "residual_rms": fit.residual_rms,
            "n_points": fit.n_points, "accepted": fit.accepted}


def _run_spectrum(cfg: dict, out: Path) -> list[str]:
    config = _evolution_config(cfg)
    amps = dynamics.run_emission(config, threads=cfg["threads"])
    rec = dynamics.spectrum(amps, config.dt, half_width=cfg["half_width"],
                            n_points=cfg["n_points"], keep_amplitudes=False)
    files = []
    if cfg["per_realization"]:
        for r in range(rec.per_realization.shape[0]):
            name = f"spectrum_r{r:02d}.csv"
            dynamics.write_spectrum_csv(out / name, rec.energies, rec.per_realization[r])
            files.append(name)
    dynamics.write_spectrum_csv(out / "spectrum_avg.csv", rec.energies, rec.averaged)
    files.append("spectrum_avg.csv")
    result = {
        "gamma_iqr_meV": dynamics.spectral_width_iqr(rec.energies, rec.averaged),
        "gamma_fwhm_meV": dynamics.fwhm_direct(rec.energies, rec.averaged,
                                               smooth_bins=max(1, cfg["n_points"] // 400)),
        "window_floor_meV": dynamics.window_floor_fwhm(cfg["t_total"]),
    }
    try:
        fit = dynamics.fit_lorentzian(rec.energies, rec.averaged,
                                      weighting=cfg["weighting"])
        result["fit"] = _fit_to_dict(fit)
    except dynamics.FitError as exc:
        result["fit"] = {"error": str(exc)}
    with open(out / "fit.json", "w") as fh:
        json.dump(result, fh, indent=2)
    files.append("fit.json")
    return files


def _run_sweep(experiment: str, grid, cfg: dict, out: Path) -> list[str]:
    base = _evolution_config(cfg)
    rows = dynamics.sweep(experiment, grid, base, threads=cfg["threads"],
                          half_width=cfg["half_width"], n_points=cfg["n_points"])
    dynamics.write_sweep_csv(out / "sweep.csv", rows)
    dynamics.write_sweep_detail_csv(out / "sweep_detail.csv", rows)
    return ["sweep.csv", "sweep_detail.csv"]


def _cmd_sweep_size(cfg, out):
    return _run_sweep("vs_N", [int(v) for v in cfg["grid"]], cfg, out)


def _cmd_sweep_theta(cfg, out):
    return _run_sweep("vs_theta", [v * np.pi for v in cfg["grid_pi"]], cfg, out)


def _cmd_sweep_j0(cfg, out):
    return _run_sweep("vs_J0", cfg["grid"], cfg, out)


def _cmd_trivial(cfg, out):
    files = _run_sweep("trivial_chain", [cfg["n_sites"]], cfg, out)
    config = dynamics._point_config("trivial_chain", cfg["n_sites"], _evolution_config(cfg))
    amps = dynamics.run_emission(config, threads=cfg["threads"])
    rec = dynamics.spectrum(amps, config.dt, half_width=cfg["half_width"],
                            n_points=cfg["n_points"], keep_amplitudes=False)
    dynamics.write_spectrum_csv(out / "spectrum_avg.csv", rec.energies, rec.averaged)
    return files + ["spectrum_avg.csv"]


def _cmd_quasistatic_dos(cfg, out):
    chain = ChainParams(n_sites=cfg["n_sites"], j0=cfg["j0"], theta=0.0)
    ens = quasistatic.DisorderEnsemble(chain=chain, epsilon=cfg["epsilon"],
                                       n_samples=cfg["n_samples"], seed=cfg["seed"])
    hists = quasistatic.dos_map([v * np.pi for v in cfg["thetas_pi"]], ens,
                                bins=cfg["bins"])
    quasistatic.write_dos_csv(out / "dos.csv", hists)
    return ["dos.csv"]


def _cmd_edge_stats(cfg, out):
    chain = ChainParams(n_sites=cfg["n_sites"], j0=cfg["j0"], theta=0.0)
    ens = quasistatic.DisorderEnsemble(chain=chain, epsilon=cfg["epsilon"],
                                       n_samples=cfg["n_samples"], seed=cfg["seed"])
    stats = quasistatic.edge_eigenvalue_stats([v * np.pi for v in cfg["thetas_pi"]], ens)
    quasistatic.write_edge_stats_csv(out / "edge_samples.csv", stats)
    with open(out / "edge_summary.json", "w") as fh:
        json.dump([{"theta": s.theta, "std_meV": s.std, "ambiguous": s.ambiguous,
                    "edge_weight": s.edge_weight} for s in stats], fh, indent=2)
    return ["edge_samples.csv", "edge_summary.json"]


def _cmd_dyson(cfg, out):
    lowest = dyson.self_energy_lowest_order(cfg["epsilon"], cfg["tau"])
    result = {"lowest_order": {"im_sigma_meV": lowest.value.imag,
                               "gamma_meV": lowest.linewidth}}
    files = []
    if cfg["self_consistent"]:
        sc = dyson.self_energy_self_consistent(
            cfg["epsilon"], cfg["tau"], init=cfg["init_im"] * 1j, tol=cfg["tol"],
            max_iter=cfg["max_iter"], mixing=cfg["mixing"],
            kernel_exponent=cfg["kernel_exponent"])
        dyson.write_iteration_csv(out / "dyson_trace.csv", sc)
        files.append("dyson_trace.csv")
        result["self_consistent"] = {
            "im_sigma_meV": sc.value.imag, "gamma_meV": sc.linewidth,
            "iterations": sc.iterations, "kernel_exponent": cfg["kernel_exponent"],
        }
    with open(out / "dyson.json", "w") as fh:
        json.dump(result, fh, indent=2)
    files.append("dyson.json")
    return files


def _geometry(cfg) -> micropillar.PillarGeometry:
    return micropillar.PillarGeometry(
        well_depth=cfg["depth"], well_diameter=cfg["diameter"],
        center_separation=cfg["distance"], m_eff=cfg["m_eff"],
        dimension=cfg["dimension"])


def _cmd_pillar_hopping(cfg, out):
    est = micropillar.solve_double_well(_geometry(cfg), return_states=True)
    with open(out / "pillar.json", "w") as fh:
        json.dump({"e0_meV": est.e0, "e1_meV": est.e1, "j_sys_meV": est.j_sys,
                   "doublet_bound": est.doublet_bound}, fh, indent=2)
    micropillar.write_intensity_csv(out / "intensity_ground.csv", est, "ground")
    micropillar.write_intensity_csv(out / "intensity_excited.csv", est, "excited")
    return ["pillar.json", "intensity_ground.csv", "intensity_excited.csv"]


def _cmd_pillar_sweep(cfg, out):
    rows = micropillar.sweep_pillars(cfg["variable"], cfg["grid"], _geometry(cfg))
    micropillar.write_pillar_csv(out / "pillar_sweep.csv", rows)
    return ["pillar_sweep.csv"]


def _cmd_cavity_sweep(cfg, out):
    rows = micropillar.sweep_pillars("delta", cfg["grid"], _geometry(cfg),
                                     cavity=micropillar.CavityParams(0.0, cfg["m_c"]))
    micropillar.write_pillar_csv(out / "cavity_sweep.csv", rows)
    return ["cavity_sweep.csv"]


def _cmd_validate_noise(cfg, out):
    params = noise.NoiseParams(epsilon=cfg["epsilon"], tau=cfg["tau"],
                               dt=cfg["noise_dt"], t_total=cfg["t_traj"],
                               n_realizations=cfg["n_trajectories"], seed=cfg["seed"])
    samples = np.vstack([noise.trajectory(params, r, 0)
                         for r in range(cfg["n_trajectories"])])
    lags_t = [0.0, cfg["tau"], 2 * cfg["tau"], 4 * cfg["tau"]]
    lag_idx = [int(round(v / cfg["noise_dt"])) for v in lags_t]
    est, se = noise.estimate_autocovariance(samples, lag_idx)
    target = noise.autocovariance(np.asarray(lags_t), cfg["epsilon"], cfg["tau"])
    report = []
    for lt, e, s, t in zip(lags_t, est, se, target):
        z = (e - t) / s
        ok = abs(z) <= 3.0
        report.append({"lag_ps": lt, "estimate": e, "target": t,
                       "std_error": s, "z": z, "pass": bool(ok)})
        print(f"lag {lt:5.2f} ps: est {e:+.6f} target {t:+.6f} z {z:+.2f} "
              f"{'PASS' if ok else 'FAIL'}")
    with open(out / "noise_validation.json", "w") as fh:
        json.dump(report, fh, indent=2)
    if not all(r["pass"] for r in report):
        raise RuntimeError("autocovariance validation failed")
    return ["noise_validation.json"]


def _cmd_validate_oracle(cfg, out):
    report = []
    for n in [int(v) for v in cfg["sizes"]]:
        chain = ChainParams(n_sites=n, j0=cfg["j0"], theta=cfg["theta_pi"] * np.pi)
        nz = noise.NoiseParams(epsilon=cfg["epsilon"], tau=cfg["tau"],
                               dt=cfg["noise_dt"], t_total=cfg["t_total"],
                               n_realizations=1, seed=cfg["seed"])
        config = dynamics.EvolutionConfig(chain=chain, noise=nz, dt=cfg["noise_dt"],
                                          t_total=cfg["t_total"],
                                          initial_state="single_site")
        amp = dynamics.propagate(config, 0)
        energies = dynamics.energy_grid(4 * cfg["j0"], 241)
        s_free = dynamics.spectrum([amp], config.dt, energies=energies).averaged

        mb = oracle.ManyBodyChain(chain)
        eps = noise.noise_matrix(nz, n, 0, n_steps=config.n_intervals)
        hist = oracle.evolve_many_body(mb, eps, config.initial_vector(), config.dt)
        c = oracle.correlation_matrix(mb, hist, site=0)
        s_many = oracle.spectrum_from_correlation(c, config.dt, energies)

        dev = float(np.max(np.abs(s_many - s_free)) / np.max(s_free))
        ok = dev < 1e-6
        report.append({"n_sites": n, "max_rel_deviation": dev, "pass": bool(ok)})
        print(f"N={n}: max deviation {dev:.3e} of peak {'PASS' if ok else 'FAIL'}")
    with open(out / "oracle_validation.json", "w") as fh:
        json.dump(report, fh, indent=2)
    if not all(r["pass"] for r in report):
        raise RuntimeError("oracle validation failed")
    return ["oracle_validation.json"]


_COMMANDS = {
    "spectrum-single": _run_spectrum,
    "spectrum-chain": _run_spectrum,
    "sweep-size": _cmd_sweep_size,
    "sweep-theta": _cmd_sweep_theta,
    "sweep-j0": _cmd_sweep_j0,
    "trivial-chain": _cmd_trivial,
    "quasistatic-dos": _cmd_quasistatic_dos,
    "edge-stats": _cmd_edge_stats,
    "dyson": _cmd_dyson,
    "pillar-hopping": _cmd_pillar_hopping,
    "pillar-sweep": _cmd_pillar_sweep,
    "cavity-sweep": _cmd_cavity_sweep,
    "validate-noise": _cmd_validate_noise,
    "validate-oracle": _cmd_validate_oracle,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sshemit",
        description="Emitter-chain linewidth experiments; CSV/JSON artifacts per run.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in _SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--out", default=".", help="output directory")
        for key in schema:
            p.add_argument(f"--{key.replace('_', '-')}", dest=key)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    name = args.command
    schema = _SCHEMAS[name]
    overrides = {k: getattr(args, k) for k in list(schema) + ["seed", "threads"]
                 if getattr(args, k, None) is not None}
    try:
        cfg = _load_config(schema, args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    try:
        files = _COMMANDS[name](cfg, out)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, dynamics.FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    echo = {"schema_version": SCHEMA_VERSION, **cfg}
    with open(out / "config_echo.json", "w") as fh:
        json.dump(echo, fh, indent=2)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": name,
        "parameters": echo,
        "files": sorted(files + ["config_echo.json"]),
        "wall_clock_s": round(time.time() - started, 3),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
