"""Command-line entry point.

Subcommands:

* ``simulate``  -- one Monte Carlo experiment, one CSV row.
* ``analyze``   -- closed-form / quadrature evaluators over a parameter sweep.
* ``optimize``  -- the threshold and probability design points.
* ``reproduce`` -- canned experiment sweeps (fig1, fig2a, fig2b, fig3), one
  CSV per figure plus a JSON manifest.

Configuration: built-in defaults (500 antennas, density 0.01 /m^2, exclusion
2 m, cell 30 m, exponent 3, noise -150 dBm, waveform 10 ns, efficiency 1,
carrier 900 MHz, transmit power 1 W), overridden by an optional JSON config
file (dBm fields accepted), overridden by CLI flags. Everything internal is
SI. Output CSVs are deterministic for a fixed seed, independent of --threads.

Exit codes: 0 success, 1 invalid configuration/usage, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (AnnulusSpec, asymptotic_limits, lambda_term, q_dbb,
                       q_dib, q_fb_retro, q_pbb, qbar_re)
from .model import SystemParams, validate_params
from .montecarlo import (ExperimentConfig, Policy, POLICY_KINDS,
                         run_policy_experiment, satisfaction_fraction)
from .optimize import delta_star, p_star
from .units import dbm_to_watts

DEFAULT_PARAMS = {
    "n_antennas": 500,
    "er_density": 0.01,
    "exclusion_radius": 2.0,
    "cell_radius": 30.0,
    "path_loss_exp": 3.0,
    "tx_power": 1.0,
    "noise_power": 1e-18,
    "waveform_duration": 1e-8,
    "rf_dc_efficiency": 1.0,
    "carrier_freq": 900e6,
}

# power sweep used by the reproduce figures (dBm); declared here because the
# source experiments leave the grid unspecified
POWER_GRID_DBM = list(range(20, 47, 2))
FIG3_GAMMAS_W = (1e-4, 1e-3)
FIG3_DENSITIES = (0.01, 0.02)
FIGURES = ("fig1", "fig2a", "fig2b", "fig3")

_CONFIG_KEYS = {
    "n_antennas": "n_antennas",
    "er_density": "er_density",
    "exclusion_radius_m": "exclusion_radius",
    "cell_radius_m": "cell_radius",
    "path_loss_exp": "path_loss_exp",
    "tx_power_w": "tx_power",
    "noise_power_w": "noise_power",
    "waveform_duration_s": "waveform_duration",
    "rf_dc_efficiency": "rf_dc_efficiency",
    "carrier_freq_hz": "carrier_freq",
}
_CONFIG_DBM_KEYS = {"tx_power_dbm": "tx_power", "noise_power_dbm": "noise_power"}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    fields = {}
    for key, value in raw.items():
        if key in _CONFIG_KEYS:
            fields[_CONFIG_KEYS[key]] = value
        elif key in _CONFIG_DBM_KEYS:
            fields[_CONFIG_DBM_KEYS[key]] = dbm_to_watts(float(value))
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return fields


def _resolve_params(args) -> SystemParams:
    fields = dict(DEFAULT_PARAMS)
    if args.config:
        fields.update(_load_config_file(args.config))
    flag_map = {
        "antennas": "n_antennas",
        "er_density": "er_density",
        "exclusion_radius": "exclusion_radius",
        "cell_radius": "cell_radius",
        "path_loss_exp": "path_loss_exp",
        "tx_power_w": "tx_power",
        "noise_power_w": "noise_power",
        "waveform_duration": "waveform_duration",
        "rf_dc_efficiency": "rf_dc_efficiency",
        "carrier_freq": "carrier_freq",
    }
    for flag, field in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            fields[field] = value
    if getattr(args, "tx_power_dbm", None) is not None:
        fields["tx_power"] = dbm_to_watts(args.tx_power_dbm)
    if getattr(args, "noise_power_dbm", None) is not None:
        fields["noise_power"] = dbm_to_watts(args.noise_power_dbm)
    try:
        return validate_params(fields)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (dBm keys accepted)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--channel-mode", choices=["reduced", "full"],
                        default="reduced")
    group = parser.add_argument_group("parameter overrides (SI unless noted)")
    group.add_argument("--antennas", type=int)
    group.add_argument("--er-density", type=float)
    group.add_argument("--exclusion-radius", type=float)
    group.add_argument("--cell-radius", type=float)
    group.add_argument("--path-loss-exp", type=float)
    group.add_argument("--tx-power-w", type=float)
    group.add_argument("--tx-power-dbm", type=float)
    group.add_argument("--noise-power-w", type=float)
    group.add_argument("--noise-power-dbm", type=float)
    group.add_argument("--waveform-duration", type=float)
    group.add_argument("--rf-dc-efficiency", type=float)
    group.add_argument("--carrier-freq", type=float)


def _build_parser() -> _Parser:
    parser = _Parser(prog="retrowpt",
                     description="retrodirective backscatter energy simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[], help="run one experiment")
    _add_common(p_sim)
    p_sim.add_argument("--policy", choices=POLICY_KINDS, required=True)
    p_sim.add_argument("--delta", type=float, help="threshold distance for dbb (m)")
    p_sim.add_argument("--p", type=float, help="reflection probability for pbb")
    p_sim.add_argument("--gamma", type=float, help="retro target for htb (W)")
    p_sim.add_argument("--max-iter", type=int, default=100)
    p_sim.add_argument("--tagged-distance", type=float,
                       help="pin one receiver at this distance and report it (m)")
    p_sim.add_argument("--per-sample-csv", action="store_true",
                       help="also write every sample to samples.csv")

    p_an = sub.add_parser("analyze", help="evaluate the analytic expressions")
    _add_common(p_an)
    p_an.add_argument("--quantity", required=True,
                      choices=["lambda", "q_dib", "q_fb", "q_dbb", "q_pbb",
                               "limits"])
    p_an.add_argument("--sweep",
                      help="param=start:stop:count[:log] with param in "
                           "{tx_power_dbm, er_density, delta, p}")
    p_an.add_argument("--delta", type=float, help="threshold for q_dbb (m)")
    p_an.add_argument("--p", type=float, help="probability for q_pbb")

    p_opt = sub.add_parser("optimize", help="solve the design points")
    _add_common(p_opt)
    p_opt.add_argument("target", choices=["delta", "p"])
    p_opt.add_argument("--no-self-reflection", action="store_true",
                       help="drop the tagged receiver's own reflection "
                            "probability from the p objective")

    p_rep = sub.add_parser("reproduce", help="run a canned figure sweep")
    _add_common(p_rep)
    p_rep.add_argument("figure", choices=FIGURES)
    return parser


def _fmt(value: float) -> str:
    return f"{value:.10e}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(outdir: Path, command: str, args, params: SystemParams,
                    outputs: list[str], metadata: dict, started: float,
                    target: str | None = None) -> Path:
    manifest = {
        "schema_version": 1,
        "tool": "retrowpt",
        "code_version": __version__,
        "command": command,
        "seed": int(args.seed),
        "trials": int(getattr(args, "trials", 0)),
        "threads": int(args.threads),
        "channel_mode": args.channel_mode,
        "params": {
            "n_antennas": params.n_antennas,
            "er_density": params.er_density,
            "exclusion_radius": params.exclusion_radius,
            "cell_radius": params.cell_radius,
            "path_loss_exp": params.path_loss_exp,
            "tx_power": params.tx_power,
            "noise_power": params.noise_power,
            "waveform_duration": params.waveform_duration,
            "rf_dc_efficiency": params.rf_dc_efficiency,
            "carrier_freq": params.carrier_freq,
        },
        "outputs": outputs,
        "metadata": metadata,
        "wall_time_s": time.perf_counter() - started,
    }
    if target is not None:
        manifest["target"] = target
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _policy_from_args(args) -> Policy:
    return Policy(kind=args.policy, delta=args.delta, p=args.p,
                  gamma=args.gamma, max_iter=args.max_iter)


def _cmd_simulate(args) -> int:
    started = time.perf_counter()
    params = _resolve_params(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        config = ExperimentConfig(params=params, policy=_policy_from_args(args),
                                  trials=args.trials, seed=args.seed,
                                  channel_mode=args.channel_mode,
                                  tagged_distance=args.tagged_distance)
        config.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    result = run_policy_experiment(config, workers=args.threads,
                                   keep_samples=args.per_sample_csv)
    est = result.estimate
    header = ["policy", "channel_mode", "tagged_distance_m", "mean_w",
              "stderr_w", "ci_low_w", "ci_high_w", "n", "empty_trials"]
    tagged = "" if args.tagged_distance is None else f"{args.tagged_distance:.6g}"
    rows = [[args.policy, args.channel_mode, tagged, _fmt(est.mean),
             _fmt(est.stderr), _fmt(est.ci95[0]), _fmt(est.ci95[1]), est.n,
             result.empty_trials]]
    csv_path = outdir / "simulate.csv"
    _write_csv(csv_path, header, rows)
    outputs = [csv_path.name]
    if args.per_sample_csv:
        sample_path = outdir / "samples.csv"
        _write_csv(sample_path, ["sample_w"],
                   [[_fmt(v)] for v in result.samples])
        outputs.append(sample_path.name)
    _write_manifest(outdir, "simulate", args, params, outputs,
                    result.metadata, started)
    print(f"{args.policy}: mean {est.mean:.6e} W +- {est.stderr:.2e} "
          f"(n={est.n})")
    return 0


def _parse_sweep(spec: str):
    try:
        name, rest = spec.split("=", 1)
        pieces = rest.split(":")
        log = False
        if len(pieces) == 4:
            if pieces[3] != "log":
                raise ValueError
            log = True
            pieces = pieces[:3]
        start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad sweep spec {spec!r}; expected "
                          "param=start:stop:count[:log]") from exc
    if count < 1:
        raise ConfigError("sweep count must be >= 1")
    if name not in ("tx_power_dbm", "er_density", "delta", "p"):
        raise ConfigError(f"unknown sweep parameter {name!r}")
    if log:
        if start <= 0 or stop <= 0:
            raise ConfigError("log sweeps need positive endpoints")
        grid = np.geomspace(start, stop, count)
    else:
        grid = np.linspace(start, stop, count)
    return name, [float(g) for g in grid]


def _analyze_value(quantity: str, params: SystemParams, args) -> list[tuple[str, float]]:
    full = AnnulusSpec(params.exclusion_radius, params.cell_radius)
    if quantity == "lambda":
        return [("lambda_w", lambda_term(full, params))]
    if quantity == "q_dib":
        return [("q_dib_w", q_dib(params))]
    if quantity == "q_fb":
        retro = q_fb_retro(params.exclusion_radius, params.er_density, params)
        return [("q_fb_retro_w", retro),
                ("q_fb_total_w", lambda_term(full, params) + retro)]
    if quantity == "q_dbb":
        if args.delta is None:
            raise ConfigError("q_dbb needs --delta or a delta sweep")
        return [("q_dbb_w", q_dbb(args.delta, params))]
    if quantity == "q_pbb":
        if args.p is None:
            raise ConfigError("q_pbb needs --p or a p sweep")
        return [("q_pbb_w", q_pbb(args.p, params))]
    if quantity == "limits":
        dense, sparse = asymptotic_limits(params)
        return [("dense_limit_w", dense), ("sparse_limit_w", sparse)]
    raise ConfigError(f"unknown quantity {quantity!r}")


def _cmd_analyze(args) -> int:
    started = time.perf_counter()
    base_params = _resolve_params(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    points: list[tuple[str, float | None]] = [("", None)]
    if args.sweep:
        name, grid = _parse_sweep(args.sweep)
        points = [(name, value) for value in grid]

    rows = []
    for name, value in points:
        params = base_params
        if name == "tx_power_dbm":
            params = validate_params({**_params_dict(base_params),
                                      "tx_power": dbm_to_watts(value)})
        elif name == "er_density":
            params = validate_params({**_params_dict(base_params),
                                      "er_density": value})
        elif name == "delta":
            args.delta = value
        elif name == "p":
            args.p = value
        for label, result in _analyze_value(args.quantity, params, args):
            rows.append([label, name, "" if value is None else f"{value:.10g}",
                         _fmt(result)])

    csv_path = outdir / "analyze.csv"
    _write_csv(csv_path, ["quantity", "param_name", "param_value", "value_w"],
               rows)
    _write_manifest(outdir, "analyze", args, base_params, [csv_path.name],
                    {"quantity": args.quantity, "sweep": args.sweep or ""},
                    started)
    for row in rows:
        print(",".join(str(c) for c in row))
    return 0


def _params_dict(params: SystemParams) -> dict:
    return {
        "n_antennas": params.n_antennas,
        "er_density": params.er_density,
        "exclusion_radius": params.exclusion_radius,
        "cell_radius": params.cell_radius,
        "path_loss_exp": params.path_loss_exp,
        "tx_power": params.tx_power,
        "noise_power": params.noise_power,
        "waveform_duration": params.waveform_duration,
        "rf_dc_efficiency": params.rf_dc_efficiency,
        "carrier_freq": params.carrier_freq,
    }


def _cmd_optimize(args) -> int:
    started = time.perf_counter()
    params = _resolve_params(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.target == "delta":
        result = delta_star(params)
        print(f"delta_star_m={result.argument:.9g}")
    else:
        result = p_star(params,
                        include_self_reflection=not args.no_self_reflection)
        print(f"p_star={result.argument:.9g}")
    print(f"objective_w={result.objective:.10e}")
    print(f"branch={result.branch}")
    print(f"converged={result.converged}")
    payload = {
        "target": args.target,
        "argument": result.argument,
        "objective_w": result.objective,
        "branch": result.branch,
        "converged": result.converged,
    }
    json_path = outdir / "optimize.json"
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(outdir, "optimize", args, params, [json_path.name],
                    payload, started)
    return 0


def _fig1_rows(params: SystemParams, args) -> list[list]:
    rows = []
    for pt_dbm in POWER_GRID_DBM:
        swept = validate_params({**_params_dict(params),
                                 "tx_power": dbm_to_watts(pt_dbm)})
        for kind in ("none", "dib", "fb", "perfect_bf"):
            config = ExperimentConfig(params=swept, policy=Policy(kind=kind),
                                      trials=args.trials, seed=args.seed,
                                      channel_mode=args.channel_mode)
            result = run_policy_experiment(config, workers=args.threads)
            est = result.estimate
            rows.append([f"{pt_dbm:g}", kind, _fmt(est.mean),
                         _fmt(est.stderr), est.n])
    return rows


def _fig2_params(params: SystemParams) -> SystemParams:
    """The threshold/probability sweeps run at a wider exclusion ring and
    40 dBm transmit power."""
    return validate_params({**_params_dict(params),
                            "exclusion_radius": 8.0,
                            "tx_power": dbm_to_watts(40.0)})


def _fig2a_rows(params: SystemParams, args) -> tuple[list[list], dict]:
    xi, rho = params.exclusion_radius, params.cell_radius
    deltas = np.linspace(xi, rho, 23)[:-1]  # at delta=rho nobody reflects
    rows = []
    for delta in deltas:
        for series, tagged in (("inner", xi), ("edge", rho)):
            config = ExperimentConfig(params=params,
                                      policy=Policy(kind="dbb", delta=float(delta)),
                                      trials=args.trials, seed=args.seed,
                                      channel_mode=args.channel_mode,
                                      tagged_distance=tagged)
            result = run_policy_experiment(config, workers=args.threads)
            est = result.estimate
            rows.append([f"{delta:.6g}", f"mc_{series}_total", _fmt(est.mean),
                         _fmt(est.stderr), est.n])
        omni_inner = (params.rf_dc_efficiency * params.tx_power
                      * xi ** (-params.path_loss_exp))
        omni_edge = (params.rf_dc_efficiency * params.tx_power
                     * rho ** (-params.path_loss_exp))
        edge_analytic = omni_edge + qbar_re(rho, float(delta),
                                            params.er_density, params)
        rows.append([f"{delta:.6g}", "analytic_inner_total", _fmt(omni_inner),
                     _fmt(0.0), 0])
        rows.append([f"{delta:.6g}", "analytic_edge_total", _fmt(edge_analytic),
                     _fmt(0.0), 0])
    opt = delta_star(params)
    meta = {"delta_star_m": opt.argument, "delta_star_branch": opt.branch,
            "delta_star_objective_w": opt.objective,
            "delta_grid_m": [float(d) for d in deltas]}
    return rows, meta


def _fig2b_rows(params: SystemParams, args) -> tuple[list[list], dict]:
    xi, rho = params.exclusion_radius, params.cell_radius
    ps = np.linspace(0.05, 1.0, 20)
    omni_edge = (params.rf_dc_efficiency * params.tx_power
                 * rho ** (-params.path_loss_exp))
    rows = []
    for p in ps:
        config = ExperimentConfig(params=params,
                                  policy=Policy(kind="pbb", p=float(p)),
                                  trials=args.trials, seed=args.seed,
                                  channel_mode=args.channel_mode,
                                  tagged_distance=rho)
        result = run_policy_experiment(config, workers=args.threads)
        est = result.estimate
        rows.append([f"{p:.6g}", "mc_edge_total", _fmt(est.mean),
                     _fmt(est.stderr), est.n])
        analytic = omni_edge + p * qbar_re(rho, xi, p * params.er_density,
                                           params)
        rows.append([f"{p:.6g}", "analytic_edge_total", _fmt(analytic),
                     _fmt(0.0), 0])
    opt = p_star(params)
    meta = {"p_star": opt.argument, "p_star_objective_w": opt.objective,
            "p_grid": [float(p) for p in ps]}
    return rows, meta


def _fig3_rows(params: SystemParams, args) -> list[list]:
    rows = []
    for density in FIG3_DENSITIES:
        for gamma in FIG3_GAMMAS_W:
            for pt_dbm in POWER_GRID_DBM:
                swept = validate_params({**_params_dict(params),
                                         "er_density": density,
                                         "tx_power": dbm_to_watts(pt_dbm)})
                config = ExperimentConfig(
                    params=swept,
                    policy=Policy(kind="htb", gamma=gamma, max_iter=100),
                    trials=args.trials, seed=args.seed,
                    channel_mode=args.channel_mode)
                result = satisfaction_fraction(config, workers=args.threads)
                for policy, fraction in (("htb", result.htb_fraction),
                                         ("fb", result.fb_fraction)):
                    rows.append([f"{pt_dbm:g}", policy, _fmt(gamma),
                                 f"{density:.6g}", f"{fraction:.8f}",
                                 result.n_receivers])
    return rows


def _cmd_reproduce(args) -> int:
    started = time.perf_counter()
    params = _resolve_params(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    metadata: dict = {"estimator": "pooled_per_er",
                      "power_grid_dbm": POWER_GRID_DBM}
    if args.figure == "fig1":
        header = ["pt_dbm", "policy", "mean_w", "stderr_w", "n"]
        rows = _fig1_rows(params, args)
    elif args.figure == "fig2a":
        params = _fig2_params(params)
        header = ["delta_m", "series", "mean_w", "stderr_w", "n"]
        rows, extra = _fig2a_rows(params, args)
        metadata = {"estimator": "tagged_er", **extra}
    elif args.figure == "fig2b":
        params = _fig2_params(params)
        header = ["p", "series", "mean_w", "stderr_w", "n"]
        rows, extra = _fig2b_rows(params, args)
        metadata = {"estimator": "tagged_er", **extra}
    else:
        header = ["pt_dbm", "policy", "gamma_w", "density_per_m2", "fraction",
                  "n"]
        rows = _fig3_rows(params, args)
        metadata = {"estimator": "pooled_per_er",
                    "power_grid_dbm": POWER_GRID_DBM,
                    "gammas_w": list(FIG3_GAMMAS_W),
                    "densities_per_m2": list(FIG3_DENSITIES)}

    csv_path = outdir / f"{args.figure}.csv"
    _write_csv(csv_path, header, rows)
    _write_manifest(outdir, "reproduce", args, params, [csv_path.name],
                    metadata, started, target=args.figure)
    print(f"wrote {csv_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "analyze": _cmd_analyze,
        "optimize": _cmd_optimize,
        "reproduce": _cmd_reproduce,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"retrowpt: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 -- the CLI boundary reports and exits
        print(f"retrowpt: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
