"""Configuration-driven command-line front end.

    rydgate <mode> --config <path> [--set key=value]... [--seed N]
            [--out dir] [--json]

Modes: simulate (one pulse, gate characterization), optimize (pulse-family
search), sweep (optimizer or error-mechanism sweeps, figure-ready CSV),
budget (the full error budget table). Exit codes: 0 success, 1 config
error, 2 numerical non-convergence, 3 infeasible optimization.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import budget as budget_mod
from .config import ConfigError, ExperimentConfig, parse_config
from .dynamics import IntegrationError
from .hamiltonian import Couplings
from .metrics import characterize_gate
from .optimize import OptimizationProblem, dcrab_optimize, direct_search, sweep
from .output import SchemaError, emit_figure_data, write_csv, write_json
from .pulses import Family
from .spaces import build_space

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICS = 2
EXIT_INFEASIBLE = 3

_OPT_SWEEPS = {"width": "fig3", "kappa": "fig4", "v": "fig2d"}
_BUDGET_SWEEPS = {"decay_rate": "fig5a", "trap_z": "fig5b", "trap_x": "fig5c"}


def _couplings(cfg: ExperimentConfig) -> Couplings:
    if "v_over_omega0" in cfg.raw and "omega0_over_2pi_mhz" not in cfg.raw:
        return Couplings(v=float(cfg.raw["v_over_omega0"]))
    return cfg.system().couplings()


def _out_path(out_dir, cfg, default_stem):
    stem = cfg.get("label", default_stem)
    return Path(out_dir) / f"{stem}.csv"


def _emit(path, columns, rows, cfg, seed, json_mirror, extra=()):
    write_csv(path, columns, rows, cfg.resolved_items(), seed=seed, extra=extra)
    if json_mirror:
        write_json(str(path) + ".json", columns, rows, cfg.resolved_items(),
                   seed=seed, extra=extra)
    print(f"wrote {path}")


def _run_simulate(cfg, out_dir, seed, json_mirror):
    pulse = cfg.pulse()
    couplings = _couplings(cfg)
    tolerance = cfg.get("tolerance", 1e-10)
    result = characterize_gate(pulse, build_space(), couplings,
                               flags=("decay",) if couplings.gamma > 0 else (),
                               tolerance=tolerance)
    columns = ("alpha", "return_amp_re", "return_amp_im", "phase",
               "t_r", "leakage", "norm")
    phases = {"00": 0.0, "01": result.phi_01, "10": result.phi_10,
              "11": result.phi_11}
    rows = [(a, result.amplitudes[a].real, result.amplitudes[a].imag,
             phases[a], result.t_r[a], result.leakage[a], result.norm[a])
            for a in ("00", "01", "10", "11")]
    extra = (("tbar_r", result.tbar_r), ("t_rr", result.t_rr),
             ("phase_defect", result.phase_defect))
    _emit(_out_path(out_dir, cfg, "simulate"), columns, rows, cfg, seed,
          json_mirror, extra)
    return EXIT_OK


def _problem(cfg, seed) -> OptimizationProblem:
    family = Family(cfg.get("family", cfg.get("pulse_family", "gaussian")))
    fixed = {}
    for key in ("kappa", "width", "tau"):
        if key in cfg.raw:
            fixed[key] = float(cfg.raw[key])
    kwargs = dict(family=family, v=cfg.v_over_omega0(), fixed=fixed)
    if "objective" in cfg.raw:
        kwargs["objective"] = cfg.raw["objective"]
    if "feasibility_threshold" in cfg.raw:
        kwargs["feasibility_threshold"] = float(cfg.raw["feasibility_threshold"])
    if "tau_min" in cfg.raw or "tau_max" in cfg.raw:
        kwargs["tau_range"] = (float(cfg.get("tau_min", 6.8)),
                               float(cfg.get("tau_max", 10.0)))
    if "dcrab_components" in cfg.raw:
        kwargs["dcrab_components"] = int(cfg.raw["dcrab_components"])
    return OptimizationProblem(**kwargs)


def _run_optimize(cfg, out_dir, seed, json_mirror):
    problem = _problem(cfg, seed)
    if problem.family is Family.DCRAB:
        res = dcrab_optimize(problem, int(cfg.get("dcrab_superiterations", 3)),
                             seed=seed)
        result = res.best
        history = res.history
    else:
        result = direct_search(problem, seed=seed)
        history = None

    n_params = max((len(t[2]) for t in result.trace), default=0)
    columns = ("evaluation", "objective") + tuple(f"p{k}" for k in range(n_params))
    rows = [row + ("",) * (len(columns) - len(row)) for row in result.trace_rows()]
    extra = [("feasible", result.feasible), ("tau", result.tau),
             ("tbar_r", result.tbar_r), ("t_rr", result.t_rr),
             ("bell_infidelity", result.bell_infidelity),
             ("leakage", result.leakage),
             ("phase_defect", result.phase_defect)]
    extra += [(f"pulse_{k}", v) for k, v in sorted(result.pulse.to_dict().items())]
    if history:
        extra += [("superiteration_trace",
                   "; ".join(f"{k}:{tau:.4f}:{obj:.3e}" for k, tau, obj in history))]
    _emit(_out_path(out_dir, cfg, "optimize"), columns, rows, cfg, seed,
          json_mirror, extra)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _run_sweep(cfg, out_dir, seed, json_mirror):
    variable = cfg.raw["sweep_variable"]
    grid = [float(v) for v in cfg.raw["sweep_grid"]]
    figure = cfg.get("figure")

    if variable in _OPT_SWEEPS:
        figure = figure or _OPT_SWEEPS[variable]
        problem = _problem(cfg, seed)
        results = sweep(problem, variable, grid, seed=seed)
        if figure == "fig4":
            rows = [(g, r.t_r_01, r.t_r_01, r.t_r_11, r.tbar_r)
                    for g, r in zip(grid, results)]
        else:
            rows = [(g, r.feasible, r.tau, r.t_r_01, r.t_r_01, r.t_r_11, r.tbar_r)
                    for g, r in zip(grid, results)]
        path = _out_path(out_dir, cfg, figure)
        emit_figure_data(rows, figure, path, cfg.resolved_items(), seed=seed,
                         json_mirror=json_mirror)
        print(f"wrote {path}")
        return EXIT_OK  # flagged infeasible points are data, not failures

    if variable not in _BUDGET_SWEEPS:
        raise ConfigError(f"unknown sweep variable {variable!r}")
    figure = figure or _BUDGET_SWEEPS[variable]
    system = cfg.system()
    pulse = cfg.pulse()
    tolerance = cfg.get("tolerance", 1e-9)
    if variable == "decay_rate":
        data = budget_mod.decay_sweep(system, pulse, grid, tolerance=tolerance)
        rows = [(g, g * 50e-6, num, ana) for g, _, num, ana, _ in data]
    else:
        mech = "recoil" if variable == "trap_z" else "vdw"
        temps = cfg.temperatures()
        data = budget_mod.trap_sweep(mech, system, pulse, grid,
                                     temperatures=temps,
                                     fock_dim=int(cfg.get("fock_dim", 10)),
                                     tolerance=tolerance)
        rows = [(trap, temp * 1e6, num, ana, conv)
                for trap, temp, num, ana, conv in data]
    path = _out_path(out_dir, cfg, figure)
    emit_figure_data(rows, figure, path, cfg.resolved_items(), seed=seed,
                     json_mirror=json_mirror)
    print(f"wrote {path}")
    return EXIT_OK


def _run_budget(cfg, out_dir, seed, json_mirror):
    system = cfg.system()
    pulse = cfg.pulse()
    temps = cfg.temperatures()
    fock = {"z": int(cfg.get("fock_dim", 10)), "x": int(cfg.get("fock_dim_x", 3))}
    b = budget_mod.full_budget(system, pulse, temperatures=temps,
                               fock_dim=int(cfg.get("fock_dim", 10)),
                               tolerance=cfg.get("tolerance", 1e-9))
    rows = [(label, metric, temp * 1e6, value, conv)
            for label, metric, temp, value, conv in b.rows()]
    extra = (("tbar_r_s", b.tbar_r), ("t_rr_s", b.t_rr),
             ("fock_z", fock["z"]), ("fock_x", fock["x"]))
    from .output import BUDGET_COLUMNS
    _emit(_out_path(out_dir, cfg, "budget"), BUDGET_COLUMNS, rows, cfg, seed,
          json_mirror, extra)
    required = [b.bell_numeric[(m, t)] for m in budget_mod.MECHANISMS
                for t in temps]
    return EXIT_OK if all(v is not None for v in required) else EXIT_NUMERICS


def run(config_path, overrides=(), out_dir=".", json_mirror=False,
        seed=None, mode=None) -> int:
    """Run one experiment configuration; returns the process exit code."""
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, overrides)
        if mode is not None and cfg.mode != mode:
            raise ConfigError(f"config mode {cfg.mode!r} does not match "
                              f"requested mode {mode!r}")
        if seed is not None:
            cfg.raw["seed"] = int(seed)
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        runner = {"simulate": _run_simulate, "optimize": _run_optimize,
                  "sweep": _run_sweep, "budget": _run_budget}[cfg.mode]
        return runner(cfg, out_dir, cfg.seed, json_mirror)
    except (ConfigError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rydgate",
        description="Rydberg controlled-phase gate simulator, pulse optimizer "
                    "and error-budget engine.")
    parser.add_argument("mode", choices=("simulate", "optimize", "sweep", "budget"))
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--json", action="store_true",
                        help="also write a JSON mirror of every CSV")
    args = parser.parse_args(argv)
    return run(args.config, args.overrides, args.out, args.json,
               seed=args.seed, mode=args.mode)


if __name__ == "__main__":
    sys.exit(main())
