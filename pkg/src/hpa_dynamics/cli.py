"""Command-line front end: simulate, validate, fit, sensitivity, daylight.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import FitProblem, fit as run_fit
from .errors import (ConfigError, FitError, HpaError, IntegrationError,
                     MetricError, ModelDomainError, ObservationError,
                     SamplingError, SensitivityError)
from .integrator import integrate
from .io import RunConfig, fmt, parse_config, parse_observations, write_csv, write_manifest
from .metrics import score_fit
from .model import PARAMETER_NAMES, daylight
from .sensitivity import rank_parameters

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

_INPUT_ERRORS = (ConfigError, ObservationError, MetricError, FitError,
                 ModelDomainError, SamplingError, SensitivityError,
                 FileNotFoundError)
_NUMERICAL_ERRORS = (IntegrationError,)


def _load_config(args) -> RunConfig:
    config = parse_config(args.config) if args.config else RunConfig()
    integ = config.integration
    if getattr(args, "t_end", None) is not None:
        integ = replace(integ, t_end=float(args.t_end))
    fit_settings = config.fit
    if getattr(args, "seed", None) is not None:
        fit_settings = replace(fit_settings, seed=args.seed)
    if getattr(args, "free", None):
        names = tuple(n.strip() for n in args.free.split(",") if n.strip())
        bad = [n for n in names if n not in PARAMETER_NAMES]
        if bad or not names:
            raise ConfigError(f"--free: invalid parameter list {args.free!r}")
        fit_settings = replace(fit_settings, free=names)
    out_dir = args.out if args.out else config.out_dir
    return replace(config, integration=integ, fit=fit_settings, out_dir=out_dir)


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_scores(path, score):
    rows = []
    if score.mape_acth is not None:
        rows.append(("acth", score.mape_acth, score.rmse_acth))
    if score.mape_cortisol is not None:
        rows.append(("cortisol", score.mape_cortisol, score.rmse_cortisol))
    write_csv(path, ["hormone", "mape_pct", "rmse"], rows)


def cmd_simulate(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    traj = integrate(config.integration, config.params)
    write_csv(out / "trajectory.csv", ["t_min", "crh", "acth", "cortisol"],
              zip(traj.times, traj.crh, traj.acth, traj.cortisol))
    write_manifest(out / "manifest.txt", "simulate", config, __version__)
    return EXIT_OK


def cmd_daylight(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    step = config.integration.output_dt
    n = int(round(1440.0 / step))
    times = [i * step for i in range(n + 1)]
    write_csv(out / "daylight.csv", ["t_min", "D"],
              ((t, daylight(t)) for t in times))
    write_manifest(out / "manifest.txt", "daylight", config, __version__)
    return EXIT_OK


def _simulate_covering(config: RunConfig, obs):
    integ = config.integration
    t0 = min(integ.t0, float(obs.times[0]))
    t_end = max(integ.t_end, float(obs.times[-1]))
    integ = replace(integ, t0=t0, t_end=t_end)
    return integrate(integ, config.params)


def cmd_validate(args) -> int:
    config = _load_config(args)
    obs = parse_observations(args.data)
    out = _out_dir(config)
    traj = _simulate_covering(config, obs)
    score = score_fit(traj, obs)
    _write_scores(out / "scores.csv", score)
    write_manifest(out / "manifest.txt", "validate", config, __version__,
                   extra={"data": args.data})
    return EXIT_OK


def cmd_fit(args) -> int:
    config = _load_config(args)
    obs = parse_observations(args.data)
    out = _out_dir(config)
    fs = config.fit
    base_vals = np.array([getattr(config.params, n) for n in fs.free])
    prob = FitProblem(base=config.params, free_names=fs.free,
                      lower=fs.lower_scale * base_vals,
                      upper=fs.upper_scale * base_vals,
                      objective_kind=fs.objective,
                      w_acth=fs.w_acth, w_cortisol=fs.w_cortisol,
                      integration=config.integration)
    result = run_fit(prob, obs, budget=fs.budget, seed=fs.seed,
                     n_starts=fs.n_starts)
    rows = [(name, getattr(result.fitted, name)) for name in fs.free]
    rows.append(("objective_value", result.objective_value))
    rows.append(("evaluations", result.evaluations))
    rows.append(("converged", 1 if result.converged else 0))
    write_csv(out / "fitted_parameters.csv", ["parameter", "value"], rows)

    fitted_config = replace(config, params=result.fitted)
    traj = _simulate_covering(fitted_config, obs)
    _write_scores(out / "scores.csv", score_fit(traj, obs))
    write_manifest(out / "manifest.txt", "fit", config, __version__,
                   extra={"data": args.data})
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    integ = config.integration
    grid = np.arange(integ.t0, integ.t0 + 1440.0 + 1e-9, config.sens.grid_dt_min)
    report = rank_parameters(config.params, grid=grid,
                             rel_step=config.sens.rel_step, integration=integ)
    rank_of = {name: i + 1 for i, name in enumerate(report.ranking)}
    write_csv(out / "sensitivity.csv", ["parameter", "si_aggregate", "rank"],
              ((n, report.si_aggregate[n], rank_of[n])
               for n in report.parameter_names))
    write_csv(out / "correlation.csv", ["parameter", *report.parameter_names],
              ((name, *report.correlation[i])
               for i, name in enumerate(report.parameter_names)))
    write_manifest(out / "manifest.txt", "sensitivity", config, __version__)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpa-dyn",
        description="Circadian HPA-axis hormone model: simulation, "
                    "calibration, validation and sensitivity analysis.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, data=False, fit_flags=False):
        sp.add_argument("--config", metavar="PATH", help="run config file")
        sp.add_argument("--out", metavar="DIR", help="output directory")
        sp.add_argument("--t-end", type=float, metavar="MIN",
                        help="simulation end time (minutes)")
        if data:
            sp.add_argument("--data", metavar="PATH", required=True,
                            help="observation CSV (time_min,acth_pg_ml,cortisol_ug_dl)")
        if fit_flags:
            sp.add_argument("--seed", type=int, metavar="N",
                            help="multi-start RNG seed")
            sp.add_argument("--free", metavar="NAMES",
                            help="comma-separated free parameters")

    common(sub.add_parser("simulate", help="integrate and export a trajectory"))
    common(sub.add_parser("validate", help="score a config against data"),
           data=True)
    common(sub.add_parser("fit", help="estimate free parameters from data"),
           data=True, fit_flags=True)
    common(sub.add_parser("sensitivity", help="parameter sensitivity report"))
    common(sub.add_parser("daylight", help="export the daylight forcing"))

    sub.choices["simulate"].set_defaults(func=cmd_simulate)
    sub.choices["validate"].set_defaults(func=cmd_validate)
    sub.choices["fit"].set_defaults(func=cmd_fit)
    sub.choices["sensitivity"].set_defaults(func=cmd_sensitivity)
    sub.choices["daylight"].set_defaults(func=cmd_daylight)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
