"""Local sensitivity of cortisol to each model parameter.

The relative sensitivity index of cortisol with respect to a parameter p is
(dC/dp)(p/C), estimated by central finite differences on two perturbed
integrations. Parameters are ranked by the time-average of |SI| over one
1440-min period after burn-in, and the Pearson correlation matrix of the SI
time series is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SensitivityError
from .integrator import IntegrationConfig, integrate
from .model import PARAMETER_NAMES, ParameterSet
from .parallel import map_ordered

DEFAULT_REL_STEP = 1e-3


@dataclass(frozen=True)
class SensitivityReport:
    """Per-parameter SI series, aggregate ranking and SI correlations."""

    parameter_names: tuple[str, ...]
    grid: np.ndarray
    si_series: dict[str, np.ndarray]
    si_aggregate: dict[str, float]
    ranking: tuple[str, ...]
    correlation: np.ndarray
    fd_unstable: tuple[str, ...] = ()


def _default_grid():
    return np.arange(0.0, 1441.0, 1.0)


def _default_integration():
    return IntegrationConfig(mode="adaptive", abs_tol=1e-8, rel_tol=1e-8,
                             burn_in=14400.0)


def _cortisol_on_grid(p: ParameterSet, grid, integration: IntegrationConfig):
    cfg = replace(integration, t0=float(grid[0]), t_end=float(grid[-1]))
    traj = integrate(cfg, p, output_times=grid)
    return traj.cortisol


def si_timeseries(p: ParameterSet, name: str, grid=None,
                  rel_step: float = DEFAULT_REL_STEP,
                  integration: IntegrationConfig | None = None,
                  _baseline=None) -> np.ndarray:
    """Central-difference SI(t) of cortisol with respect to one parameter."""
    if name not in PARAMETER_NAMES:
        raise SensitivityError(f"unknown parameter {name!r}")
    if not (0 < rel_step <= 0.5):
        raise SensitivityError(f"rel_step must lie in (0, 0.5], got {rel_step}")
    value = getattr(p, name)
    if value == 0:
        raise SensitivityError(f"parameter {name} is zero; relative SI undefined")
    grid = _default_grid() if grid is None else np.asarray(grid, dtype=float)
    integration = integration or _default_integration()

    c0 = _baseline if _baseline is not None else _cortisol_on_grid(p, grid, integration)
    if np.any(c0 == 0):
        raise SensitivityError("baseline cortisol is zero on the grid")
    c_plus = _cortisol_on_grid(replace(p, **{name: value * (1.0 + rel_step)}),
                               grid, integration)
    c_minus = _cortisol_on_grid(replace(p, **{name: value * (1.0 - rel_step)}),
                                grid, integration)
    return (c_plus - c_minus) / (2.0 * rel_step) / c0


def _si_task(args):
    p, name, grid, rel_step, integration, baseline, check = args
    series = si_timeseries(p, name, grid, rel_step, integration, _baseline=baseline)
    halved = None
    if check:
        halved = si_timeseries(p, name, grid, rel_step / 2.0, integration,
                               _baseline=baseline)
    return name, series, halved


def correlation_matrix(si_series: dict[str, np.ndarray]) -> np.ndarray:
    """Pearson correlation of the SI time series, symmetric with unit diagonal."""
    names = list(si_series)
    data = np.array([np.asarray(si_series[n], dtype=float) for n in names])
    if data.shape[1] < 3:
        raise SensitivityError("series must have length >= 3")
    for name, row in zip(names, data):
        if np.ptp(row) == 0.0:
            raise SensitivityError(f"series for {name} has zero variance")
    corr = np.corrcoef(data)
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def rank_parameters(p: ParameterSet, grid=None,
                    rel_step: float = DEFAULT_REL_STEP,
                    integration: IntegrationConfig | None = None,
                    check_stability: bool = True) -> SensitivityReport:
    """Full sensitivity report over all 19 parameters.

    Aggregation is mean |SI(t)| over the grid; ``fd_unstable`` lists
    parameters whose aggregate moves by more than 1% when the finite
    difference step is halved.
    """
    grid = _default_grid() if grid is None else np.asarray(grid, dtype=float)
    integration = integration or _default_integration()
    baseline = _cortisol_on_grid(p, grid, integration)
    if np.any(baseline == 0):
        raise SensitivityError("baseline cortisol is zero on the grid")

    tasks = [(p, name, grid, rel_step, integration, baseline, check_stability)
             for name in PARAMETER_NAMES]
    results = map_ordered(_si_task, tasks)

    si_series: dict[str, np.ndarray] = {}
    si_aggregate: dict[str, float] = {}
    unstable = []
    for name, series, halved in results:
        si_series[name] = series
        agg = float(np.mean(np.abs(series)))
        si_aggregate[name] = agg
        if halved is not None:
            agg_halved = float(np.mean(np.abs(halved)))
            denom = max(abs(agg), 1e-30)
            if abs(agg_halved - agg) / denom >= 0.01:
                unstable.append(name)

    ranking = tuple(sorted(PARAMETER_NAMES, key=lambda n: -si_aggregate[n]))
    corr = correlation_matrix(si_series)
    return SensitivityReport(parameter_names=PARAMETER_NAMES, grid=grid,
                             si_series=si_series, si_aggregate=si_aggregate,
                             ranking=ranking, correlation=corr,
                             fd_unstable=tuple(unstable))
