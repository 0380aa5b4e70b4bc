"""Parameter estimation against observed hormone time series.

The objective integrates the model with a candidate parameter vector and
scores it against the observations; minimization uses a bounded,
derivative-free Nelder-Mead simplex with box projection and deterministic
multi-start.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FitError, HpaError, ModelDomainError
from .integrator import IntegrationConfig, integrate
from .metrics import ObservationSeries, score_fit
from .model import PARAMETER_NAMES, ParameterSet

#: Finite penalty returned when the integration fails for a candidate, so
#: the optimizer can route around bad regions instead of aborting.
PENALTY = 1e9

DEFAULT_FREE = ("k1", "k2", "k3", "k4", "k5")


@dataclass(frozen=True)
class FitProblem:
    """What to fit: free parameters, bounds, fixed base values, objective."""

    base: ParameterSet = field(default_factory=ParameterSet)
    free_names: tuple[str, ...] = DEFAULT_FREE
    lower: np.ndarray | None = None   # default: 0.1x base value
    upper: np.ndarray | None = None   # default: 10x base value
    objective_kind: str = "sum_mape"  # "sum_mape" | "sum_squares"
    w_acth: float = 1.0
    w_cortisol: float = 1.0
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)

    def __post_init__(self):
        if not self.free_names:
            raise FitError("free_names must be nonempty")
        for name in self.free_names:
            if name not in PARAMETER_NAMES:
                raise FitError(f"unknown free parameter {name!r}")
        base_vals = np.array([getattr(self.base, n) for n in self.free_names])
        lower = (np.asarray(self.lower, dtype=float) if self.lower is not None
                 else 0.1 * base_vals)
        upper = (np.asarray(self.upper, dtype=float) if self.upper is not None
                 else 10.0 * base_vals)
        if lower.shape != (len(self.free_names),) or upper.shape != lower.shape:
            raise FitError("bounds must match the number of free parameters")
        if np.any(lower <= 0) or np.any(lower >= upper):
            raise FitError("bounds must satisfy 0 < lower < upper")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.objective_kind not in ("sum_mape", "sum_squares"):
            raise FitError(f"unknown objective kind {self.objective_kind!r}")

    def assemble(self, candidate) -> ParameterSet:
        updates = {n: float(v) for n, v in zip(self.free_names, candidate)}
        return replace(self.base, **updates)


@dataclass(frozen=True)
class FitResult:
    fitted: ParameterSet
    objective_value: float
    evaluations: int
    converged: bool
    history: tuple[tuple[int, float], ...]  # (evaluation index, best objective)


def objective(candidate, prob: FitProblem, obs: ObservationSeries) -> float:
    """Scalar fit criterion for one candidate free-parameter vector.

    Integration or model-domain failures map to the large finite PENALTY.
    """
    candidate = np.asarray(candidate, dtype=float)
    if np.any(candidate < prob.lower - 1e-12) or np.any(candidate > prob.upper + 1e-12):
        raise FitError("candidate outside bounds")
    try:
        params = prob.assemble(candidate)
        cfg = prob.integration
        t_lo = min(cfg.t0, float(obs.times[0]))
        t_hi = max(cfg.t_end, float(obs.times[-1]))
        if (t_lo, t_hi) != (cfg.t0, cfg.t_end):
            cfg = replace(cfg, t0=t_lo, t_end=t_hi)
        traj = integrate(cfg, params, output_times=np.unique(obs.times))
        score = score_fit(traj, obs)
    except HpaError:
        return PENALTY
    if prob.objective_kind == "sum_mape":
        total = 0.0
        if score.mape_acth is not None:
            total += prob.w_acth * score.mape_acth
        if score.mape_cortisol is not None:
            total += prob.w_cortisol * score.mape_cortisol
    else:
        total = 0.0
        if score.rmse_acth is not None:
            total += prob.w_acth * len(obs) * score.rmse_acth ** 2
        if score.rmse_cortisol is not None:
            total += prob.w_cortisol * len(obs) * score.rmse_cortisol ** 2
    if not np.isfinite(total):
        return PENALTY
    return float(total)


def _nelder_mead(f, x0, lower, upper, max_evals, diam_tol=1e-6):
    """Box-projected Nelder-Mead. Returns (x, fx, evals, converged)."""
    n = len(x0)
    project = lambda x: np.minimum(np.maximum(x, lower), upper)

    evals = 0

    def ev(x):
        nonlocal evals
        evals += 1
        return f(x)

    simplex = [project(np.asarray(x0, dtype=float))]
    for i in range(n):
        step = 0.05 * (upper[i] - lower[i])
        v = simplex[0].copy()
        v[i] = v[i] + step if v[i] + step <= upper[i] else v[i] - step
        simplex.append(project(v))
    fvals = []
    for v in simplex:
        if evals >= max_evals:
            break
        fvals.append(ev(v))
    simplex = simplex[:len(fvals)]
    if not fvals:
        return project(np.asarray(x0, dtype=float)), np.inf, evals, False

    converged = False
    while evals < max_evals and len(simplex) == n + 1:
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        scale = max(float(np.max(np.abs(simplex[0]))), 1e-12)
        diam = max(float(np.max(np.abs(v - simplex[0]))) for v in simplex[1:])
        if diam / scale < diam_tol:
            converged = True
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = project(centroid + (centroid - worst))
        fr = ev(xr)
        if fr < fvals[0] and evals < max_evals:
            xe = project(centroid + 2.0 * (centroid - worst))
            fe = ev(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = project(centroid + 0.5 * (xr - centroid))
            else:
                xc = project(centroid + 0.5 * (worst - centroid))
            if evals >= max_evals:
                break
            fc = ev(xc)
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    if evals >= max_evals:
                        break
                    simplex[i] = project(best + 0.5 * (simplex[i] - best))
                    fvals[i] = ev(simplex[i])
    i_best = int(np.argmin(fvals))
    return simplex[i_best], fvals[i_best], evals, converged


def fit(prob: FitProblem, obs: ObservationSeries, init=None, budget: int = 5000,
        seed: int = 0, n_starts: int = 5, on_evaluate=None) -> FitResult:
    """Minimize the objective with deterministic multi-start Nelder-Mead.

    Starts are the supplied init plus ``n_starts - 1`` log-uniform draws
    within the bounds (seeded). The evaluation budget is shared across
    starts; identical inputs give identical results.
    """
    if budget < 1:
        raise FitError(f"budget must be >= 1, got {budget}")
    if n_starts < 1:
        raise FitError(f"n_starts must be >= 1, got {n_starts}")
    if init is None:
        init = np.array([getattr(prob.base, n) for n in prob.free_names])
    init = np.asarray(init, dtype=float)
    if init.shape != prob.lower.shape:
        raise FitError("init must match the number of free parameters")
    if np.any(init < prob.lower) or np.any(init > prob.upper):
        raise FitError("init outside bounds")

    rng = np.random.default_rng(seed)
    starts = [init]
    log_lo, log_hi = np.log(prob.lower), np.log(prob.upper)
    for _ in range(n_starts - 1):
        starts.append(np.exp(rng.uniform(log_lo, log_hi)))

    total_evals = 0
    best_x, best_f = None, np.inf
    best_converged = False
    history: list[tuple[int, float]] = []

    def tracked(x):
        nonlocal best_x, best_f
        value = objective(x, prob, obs)
        if on_evaluate is not None:
            on_evaluate(np.array(x), value)
        idx = total_evals + tracked.count + 1
        tracked.count += 1
        if value < best_f:
            best_f = value
            best_x = np.array(x)
            history.append((idx, value))
        return value

    for start in starts:
        remaining = budget - total_evals
        if remaining <= 0:
            break
        tracked.count = 0
        x, fx, used, converged = _nelder_mead(tracked, start, prob.lower,
                                              prob.upper, remaining)
        total_evals += used
        if fx <= best_f:
            best_converged = converged

    return FitResult(fitted=prob.assemble(best_x),
                     objective_value=float(best_f),
                     evaluations=total_evals,
                     converged=best_converged,
                     history=tuple(history))
