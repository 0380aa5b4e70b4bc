"""Configuration and CSV input/output for the command-line front end.

Config files are line-based ``key = value`` with ``#`` comments and
namespaced keys (``model.k5``, ``integrate.burn_in_min``, ``fit.free``,
``sens.rel_step``). Observation files are CSV with the fixed header
``time_min,acth_pg_ml,cortisol_ug_dl``. All floats are written with 12
significant digits and ``\\n`` line endings so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibration import DEFAULT_FREE
from .errors import ConfigError, ObservationError
from .integrator import IntegrationConfig
from .metrics import ObservationSeries
from .model import PARAMETER_NAMES, ParameterSet

OBS_HEADER = ["time_min", "acth_pg_ml", "cortisol_ug_dl"]


@dataclass(frozen=True)
class FitSettings:
    free: tuple[str, ...] = DEFAULT_FREE
    objective: str = "sum_mape"
    w_acth: float = 1.0
    w_cortisol: float = 1.0
    lower_scale: float = 0.1
    upper_scale: float = 10.0
    budget: int = 5000
    seed: int = 0
    n_starts: int = 5


@dataclass(frozen=True)
class SensSettings:
    rel_step: float = 1e-3
    grid_dt_min: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    params: ParameterSet = field(default_factory=ParameterSet)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    fit: FitSettings = field(default_factory=FitSettings)
    sens: SensSettings = field(default_factory=SensSettings)
    out_dir: str = "hpa-out"


def fmt(value) -> str:
    """Canonical text form: 12 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _parse_float(raw, key, line):
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw!r}", line)
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {raw!r}", line)
    return v


def _parse_int(raw, key, line):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw!r}", line)


def _parse_bool(raw, key, line):
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: not a boolean: {raw!r}", line)


_INTEGRATE_KEYS = {
    "t0_min": ("t0", _parse_float),
    "t_end_min": ("t_end", _parse_float),
    "dt_min": ("dt", _parse_float),
    "mode": ("mode", None),
    "abs_tol": ("abs_tol", _parse_float),
    "rel_tol": ("rel_tol", _parse_float),
    "burn_in_min": ("burn_in", _parse_float),
    "output_dt_min": ("output_dt", _parse_float),
}

_FIT_KEYS = {
    "free": ("free", None),
    "objective": ("objective", None),
    "w_acth": ("w_acth", _parse_float),
    "w_cortisol": ("w_cortisol", _parse_float),
    "lower_scale": ("lower_scale", _parse_float),
    "upper_scale": ("upper_scale", _parse_float),
    "budget": ("budget", _parse_int),
    "seed": ("seed", _parse_int),
    "n_starts": ("n_starts", _parse_int),
}

_SENS_KEYS = {
    "rel_step": ("rel_step", _parse_float),
    "grid_dt_min": ("grid_dt_min", _parse_float),
}


def parse_config(path) -> RunConfig:
    """Read a key = value config file; unspecified keys keep their defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    model_kw: dict = {}
    integ_kw: dict = {}
    fit_kw: dict = {}
    sens_kw: dict = {}
    out_dir = None

    for lineno, rawline in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {rawline!r}", lineno)
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not key or not raw:
            raise ConfigError(f"expected 'key = value', got {rawline!r}", lineno)

        if key.startswith("run."):
            continue  # manifest provenance keys are informational
        ns, _, sub = key.partition(".")
        if ns == "model":
            if sub in PARAMETER_NAMES:
                model_kw[sub] = _parse_float(raw, key, lineno)
            elif sub == "clamp_production":
                model_kw[sub] = _parse_bool(raw, key, lineno)
            else:
                raise ConfigError(f"unknown key {key!r}", lineno)
        elif ns == "integrate" and sub in _INTEGRATE_KEYS:
            attr, conv = _INTEGRATE_KEYS[sub]
            if conv is None:  # mode
                if raw not in ("fixed", "adaptive"):
                    raise ConfigError(f"{key}: must be fixed or adaptive", lineno)
                integ_kw[attr] = raw
            else:
                integ_kw[attr] = conv(raw, key, lineno)
        elif ns == "fit" and sub in _FIT_KEYS:
            attr, conv = _FIT_KEYS[sub]
            if attr == "free":
                names = tuple(n.strip() for n in raw.split(",") if n.strip())
                bad = [n for n in names if n not in PARAMETER_NAMES]
                if bad or not names:
                    raise ConfigError(f"{key}: invalid parameter list {raw!r}", lineno)
                fit_kw[attr] = names
            elif attr == "objective":
                if raw not in ("sum_mape", "sum_squares"):
                    raise ConfigError(
                        f"{key}: must be sum_mape or sum_squares", lineno)
                fit_kw[attr] = raw
            else:
                fit_kw[attr] = conv(raw, key, lineno)
        elif ns == "sens" and sub in _SENS_KEYS:
            attr, conv = _SENS_KEYS[sub]
            sens_kw[attr] = conv(raw, key, lineno)
        elif ns == "out" and sub == "dir":
            out_dir = raw
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)

    try:
        params = ParameterSet(**model_kw)
        integration = IntegrationConfig(**integ_kw)
        fit_settings = FitSettings(**fit_kw)
        sens_settings = SensSettings(**sens_kw)
    except Exception as exc:
        raise ConfigError(str(exc))
    if fit_settings.budget < 1:
        raise ConfigError("fit.budget must be >= 1")
    if not (0 < sens_settings.rel_step <= 0.5):
        raise ConfigError("sens.rel_step must lie in (0, 0.5]")
    kwargs = {"params": params, "integration": integration,
              "fit": fit_settings, "sens": sens_settings}
    if out_dir is not None:
        kwargs["out_dir"] = out_dir
    return RunConfig(**kwargs)


def config_lines(config: RunConfig) -> list[str]:
    """Canonical, fully resolved key = value lines for a RunConfig."""
    lines = []
    for name in PARAMETER_NAMES:
        lines.append(f"model.{name} = {fmt(getattr(config.params, name))}")
    lines.append(f"model.clamp_production = {fmt(config.params.clamp_production)}")
    cfg = config.integration
    for key, (attr, _) in _INTEGRATE_KEYS.items():
        lines.append(f"integrate.{key} = {fmt(getattr(cfg, attr))}")
    fs = config.fit
    lines.append(f"fit.free = {','.join(fs.free)}")
    lines.append(f"fit.objective = {fs.objective}")
    for key in ("w_acth", "w_cortisol", "lower_scale", "upper_scale",
                "budget", "seed", "n_starts"):
        lines.append(f"fit.{key} = {fmt(getattr(fs, key))}")
    lines.append(f"sens.rel_step = {fmt(config.sens.rel_step)}")
    lines.append(f"sens.grid_dt_min = {fmt(config.sens.grid_dt_min)}")
    lines.append(f"out.dir = {config.out_dir}")
    return lines


def parse_observations(path) -> ObservationSeries:
    """Read an observation CSV, validating values and timestamps.

    Either hormone column may be entirely empty; rows are sorted by time.
    Row numbers in errors count data rows from 1.
    """
    path = Path(path)
    if not path.is_file():
        raise ObservationError(f"observation file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ObservationError("empty file: missing header")
        if [h.strip() for h in header] != OBS_HEADER:
            raise ObservationError(
                f"bad header {header!r}; expected {','.join(OBS_HEADER)}")
        times, acth, cortisol = [], [], []
        for row_num, row in enumerate(reader, 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ObservationError(f"expected 3 columns, got {len(row)}",
                                       row_num)
            t_raw, a_raw, c_raw = (cell.strip() for cell in row)
            try:
                t = float(t_raw)
            except ValueError:
                raise ObservationError(f"non-numeric time {t_raw!r}", row_num)
            if not math.isfinite(t):
                raise ObservationError(f"non-finite time {t_raw!r}", row_num)
            times.append(t)
            for raw, dest, label in ((a_raw, acth, "acth_pg_ml"),
                                     (c_raw, cortisol, "cortisol_ug_dl")):
                if raw == "":
                    dest.append(None)
                    continue
                try:
                    v = float(raw)
                except ValueError:
                    raise ObservationError(f"non-numeric {label} {raw!r}", row_num)
                if not math.isfinite(v) or v <= 0:
                    raise ObservationError(
                        f"nonpositive {label} value {raw}", row_num)
                dest.append(v)

    if not times:
        raise ObservationError("no data rows")
    for label, series in (("acth_pg_ml", acth), ("cortisol_ug_dl", cortisol)):
        present = [v is not None for v in series]
        if any(present) and not all(present):
            row_num = present.index(False) + 1
            raise ObservationError(f"{label} present in some rows but missing here",
                                   row_num)
    seen = {}
    for i, t in enumerate(times, 1):
        if t in seen:
            raise ObservationError(f"duplicate time {fmt(t)} (first at row {seen[t]})", i)
        seen[t] = i

    order = np.argsort(times, kind="stable")
    times_arr = np.asarray(times, dtype=float)[order]
    acth_arr = (np.asarray(acth, dtype=float)[order]
                if acth[0] is not None else None)
    cort_arr = (np.asarray(cortisol, dtype=float)[order]
                if cortisol[0] is not None else None)
    try:
        return ObservationSeries(times=times_arr, acth=acth_arr,
                                 cortisol=cort_arr, subject_id=path.stem)
    except Exception as exc:
        raise ObservationError(str(exc))


def write_csv(path, header, rows):
    """Write rows with canonical float formatting and \\n line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_manifest(path, command, config: RunConfig, version,
                   extra: dict | None = None):
    """Resolved-config manifest; itself a valid config file for reruns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"run.command = {command}", f"run.version = {version}"]
    for key, value in (extra or {}).items():
        lines.append(f"run.{key} = {value}")
    lines.extend(config_lines(config))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
