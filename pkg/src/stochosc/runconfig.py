"""Run configuration: TOML file plus command-line overrides.

Sections are [model], [integration], [output] and [verify]; every key
is checked against a whitelist and a misspelled key fails fast with the
offender named.  Flags always win over file values, file values win
over environment, environment over built-in defaults.  Output paths
are checked writable before any computation starts.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .catalog import CATALOG, build_model
from .integrate import IntegrationConfig
from .lyapunov import VerificationDomain
from .poly import MultiPolynomial, Polynomial
from .system import (
    ConstantMatrix,
    GeneralDrift,
    LienardForm,
    OscillatorModel,
    StateDependent,
)

__all__ = ["ConfigError", "RunConfig", "load_config", "check_output_paths",
           "SEED_ENV_VAR", "DEFAULT_SEED", "PRESETS", "PRESET_ALIASES"]

SEED_ENV_VAR = "STOCHOSC_SEED"
DEFAULT_SEED = 12345

# frozen reference parameter sets; the catalog defaults equal these today,
# but the preset pins them against future default drift
PRESETS: dict[str, dict[str, dict[str, float]]] = {
    "reference": {
        "duffing": {"alpha": 0.5, "omega0": 1.0, "lam": 3.0, "sigma": 2.0},
        "vanderpol": {"xi": 0.1, "omega0": 1.0, "gamma": 0.25, "sigma": 0.1},
    },
}
PRESET_ALIASES = {"paper": "reference"}


class ConfigError(ValueError):
    pass


_MODEL_KEYS = {"name", "representation", "params", "custom"}
_CUSTOM_KEYS = {"n", "lienard_f", "general_b", "g", "potential",
                "sigma", "sigma_poly"}
_INTEGRATION_KEYS = {"dt", "T", "R_max", "stride", "seed", "initial",
                     "n_paths", "workers", "levels", "dt_fine"}
_OUTPUT_KEYS = {"csv_path", "svg_path", "report_path", "json_path"}
_VERIFY_KEYS = {"R_check", "points_per_axis"}
_SECTIONS = {"model", "integration", "output", "verify"}


def _check_keys(section: str, data: Mapping[str, Any], allowed: set) -> None:
    for k in data:
        if k not in allowed:
            raise ConfigError(f"unknown key '{k}' in [{section}]")


@dataclass
class RunConfig:
    model: OscillatorModel
    model_name: str
    representation: str = "direct"
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    initial: Optional[np.ndarray] = None
    seed: int = DEFAULT_SEED
    n_paths: int = 100
    workers: int = 1
    levels: int = 4
    dt_fine: float = 2.0 ** -10
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None
    report_path: Optional[str] = None
    json_path: Optional[str] = None
    domain: Optional[VerificationDomain] = None

    def initial_state(self) -> np.ndarray:
        if self.initial is not None:
            return self.initial
        n = self.model.n
        return np.concatenate([np.ones(n), np.zeros(n)])


def _poly_from_value(value, nvars: int, what: str) -> MultiPolynomial:
    """Coefficient list (univariate, ascending) or term-record list."""
    if isinstance(value, Sequence) and value and isinstance(value[0], Mapping):
        terms = {}
        for rec in value:
            unknown = set(rec) - {"exponents", "coeff"}
            if unknown:
                raise ConfigError(
                    f"unknown key '{sorted(unknown)[0]}' in a term of {what}")
            exps = tuple(int(e) for e in rec["exponents"])
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ConfigError(
                    f"{what}: exponents must be {nvars} nonnegative integers")
            terms[exps] = terms.get(exps, 0.0) + float(rec["coeff"])
        return MultiPolynomial(nvars, terms)
    if isinstance(value, Sequence):
        if nvars != 1:
            raise ConfigError(
                f"{what}: plain coefficient lists only describe univariate "
                f"polynomials; use term records with 'exponents' and 'coeff'")
        return Polynomial(tuple(float(c) for c in value)).to_multi(1, 0)
    raise ConfigError(f"{what} must be a coefficient list or a list of terms")


def _build_custom_model(custom: Mapping[str, Any]) -> OscillatorModel:
    _check_keys("model.custom", custom, _CUSTOM_KEYS)
    if "n" not in custom:
        raise ConfigError("custom model needs 'n' (number of oscillators)")
    n = int(custom["n"])
    if n < 1:
        raise ConfigError("custom model needs n >= 1")
    nv = 2 * n

    if ("lienard_f" in custom) == ("general_b" in custom):
        raise ConfigError(
            "custom model needs exactly one of 'lienard_f' or 'general_b'")
    if "lienard_f" in custom:
        fs = custom["lienard_f"]
        if len(fs) != n:
            raise ConfigError(f"lienard_f needs {n} coefficient lists")
        damping = LienardForm(tuple(
            Polynomial(tuple(float(c) for c in f)) for f in fs))
    else:
        bs = custom["general_b"]
        if len(bs) != n:
            raise ConfigError(f"general_b needs {n} polynomial entries")
        damping = GeneralDrift(tuple(
            _poly_from_value(b, nv, f"general_b[{i}]") for i, b in enumerate(bs)))

    if "g" not in custom:
        raise ConfigError("custom model needs 'g' (restoring force components)")
    gs = custom["g"]
    if len(gs) != n:
        raise ConfigError(f"g needs {n} polynomial entries")
    restoring = tuple(_poly_from_value(g, n, f"g[{i}]") for i, g in enumerate(gs))

    potential = None
    if "potential" in custom:
        potential = _poly_from_value(custom["potential"], n, "potential")

    if ("sigma" in custom) and ("sigma_poly" in custom):
        raise ConfigError("give either 'sigma' or 'sigma_poly', not both")
    if "sigma_poly" in custom:
        rows = custom["sigma_poly"]
        diffusion = StateDependent(tuple(
            tuple(_poly_from_value(e, nv, f"sigma_poly[{i}][{j}]")
                  for j, e in enumerate(row))
            for i, row in enumerate(rows)))
        if diffusion.shape[0] != n:
            raise ConfigError(f"sigma_poly needs {n} rows")
    else:
        sigma = custom.get("sigma", 1.0)
        if isinstance(sigma, Sequence):
            mat = np.asarray(sigma, dtype=float)
            if mat.ndim != 2 or mat.shape[0] != n:
                raise ConfigError(f"sigma matrix needs {n} rows")
            diffusion = ConstantMatrix(mat)
        else:
            diffusion = ConstantMatrix(float(sigma) * np.eye(n))

    try:
        return OscillatorModel(
            name="custom", damping=damping, restoring=restoring,
            diffusion=diffusion, potential=potential,
            description="user-defined model",
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _resolve_model(section: Mapping[str, Any],
                   preset: Optional[str]) -> tuple[OscillatorModel, str]:
    name = section.get("name")
    if name is None:
        raise ConfigError("no model selected; set [model] name or pass --model")
    if name == "custom":
        if preset is not None:
            raise ConfigError("presets only apply to catalog models")
        if "custom" not in section:
            raise ConfigError("model 'custom' needs a [model.custom] table")
        return _build_custom_model(section["custom"]), "custom"
    if name not in CATALOG:
        known = ", ".join(sorted(CATALOG))
        raise ConfigError(f"unknown model '{name}'; catalog: {known}, custom")
    params = dict(section.get("params", {}))
    if preset is not None:
        canonical = PRESET_ALIASES.get(preset, preset)
        if canonical not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'")
        params.update(PRESETS[canonical].get(name, {}))
    try:
        return build_model(name, params), name
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e


def _check_writable(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ConfigError(f"output directory does not exist: {directory}")
    if os.path.exists(path):
        if not os.access(path, os.W_OK):
            raise ConfigError(f"output path not writable: {path}")
    elif not os.access(directory, os.W_OK):
        raise ConfigError(f"output directory not writable: {directory}")


def load_config(path: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None,
                env: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Assemble a RunConfig from a TOML file and flag overrides.

    overrides mirror flag names: model, preset, representation, dt, T,
    R_max, stride, seed, initial, n_paths, workers, levels, dt_fine,
    csv_path, svg_path, report_path, json_path, R_check,
    points_per_axis, params (a dict merged over [model.params]).
    """
    overrides = dict(overrides or {})
    env = os.environ if env is None else env

    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"config file is not valid TOML: {e}")
    unknown = set(data) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown section [{sorted(unknown)[0]}]")

    model_sec = dict(data.get("model", {}))
    _check_keys("model", model_sec, _MODEL_KEYS)
    integ_sec = dict(data.get("integration", {}))
    _check_keys("integration", integ_sec, _INTEGRATION_KEYS)
    out_sec = dict(data.get("output", {}))
    _check_keys("output", out_sec, _OUTPUT_KEYS)
    verify_sec = dict(data.get("verify", {}))
    _check_keys("verify", verify_sec, _VERIFY_KEYS)

    if overrides.get("model") is not None:
        model_sec["name"] = overrides["model"]
    if overrides.get("params"):
        params = dict(model_sec.get("params", {}))
        params.update(overrides["params"])
        model_sec["params"] = params
    model, model_name = _resolve_model(model_sec, overrides.get("preset"))

    representation = overrides.get("representation") \
        or model_sec.get("representation", "direct")
    if representation not in ("direct", "transformed"):
        raise ConfigError("representation must be 'direct' or 'transformed'")

    def pick(key, default):
        ov = overrides.get(key)
        if ov is not None:
            return ov
        return integ_sec.get(key, default)

    seed = overrides.get("seed")
    if seed is None:
        seed = integ_sec.get("seed")
    if seed is None:
        raw = env.get(SEED_ENV_VAR)
        if raw is not None:
            try:
                seed = int(raw)
            except ValueError:
                raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")
    if seed is None:
        seed = DEFAULT_SEED
    seed = int(seed)
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must fit in 64 unsigned bits")

    try:
        integration = IntegrationConfig(
            dt=float(pick("dt", 1e-3)),
            T=float(pick("T", 50.0)),
            R_max=float(pick("R_max", 1e6)),
            stride=int(pick("stride", 1)),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e

    initial = pick("initial", None)
    if initial is not None:
        initial = np.asarray([float(v) for v in initial])
        if initial.shape != (2 * model.n,):
            raise ConfigError(
                f"initial state needs {2 * model.n} entries "
                f"(positions then velocities)")
        if not np.isfinite(initial).all():
            raise ConfigError("initial state must be finite")

    n_paths = int(pick("n_paths", 100))
    workers = int(pick("workers", 1))
    levels = int(pick("levels", 4))
    dt_fine = float(pick("dt_fine", 2.0 ** -10))
    if n_paths < 1:
        raise ConfigError("n_paths must be at least 1")
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    if levels < 3:
        raise ConfigError("levels must be at least 3")
    if not (dt_fine > 0 and math.isfinite(dt_fine)):
        raise ConfigError("dt_fine must be a positive finite number")

    def pick_out(key):
        ov = overrides.get(key)
        if ov is not None:
            return str(ov)
        v = out_sec.get(key)
        return None if v is None else str(v)

    csv_path = pick_out("csv_path")
    svg_path = pick_out("svg_path")
    report_path = pick_out("report_path")
    json_path = pick_out("json_path")

    domain = None
    R_check = overrides.get("R_check", verify_sec.get("R_check"))
    ppa = overrides.get("points_per_axis", verify_sec.get("points_per_axis"))
    if R_check is not None or ppa is not None:
        kwargs = {}
        if R_check is not None:
            R_check = float(R_check)
            if not (R_check > 0):
                raise ConfigError("R_check must be positive")
            kwargs["R_check"] = R_check
        if ppa is not None:
            ppa = int(ppa)
            if ppa < 3:
                raise ConfigError("points_per_axis must be at least 3")
            kwargs["points_per_axis"] = ppa
        domain = VerificationDomain(**kwargs)

    return RunConfig(
        model=model, model_name=model_name, representation=representation,
        integration=integration, initial=initial, seed=seed,
        n_paths=n_paths, workers=workers, levels=levels, dt_fine=dt_fine,
        csv_path=csv_path, svg_path=svg_path, report_path=report_path,
        json_path=json_path, domain=domain,
    )


def check_output_paths(config: RunConfig) -> None:
    for p in (config.csv_path, config.svg_path, config.report_path,
              config.json_path):
        if p is not None:
            _check_writable(p)
