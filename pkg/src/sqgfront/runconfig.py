"""Flat INI run configurations: sections of key = value pairs.

Every key is validated against a fixed schema; unknown sections or keys
are rejected with their location, which keeps configs diff-reviewable
and typo-proof.  Paths in the file resolve relative to the file itself.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .evolution import SolverConfig
from .initial_data import (
    coefficients_from_file,
    exp_cos,
    multi_mode,
    power_law,
    single_mode,
)
from .spectral import PeriodicField, SpectralSpace

__all__ = ["RunSpec", "parse_run_config", "make_initial_data"]

_SOLVER_KEYS = {
    "n_max": int,
    "s": float,
    "dt": float,
    "t_end": float,
    "eps": float,
    "integrator": str,
    "alpha": float,
    "flux_coeff": float,
    "dispersion_coeff": float,
    "paraproduct_prefactor": bool,
    "delta_pos": float,
    "monitor_cadence": int,
    "adaptive_dt": bool,
}

_INITIAL_KEYS = {
    "kind": str,
    "k": int,
    "amp": float,
    "modes": str,
    "exponent": float,
    "seed": int,
    "path": str,
}

_SCHEMA = {
    "solver": _SOLVER_KEYS,
    "initial_data": _INITIAL_KEYS,
    "output": {"path": str},
    "convergence": {"n_list": str, "dt_list": str},
    "stability": {"r": float, "perturbation_amp": float, "perturbation_mode": int},
    "identities": {"k_list": str, "power_order": float, "amp": float},
    "bona_smith": {"n_list": str, "delta": float, "reference_factor": int, "seed": int},
}

_GENERATOR_KEYS = {
    "single_mode": {"k", "amp"},
    "multi_mode": {"modes"},
    "power_law": {"exponent", "seed", "amp"},
    "exp_cos": {"amp"},
    "file": {"path"},
}

_BOOL_WORDS = {
    "1": True,
    "yes": True,
    "true": True,
    "on": True,
    "0": False,
    "no": False,
    "false": False,
    "off": False,
}


@dataclass(frozen=True)
class RunSpec:
    """Everything a CLI command needs, parsed and type-checked."""

    solver: SolverConfig
    initial_kind: str
    initial_params: dict
    output_path: Optional[str]
    convergence_n: tuple[int, ...]
    convergence_dt: tuple[float, ...]
    stability_r: float
    stability_amp: float
    stability_mode: int
    identities_k: tuple[int, ...]
    identities_power: float
    identities_amp: float
    bona_smith_n: tuple[int, ...]
    bona_smith_delta: float
    bona_smith_factor: int
    bona_smith_seed: int
    config_dir: str = field(default=".")


def _convert(section: str, key: str, raw: str, kind):
    try:
        if kind is bool:
            word = raw.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(f"not a boolean: {raw!r}")
            return _BOOL_WORDS[word]
        return kind(raw)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: {err}") from None


def _int_list(section: str, key: str, raw: str) -> tuple[int, ...]:
    try:
        items = tuple(int(p.strip()) for p in raw.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected comma-separated integers") from None
    if not items:
        raise ConfigError(f"[{section}] {key}: empty list")
    return items


def _float_list(section: str, key: str, raw: str) -> tuple[float, ...]:
    try:
        items = tuple(float(p.strip()) for p in raw.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected comma-separated numbers") from None
    if not items:
        raise ConfigError(f"[{section}] {key}: empty list")
    return items


def _parse_modes(raw: str) -> tuple[tuple[int, float], ...]:
    pairs = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(
                f"[initial_data] modes: expected 'k:amp' pairs, got {chunk!r}"
            )
        k_str, amp_str = chunk.split(":", 1)
        try:
            pairs.append((int(k_str.strip()), float(amp_str.strip())))
        except ValueError:
            raise ConfigError(
                f"[initial_data] modes: bad pair {chunk!r}"
            ) from None
    if not pairs:
        raise ConfigError("[initial_data] modes: empty list")
    return tuple(pairs)


def parse_run_config(path: str) -> RunSpec:
    """Read and validate one INI file into a RunSpec."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as err:
        raise ConfigError(f"{path}: {err}") from None

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        allowed = _SCHEMA[section]
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")

    def val(section, key, default=None):
        if not parser.has_option(section, key):
            return default
        return _convert(section, key, parser.get(section, key), _SCHEMA[section][key])

    if not parser.has_option("solver", "n_max"):
        raise ConfigError(f"{path}: [solver] n_max is required")
    solver_kwargs = {}
    for key, kind in _SOLVER_KEYS.items():
        if parser.has_option("solver", key):
            solver_kwargs[key] = _convert("solver", key, parser.get("solver", key), kind)
    try:
        solver = SolverConfig(**solver_kwargs)
    except ConfigError as err:
        raise ConfigError(f"{path}: [solver] {err}") from None

    kind = val("initial_data", "kind", "exp_cos")
    if kind not in _GENERATOR_KEYS:
        raise ConfigError(
            f"{path}: [initial_data] kind must be one of "
            f"{sorted(_GENERATOR_KEYS)}, got {kind!r}"
        )
    params = {}
    if parser.has_section("initial_data"):
        for key in parser["initial_data"]:
            if key == "kind":
                continue
            if key not in _GENERATOR_KEYS[kind]:
                raise ConfigError(
                    f"{path}: [initial_data] key {key!r} does not apply to "
                    f"kind {kind!r}"
                )
            if key == "modes":
                params[key] = _parse_modes(parser.get("initial_data", key))
            else:
                params[key] = _convert(
                    "initial_data", key, parser.get("initial_data", key),
                    _INITIAL_KEYS[key],
                )
    if kind == "power_law" and "exponent" not in params:
        raise ConfigError(f"{path}: [initial_data] power_law needs an exponent")
    if kind == "multi_mode" and "modes" not in params:
        raise ConfigError(f"{path}: [initial_data] multi_mode needs modes")
    if kind == "file" and "path" not in params:
        raise ConfigError(f"{path}: [initial_data] file needs a path")

    conv_n = (16, 32, 64)
    conv_dt = (0.02, 0.01, 0.005, 0.0025)
    if parser.has_option("convergence", "n_list"):
        conv_n = _int_list("convergence", "n_list", parser.get("convergence", "n_list"))
    if parser.has_option("convergence", "dt_list"):
        conv_dt = _float_list(
            "convergence", "dt_list", parser.get("convergence", "dt_list")
        )

    ident_k = (16, 32, 64, 128)
    if parser.has_option("identities", "k_list"):
        ident_k = _int_list("identities", "k_list", parser.get("identities", "k_list"))

    bs_n = (16, 32, 64, 128)
    if parser.has_option("bona_smith", "n_list"):
        bs_n = _int_list("bona_smith", "n_list", parser.get("bona_smith", "n_list"))

    return RunSpec(
        solver=solver,
        initial_kind=kind,
        initial_params=params,
        output_path=val("output", "path"),
        convergence_n=conv_n,
        convergence_dt=conv_dt,
        stability_r=val("stability", "r", 2.0),
        stability_amp=val("stability", "perturbation_amp", 1e-4),
        stability_mode=val("stability", "perturbation_mode", 2),
        identities_k=ident_k,
        identities_power=val("identities", "power_order", 0.25),
        identities_amp=val("identities", "amp", 1.0),
        bona_smith_n=bs_n,
        bona_smith_delta=val("bona_smith", "delta", 0.1),
        bona_smith_factor=val("bona_smith", "reference_factor", 4),
        bona_smith_seed=val("bona_smith", "seed", 0),
        config_dir=os.path.dirname(os.path.abspath(path)),
    )


def make_initial_data(spec: RunSpec, space: SpectralSpace) -> PeriodicField:
    """Instantiate the configured generator on the given space."""
    kind = spec.initial_kind
    p = spec.initial_params
    if kind == "single_mode":
        return single_mode(space, p.get("k", 1), p.get("amp", 0.05))
    if kind == "multi_mode":
        return multi_mode(space, p["modes"])
    if kind == "power_law":
        return power_law(space, p["exponent"], p.get("seed", 0), p.get("amp", 1.0))
    if kind == "exp_cos":
        return exp_cos(space, p.get("amp", 0.05))
    if kind == "file":
        file_path = p["path"]
        if not os.path.isabs(file_path):
            file_path = os.path.join(spec.config_dir, file_path)
        return coefficients_from_file(space, file_path)
    raise ConfigError(f"unknown initial data kind {kind!r}")
