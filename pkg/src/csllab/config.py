"""Run configuration: strict schema, explicit units, SI normalization.

Configs are YAML key-value documents.  Every physical quantity must be a
string of the form "<number> <unit>" (e.g. "10 cm", "2e-9 /s"); bare numbers
are accepted only for dimensionless fields and counts.  Unknown keys are
rejected.  Seeds are mandatory: they come from the config file or the CLI
flag, never from entropy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import yaml

from .constants import constants
from .errors import ConfigError

SUBCOMMANDS = ("collapse", "epr", "frame", "mott", "heating", "ordering", "noise")

_UNIT_TABLES: dict[str, dict[str, float]] = {
    "rate": {"/s": 1.0, "1/s": 1.0, "s^-1": 1.0},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9, "km": 1e3},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "speed": {"m/s": 1.0, "km/s": 1e3, "c": constants().c},
    "wavenumber": {"/m": 1.0, "1/m": 1.0, "m^-1": 1.0, "/cm": 1e2, "cm^-1": 1e2},
}

_SI_UNIT = {"rate": "/s", "length": "m", "time": "s", "speed": "m/s", "wavenumber": "/m"}


def parse_quantity(raw: Any, kind: str, key: str) -> float:
    """Parse "<number> <unit>" into SI; reject unitless physical quantities."""
    table = _UNIT_TABLES[kind]
    if isinstance(raw, (int, float)):
        raise ConfigError(
            f"key '{key}' needs an explicit unit, e.g. \"{raw} {_SI_UNIT[kind]}\" "
            f"(accepted: {', '.join(sorted(table))})"
        )
    if not isinstance(raw, str):
        raise ConfigError(f"key '{key}' must be a quantity string, got {type(raw).__name__}")
    parts = raw.split()
    if len(parts) != 2:
        raise ConfigError(f"key '{key}' must look like \"<number> <unit>\", got {raw!r}")
    number, unit = parts
    if unit not in table:
        raise ConfigError(
            f"key '{key}': unknown {kind} unit {unit!r} (accepted: {', '.join(sorted(table))})"
        )
    try:
        value = float(number)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': bad number {number!r}") from exc
    return value * table[unit]


def format_quantity(value: float, kind: str) -> str:
    """SI-unit string for serialization; parse_quantity round-trips it."""
    return f"{value:.17g} {_SI_UNIT[kind]}"


@dataclass(frozen=True)
class FieldSpec:
    kind: str                 # unit-table name or: dimensionless, int, str, list-*
    required: bool = False
    default: Any = None
    choices: tuple = ()


# Per-subcommand schema.  Physical defaults that mirror the stored constants
# are filled at parse time so minimal configs are valid.
def _schemas() -> dict[str, dict[str, FieldSpec]]:
    c = constants()
    return {
        "collapse": {
            "lambda0": FieldSpec("rate", default=c.lambda_csl_central),
            "r_c": FieldSpec("length", default=c.r_c_standard),
            "gamma_override": FieldSpec("rate", default=None),
            "dt": FieldSpec("time", required=True),
            "n_steps_max": FieldSpec("int", default=40_000),
            "threshold": FieldSpec("dimensionless", default=1.0 - 1e-6),
            "trajectories": FieldSpec("int", default=1000),
            "initial_probabilities": FieldSpec("list-dimensionless", required=True),
            "m_eigenvalues": FieldSpec("list-dimensionless", required=True),
            "noise_kind": FieldSpec("str", default="white", choices=("white", "gaussian_cutoff")),
            "t_c": FieldSpec("time", default=0.0),
            "trace_trajectories": FieldSpec("int", default=3),
        },
        "epr": {
            "apparatus_mass_gap": FieldSpec("dimensionless", default=100.0),
            "gamma": FieldSpec("rate", required=True),
            "dt": FieldSpec("time", required=True),
            "n_steps_max": FieldSpec("int", default=100_000),
            "threshold": FieldSpec("dimensionless", default=1.0 - 1e-6),
            "runs": FieldSpec("int", default=1000),
        },
        "frame": {
            "boost_v": FieldSpec("speed", required=True),
            "t_c": FieldSpec("time", required=True),
            "r_c": FieldSpec("length", default=c.r_c_standard),
            "gamma": FieldSpec("rate", required=True),
            "dt": FieldSpec("time", required=True),
            "n_steps_max": FieldSpec("int", default=4000),
            "pairs": FieldSpec("int", default=100),
            "pointer_gap": FieldSpec("dimensionless", default=2.0),
        },
        "mott": {
            "k": FieldSpec("wavenumber", required=True),
            "a_distance": FieldSpec("length", required=True),
            "sigma": FieldSpec("length", required=True),
            "n_angles": FieldSpec("int", default=201),
            "radial_points": FieldSpec("int", default=256),
            "angular_points": FieldSpec("int", default=64),
            "r_max": FieldSpec("dimensionless", default=1.5),
        },
        "heating": {
            "lambda0": FieldSpec("rate", default=c.lambda_csl_central),
            "r_c": FieldSpec("length", default=c.r_c_standard),
            "v_sound": FieldSpec("speed", default=c.v_sound_default),
            "beta_start": FieldSpec("dimensionless", default=0.0),
            "beta_stop": FieldSpec("dimensionless", default=6.0),
            "beta_points": FieldSpec("int", default=25),
        },
        "ordering": {
            "x_a": FieldSpec("length", required=True),
            "t_a": FieldSpec("time", required=True),
            "x_b": FieldSpec("length", required=True),
            "t_b": FieldSpec("time", required=True),
            "boost_v": FieldSpec("speed", required=True),
        },
        "noise": {
            "lambda0": FieldSpec("rate", default=1.0),
            "t_c": FieldSpec("time", default=0.0),
            "r_c": FieldSpec("length", default=c.r_c_standard),
            "kind": FieldSpec("str", default="white", choices=("white", "gaussian_cutoff")),
            "channels": FieldSpec("int", default=1),
            "steps": FieldSpec("int", default=4096),
            "dt": FieldSpec("time", required=True),
        },
    }


@dataclass(frozen=True)
class RunConfig:
    """Validated, SI-normalized parameters for one subcommand run."""

    subcommand: str
    seed: int
    params: dict[str, Any]


def _parse_field(key: str, spec: FieldSpec, raw: Any) -> Any:
    if spec.kind in _UNIT_TABLES:
        return parse_quantity(raw, spec.kind, key)
    if spec.kind == "dimensionless":
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise ConfigError(f"key '{key}' must be a plain number (dimensionless)")
        return float(raw)
    if spec.kind == "int":
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise ConfigError(f"key '{key}' must be an integer")
        return int(raw)
    if spec.kind == "str":
        if not isinstance(raw, str):
            raise ConfigError(f"key '{key}' must be a string")
        if spec.choices and raw not in spec.choices:
            raise ConfigError(f"key '{key}' must be one of {spec.choices}, got {raw!r}")
        return raw
    if spec.kind == "list-dimensionless":
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"key '{key}' must be a non-empty list of numbers")
        out = []
        for n, item in enumerate(raw):
            if not isinstance(item, (int, float)) or isinstance(item, bool):
                raise ConfigError(f"key '{key}[{n}]' must be a plain number")
            out.append(float(item))
        return out
    raise ConfigError(f"internal: unknown field kind {spec.kind}")


def parse_config(text: str, subcommand: str, seed: int | None = None) -> RunConfig:
    """Validate a YAML document against the subcommand schema.

    `seed` (from the command line) overrides a `seed` key in the document; one
    of the two must be present.
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}; expected one of {SUBCOMMANDS}")
    try:
        doc = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    schema = _schemas()[subcommand]

    doc_seed = doc.pop("seed", None)
    if doc_seed is not None and (not isinstance(doc_seed, int) or isinstance(doc_seed, bool)):
        raise ConfigError("key 'seed' must be an integer")
    effective_seed = seed if seed is not None else doc_seed
    if effective_seed is None:
        raise ConfigError("a seed is mandatory (config key 'seed' or --seed flag)")
    if not 0 <= effective_seed < 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")

    unknown = set(doc) - set(schema)
    if unknown:
        raise ConfigError(f"unknown key(s) for '{subcommand}': {', '.join(sorted(unknown))}")
    params: dict[str, Any] = {}
    for key, spec in schema.items():
        if key in doc:
            params[key] = _parse_field(key, spec, doc[key])
        elif spec.required:
            hint = _SI_UNIT.get(spec.kind, "")
            raise ConfigError(f"missing required key '{key}'"
                              + (f" (unit {hint})" if hint else ""))
        else:
            params[key] = spec.default
    return RunConfig(subcommand=subcommand, seed=int(effective_seed), params=params)


def serialize_config(config: RunConfig) -> str:
    """YAML text with SI units; parse_config round-trips to an equal RunConfig."""
    schema = _schemas()[config.subcommand]
    doc: dict[str, Any] = {"seed": config.seed}
    for key, spec in schema.items():
        value = config.params[key]
        if value is None:
            continue
        if spec.kind in _UNIT_TABLES:
            doc[key] = format_quantity(value, spec.kind)
        else:
            doc[key] = value
    return yaml.safe_dump(doc, sort_keys=True)
