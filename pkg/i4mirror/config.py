"""Module to manage the i4mirror configuration."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields, replace
from os import getenv
from pathlib import Path
from typing import Any, Mapping, Optional

import click
import toml

from .exceptions import ConfigError

__all__ = [
    "CONFIG_PATH",
    "DEVELOP_MODE",
    "NOME_POWERS",
    "PAIRING_NORMALIZATIONS",
    "RunConfig",
]

logger = logging.getLogger(__name__)

CONFIG_PATH = Path.home() / "i4mirror.toml"
_CONFIG = toml.loads(CONFIG_PATH.read_text()) if CONFIG_PATH.is_file() else {}
_DEVELOP_MODE = bool(_CONFIG.get("develop", False))
DEVELOP_MODE = _DEVELOP_MODE

if _DEVELOP_MODE:  # Warn developer that the mode is enabled.
    lines = [f"Executing '{__name__.split('.')[0]}' in DEVELOP mode."]
    config_ = {k: v for k, v in _CONFIG.items() if k != "develop"}
    if config_:
        lines.append(f"{CONFIG_PATH!s} (takes precedence):")
        lines.extend(toml.dumps(config_).splitlines())
    click.secho("\n".join([f"\U0001f6a7  {line}" for line in lines]), fg="yellow", err=True)


def _as_env_var_name(key: str) -> str:
    return "I4MIRROR_" + key.upper()


def _get_config_value(key: str, default: Optional[Any] = None) -> Any:
    """Return config value from configuration source.

    The standard configuration source order is:

        1. environment variables
        2. local configuration

    In 'develop' mode the order is reversed to simplify local
    override of configuration values.

    Environment variables are prefixed with `I4MIRROR_` and upper case,
    e.g. the key `mirror_grade` is read from `I4MIRROR_MIRROR_GRADE`.
    """
    if _DEVELOP_MODE:
        try:
            return _CONFIG[key]
        except KeyError:
            return getenv(_as_env_var_name(key), default)
    return getenv(_as_env_var_name(key), _CONFIG.get(key, default))


I4MIRROR_OUTPUT = _get_config_value("output", "i4mirror-out")
I4MIRROR_MIRROR_GRADE = _get_config_value("mirror_grade", 25)
I4MIRROR_IFUNCTION_GRADE = _get_config_value("ifunction_grade", 6)
I4MIRROR_THETA_TOL = _get_config_value("theta_tol", 1e-30)
I4MIRROR_BRIDGE_ORDER = _get_config_value("bridge_order", 49)
I4MIRROR_MP_DPS = _get_config_value("mp_dps", 60)

PAIRING_NORMALIZATIONS = ("divisor", "raw")
NOME_POWERS = (1, 2, 4)

_BOOLEAN_STRINGS = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _coerce(name: str, kind: type, value: Any) -> Any:
    # Environment variables arrive as strings.
    if kind is bool and isinstance(value, str):
        try:
            return _BOOLEAN_STRINGS[value.strip().lower()]
        except KeyError:
            raise ConfigError(f"{name}: expected a boolean, got {value!r}.")
    try:
        return kind(value)
    except (TypeError, ValueError) as error:
        raise ConfigError(f"{name}: cannot interpret {value!r} ({error}).") from error


@dataclass(frozen=True)
class RunConfig:
    """Settings of a single run: stage orders, outputs and convention overrides."""

    output: Path = Path(I4MIRROR_OUTPUT)
    mirror_grade: int = 25
    ifunction_grade: int = 6
    theta_tol: float = 1e-30
    bridge_order: int = 49
    mp_dps: int = 60
    emit_json: bool = True
    emit_csv: bool = False
    emit_svg: bool = False
    theta_label_offset: int = 0
    pairing_normalization: str = "divisor"
    nome_power: int = 4

    def __post_init__(self) -> None:
        for field_ in fields(self):
            kind = {"Path": Path, "int": int, "float": float, "bool": bool, "str": str}[
                str(field_.type)
            ]
            value = getattr(self, field_.name)
            if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
                object.__setattr__(self, field_.name, _coerce(field_.name, kind, value))
        for name in ("mirror_grade", "ifunction_grade", "bridge_order", "mp_dps"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}.")
        if not self.theta_tol > 0:
            raise ConfigError(f"theta_tol must be positive, got {self.theta_tol}.")
        if self.pairing_normalization not in PAIRING_NORMALIZATIONS:
            raise ConfigError(
                f"pairing_normalization must be one of {PAIRING_NORMALIZATIONS}, "
                f"got {self.pairing_normalization!r}."
            )
        if self.nome_power not in NOME_POWERS:
            raise ConfigError(f"nome_power must be one of {NOME_POWERS}, got {self.nome_power}.")
        object.__setattr__(self, "theta_label_offset", self.theta_label_offset % 4)

    @classmethod
    def defaults(cls) -> RunConfig:
        """The configuration resolved from the environment and ~/i4mirror.toml."""
        return cls(
            output=I4MIRROR_OUTPUT,
            mirror_grade=I4MIRROR_MIRROR_GRADE,
            ifunction_grade=I4MIRROR_IFUNCTION_GRADE,
            theta_tol=I4MIRROR_THETA_TOL,
            bridge_order=I4MIRROR_BRIDGE_ORDER,
            mp_dps=I4MIRROR_MP_DPS,
        )

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: RunConfig | None = None) -> RunConfig:
        """Validate a flat key/value mapping and apply it on top of ``base``."""
        import jsonschema

        from .artifacts import OutputSchemas

        try:
            jsonschema.validate(instance=dict(data), schema=OutputSchemas.from_package().run_config)
        except jsonschema.ValidationError as error:
            raise ConfigError(f"Invalid run configuration: {error.message}") from error
        return (base or cls.defaults()).merge(**data)

    @classmethod
    def from_file(cls, path: Path | str, base: RunConfig | None = None) -> RunConfig:
        path = Path(path)
        try:
            data = toml.loads(path.read_text(encoding="utf-8"))
        except toml.TomlDecodeError as error:
            raise ConfigError(f"Unable to parse {path}: {error}") from error
        logger.info("Read run configuration from %s.", path)
        return cls.from_mapping(data, base=base)

    def merge(self, **overrides: Any) -> RunConfig:
        """Return a copy with every override that is not None applied."""
        known = {field_.name for field_ in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}.")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_json(self) -> dict[str, Any]:
        data = asdict(self)
        data["output"] = str(self.output)
        return data
