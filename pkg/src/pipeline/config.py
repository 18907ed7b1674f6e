"""
Scenario Configuration
======================

A scenario bundles machine parameters, operator configuration, workplace
layout and run settings. It is read from either

- line-based text: ``section.key = value`` with ``#`` comments; angles may
  carry a ``deg`` suffix, string settings are bare words, or
- YAML: nested mappings flattened to the same dotted keys; an optional
  top-level ``logging`` mapping is left to the command line.

Both go through one strict validation path: unknown keys are errors,
omitted keys take their defaults.
"""

import math
import re
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from ..geom.vpath import WorkplaceLayout
from ..cosim.master import machine_knowledge
from ..operator_model.state import OperatorConfig
from ..plant.articulated_loader import MachineParams
from ..utils.helpers import config_digest, flatten_dict

logger = logging.getLogger(__name__)

KEY_PATTERN = re.compile(r"^[a-z_]+\.[a-z_0-9]+$")
DEG_SUFFIX = re.compile(r"^(?P<number>\S+)\s*deg$")

ANGLE_KEYS = {
    "machine.gamma_max", "machine.gamma_rate", "machine.tilt_min", "machine.tilt_max",
    "operator.aim_tol", "operator.phi_init", "operator.max_heading_correction",
    "scenario.phi0",
}

SCENARIO_TYPES: Dict[str, type] = {
    "name": str,
    "dt": float,
    "t_max": float,
    "output_dir": str,
    "h0": float,
    "phi0": float,
    "plant": str,
}

LAYOUT_TYPES: Dict[str, type] = {"a": float, "b": float, "receiver_halfwidth": float}

# Operator settings derived from other sections rather than configured directly
_DERIVED_OPERATOR_FIELDS = {"layout", "machine"}


class ConfigParseError(ValueError):
    """Malformed configuration text"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}{message}")


class ConfigValidationError(ValueError):
    """Configuration value violating an invariant"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def _schema() -> Dict[str, type]:
    schema: Dict[str, type] = {}
    for f in fields(MachineParams):
        schema[f"machine.{f.name}"] = f.type
    for f in fields(OperatorConfig):
        if f.name not in _DERIVED_OPERATOR_FIELDS:
            schema[f"operator.{f.name}"] = f.type
    for name, kind in LAYOUT_TYPES.items():
        schema[f"layout.{name}"] = kind
    for name, kind in SCENARIO_TYPES.items():
        schema[f"scenario.{name}"] = kind
    return schema


SCHEMA = _schema()

DEFAULT_LAYOUT = OperatorConfig().layout


# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run and record one cycle"""
    machine: MachineParams = field(default_factory=MachineParams)
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    dt: float = 0.01
    t_max: float = 300.0
    output_dir: str = "output"
    name: str = "nominal"
    h0: float = 0.0
    phi0: float = 0.0
    plant: str = "articulated"

    @property
    def layout(self) -> WorkplaceLayout:
        return self.operator.layout

    def items(self) -> List[Tuple[str, Any]]:
        """Resolved value of every configuration key"""
        result = []
        for key in sorted(SCHEMA):
            section, name = key.split(".", 1)
            if section == "machine":
                value = getattr(self.machine, name)
            elif section == "operator":
                value = getattr(self.operator, name)
            elif section == "layout":
                value = getattr(self.layout, name)
            else:
                value = getattr(self, name)
            result.append((key, value))
        return result

    @property
    def digest(self) -> str:
        """Content hash of the scenario; the output location does not count"""
        return config_digest((k, v) for k, v in self.items() if k != "scenario.output_dir")

    def with_overrides(self, **overrides: Any) -> "ScenarioConfig":
        """Copy with run settings replaced; None values are ignored"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        values = {k: v for k, v in self.items()}
        for name, value in changes.items():
            values[f"scenario.{name}"] = value
        return build_config(values)

    def with_machine(self, **changes: Any) -> "ScenarioConfig":
        """Copy with machine parameters replaced, revalidated"""
        values = {k: v for k, v in self.items()}
        values.update({f"machine.{k}": v for k, v in changes.items()})
        return build_config(values)

    def with_operator(self, **changes: Any) -> "ScenarioConfig":
        values = {k: v for k, v in self.items()}
        values.update({f"operator.{k}": v for k, v in changes.items()})
        return build_config(values)

    def with_layout(self, **changes: Any) -> "ScenarioConfig":
        values = {k: v for k, v in self.items()}
        values.update({f"layout.{k}": v for k, v in changes.items()})
        return build_config(values)


# =============================================================================
# VALUE CONVERSION
# =============================================================================

def _coerce(key: str, raw: Any, line_number: Optional[int] = None) -> Any:
    kind = SCHEMA[key]
    if kind is str:
        text = str(raw).strip()
        if not text:
            raise ConfigParseError(f"{key} expects a word", line_number)
        return text

    if isinstance(raw, bool):
        raise ConfigValidationError(key, f"expected a number, got {raw}")

    degrees = False
    if isinstance(raw, str):
        text = raw.strip()
        match = DEG_SUFFIX.match(text)
        if match:
            if key not in ANGLE_KEYS:
                raise ConfigParseError(f"{key} is not an angle, 'deg' not allowed", line_number)
            degrees = True
            text = match.group("number")
        try:
            number = int(text) if kind is int else float(text)
        except ValueError:
            raise ConfigParseError(f"{key} expects a number, got '{raw}'", line_number)
    elif isinstance(raw, (int, float)):
        number = raw
    else:
        raise ConfigParseError(f"{key} expects a number, got {type(raw).__name__}", line_number)

    if kind is int:
        if isinstance(number, float) and not number.is_integer():
            raise ConfigValidationError(key, f"expected an integer, got {number}")
        return int(number)

    value = float(number)
    if not math.isfinite(value):
        raise ConfigValidationError(key, f"must be finite, got {raw}")
    return math.radians(value) if degrees else value


def _offending_key(section: str, names: List[str], message: str) -> str:
    """Best guess at the key an error message talks about"""
    for name in sorted(names, key=len, reverse=True):
        if re.search(rf"\b{re.escape(name)}\b", message):
            return f"{section}.{name}"
    return section


# =============================================================================
# BUILDING
# =============================================================================

def build_config(values: Dict[str, Any], line_numbers: Optional[Dict[str, int]] = None) -> ScenarioConfig:
    """
    Validate dotted key/value pairs into a ScenarioConfig.

    Raises:
        ConfigParseError: Value of the wrong form
        ConfigValidationError: Unknown key or violated invariant
    """
    line_numbers = line_numbers or {}
    resolved: Dict[str, Any] = {}
    for key, raw in values.items():
        if key not in SCHEMA:
            raise ConfigValidationError(key, "unknown configuration key")
        resolved[key] = _coerce(key, raw, line_numbers.get(key))

    def section(prefix: str) -> Dict[str, Any]:
        return {k.split(".", 1)[1]: v for k, v in resolved.items() if k.startswith(prefix + ".")}

    machine_values = section("machine")
    try:
        machine = MachineParams(**machine_values)
    except ValueError as e:
        names = [f.name for f in fields(MachineParams)]
        raise ConfigValidationError(_offending_key("machine", names, str(e)), str(e)) from e

    try:
        layout = WorkplaceLayout(**{**DEFAULT_LAYOUT.to_dict(), **section("layout")})
    except ValueError as e:
        raise ConfigValidationError(_offending_key("layout", list(LAYOUT_TYPES), str(e)), str(e)) from e

    try:
        operator = OperatorConfig(
            layout=layout, machine=machine_knowledge(machine), **section("operator")
        )
    except ValueError as e:
        names = [f.name for f in fields(OperatorConfig)]
        raise ConfigValidationError(_offending_key("operator", names, str(e)), str(e)) from e

    if operator.h_empty > machine.h_max:
        raise ConfigValidationError(
            "operator.h_empty", f"emptying height {operator.h_empty} exceeds h_max {machine.h_max}"
        )
    if not 0.0 <= operator.h_init <= machine.h_max:
        raise ConfigValidationError("operator.h_init", f"must lie in [0, {machine.h_max}]")
    if not machine.tilt_min <= operator.phi_init <= machine.tilt_max:
        raise ConfigValidationError("operator.phi_init", "outside the bucket tilt range")

    scenario = section("scenario")
    for name in ("dt", "t_max"):
        if name in scenario and not scenario[name] > 0:
            raise ConfigValidationError(f"scenario.{name}", f"must be positive, got {scenario[name]}")
    if not 0.0 <= scenario.get("h0", 0.0) <= machine.h_max:
        raise ConfigValidationError("scenario.h0", f"must lie in [0, {machine.h_max}]")
    if not machine.tilt_min <= scenario.get("phi0", 0.0) <= machine.tilt_max:
        raise ConfigValidationError("scenario.phi0", "outside the bucket tilt range")

    return ScenarioConfig(machine=machine, operator=operator, **scenario)


def parse_config(text: Union[str, bytes]) -> ScenarioConfig:
    """
    Parse line-based configuration text.

    Raises:
        ConfigParseError: Malformed line, with its line number
        ConfigValidationError: Unknown key or violated invariant
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ConfigParseError("not valid UTF-8 text", text.count(b"\n", 0, e.start) + 1)

    values: Dict[str, str] = {}
    line_numbers: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'section.key = value', got '{line}'", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not KEY_PATTERN.match(key):
            raise ConfigParseError(f"malformed key '{key}'", number)
        if not value:
            raise ConfigParseError(f"missing value for {key}", number)
        if key in values:
            raise ConfigParseError(f"duplicate key {key}", number)
        values[key] = value
        line_numbers[key] = number

    config = build_config(values, line_numbers)
    logger.debug(f"Parsed scenario '{config.name}' ({len(values)} keys set)")
    return config


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigParseError(f"invalid YAML: {e}", mark.line + 1 if mark else None) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigParseError("top level of a YAML scenario must be a mapping")
    return data


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Load a scenario file, YAML or line-based by extension.

    Raises:
        OSError: File cannot be read
        ConfigParseError, ConfigValidationError: Invalid content
    """
    path = Path(path)
    if path.suffix in (".yaml", ".yml"):
        data = _read_yaml(path)
        data.pop("logging", None)
        config = build_config(flatten_dict(data, sep="."))
    else:
        config = parse_config(path.read_bytes())
    logger.info(f"Loaded scenario '{config.name}' from {path}")
    return config


def load_logging_settings(path: Union[str, Path]) -> Dict[str, Any]:
    """The optional ``logging`` mapping of a YAML scenario"""
    path = Path(path)
    if path.suffix not in (".yaml", ".yml"):
        return {}
    settings = _read_yaml(path).get("logging") or {}
    if not isinstance(settings, dict):
        raise ConfigValidationError("logging", "must be a mapping")
    return settings
