"""Experiment configuration: config files, --set overrides and the run hash.

A config file is either a bare ModelParams document or a wrapper
``{"model": {...}, "settings": {...}}``. Overrides are ``key=value`` pairs;
``model.<field>=<json>`` targets the model, anything else a setting. Values
are parsed as JSON when possible and taken as plain strings otherwise.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..core.errors import ConfigError, ParameterError
from ..model.params import JSON_KEYS, ModelParams

WRAPPER_KEYS = ('model', 'settings')
MODEL_PREFIX = 'model.'
SITE_FIELDS = ('delta_c', 'J_c')
ATOM_FIELDS = ('delta_n', 'g_left', 'g_right', 'phi', 'omega', 'pos')
TRUE_WORDS = ('true', '1', 'yes', 'on')
FALSE_WORDS = ('false', '0', 'no', 'off')


@dataclass
class ExperimentSpec:
    """
    Everything one CLI run depends on.

    Attributes:
        name: Subcommand name
        config_path: Config file, if one was given
        out_dir: Directory receiving data files, plots and the manifest
        seed: Root seed of every random stream in the run
        jobs: Worker process bound
        overrides: Raw --set arguments, in command-line order
        plots: Whether SVG figures are written
        model: Resolved model (None for experiments that build their own)
        settings: Resolved settings, defaults merged with file and overrides
    """

    name: str
    config_path: Optional[Path]
    out_dir: Path
    seed: int = 0
    jobs: int = 1
    overrides: Tuple[str, ...] = ()
    plots: bool = True
    model: Optional[ModelParams] = None
    settings: Dict[str, Any] = field(default_factory=dict)

    def resolved(self) -> Dict[str, Any]:
        """Canonical description of the run (what the hash covers)."""
        return {
            'experiment': self.name,
            'model': self.model.to_dict() if self.model is not None else None,
            'settings': _plain(self.settings),
            'seed': self.seed,
        }

    @property
    def config_hash(self) -> str:
        return config_hash(self.resolved())


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def canonical_json(payload: Any) -> bytes:
    return json.dumps(_plain(payload), sort_keys=True, separators=(',', ':'), ensure_ascii=True).encode('utf-8')


def config_hash(payload: Any) -> str:
    """sha256 of the canonical JSON form of payload."""
    return hashlib.sha256(canonical_json(payload)).hexdigest()


def load_config(path: Optional[Path]) -> Tuple[Optional[Dict[str, Any]], Dict[str, Any]]:
    """
    Read a config file.

    Args:
        path: Config path, or None for no file

    Returns:
        (model dict or None, settings dict)

    Raises:
        ConfigError: missing or unreadable file, invalid JSON, unexpected layout
    """
    if path is None:
        return None, {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except OSError as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a JSON object")

    if set(data) & set(WRAPPER_KEYS):
        unknown = sorted(set(data) - set(WRAPPER_KEYS))
        if unknown:
            raise ConfigError(f"Unknown config sections: {', '.join(unknown)}")
        model = data.get('model')
        settings = data.get('settings') or {}
        if model is not None and not isinstance(model, dict):
            raise ConfigError("'model' must be a JSON object")
        if not isinstance(settings, dict):
            raise ConfigError("'settings' must be a JSON object")
        return model, dict(settings)
    return data, {}


def parse_override(text: str) -> Tuple[str, Any]:
    """Split 'key=value' and decode the value."""
    key, sep, raw = text.partition('=')
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"Override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _coerce_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in TRUE_WORDS:
        return True
    if text in FALSE_WORDS:
        return False
    raise ConfigError(f"Setting {key} expects true/false, got {value!r}")


def coerce_setting(key: str, default: Any, value: Any) -> Any:
    """
    Convert value to the type of the setting's default.

    Raises:
        ConfigError: value cannot be converted
    """
    try:
        if isinstance(default, bool):
            return _coerce_bool(key, value)
        if isinstance(default, int):
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError("not an integer")
            return int(float(value))
        if isinstance(default, float):
            if isinstance(value, bool):
                raise ValueError("not a number")
            return float(value)
        if isinstance(default, str):
            return str(value)
        if isinstance(default, (list, tuple)):
            values = value if isinstance(value, (list, tuple)) else [value]
            if default and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in default):
                return [float(v) for v in values]
            return list(values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Setting {key}={value!r} does not match the type of its default {default!r}: {e}") from e
    return value


def merge_settings(
    defaults: Dict[str, Any], file_settings: Dict[str, Any], overrides: Sequence[Tuple[str, Any]]
) -> Dict[str, Any]:
    """Defaults, then file settings, then overrides; unknown keys raise ConfigError."""
    settings = dict(defaults)
    for key, value in list(file_settings.items()) + list(overrides):
        if key not in defaults:
            known = ', '.join(sorted(defaults)) or 'none'
            raise ConfigError(f"Unknown setting {key!r} (known: {known})")
        settings[key] = coerce_setting(key, defaults[key], value)
    return settings


def _broadcast(name: str, value: Any, data: Dict[str, Any]) -> Any:
    if isinstance(value, (list, tuple)):
        return list(value)
    if (name in SITE_FIELDS and 'L' not in data) or (name in ATOM_FIELDS and 'N' not in data):
        raise ConfigError(f"Cannot broadcast {name}: the model has no L or N")
    if name in SITE_FIELDS:
        length = int(data['L']) - (1 if name == 'J_c' else 0)
        return [value] * length
    if name in ATOM_FIELDS:
        return [value] * int(data['N'])
    return value


def apply_model_overrides(model: Dict[str, Any], overrides: Sequence[Tuple[str, Any]]) -> Dict[str, Any]:
    """
    Apply model.<field> overrides to a ModelParams dict.

    Scalars broadcast over sites or atoms; ``g`` sets both coupling sides.
    L and N are applied before the broadcasts so a resized model can be
    given fresh per-site values in the same command.

    Raises:
        ConfigError: unknown model field
    """
    data = dict(model)
    ordered = sorted(overrides, key=lambda kv: kv[0] not in ('L', 'N'))
    for name, value in ordered:
        if name == 'g':
            data['g_left'] = _broadcast('g_left', value, data)
            data['g_right'] = _broadcast('g_right', value, data)
        elif name in JSON_KEYS:
            data[name] = _broadcast(name, value, data)
        else:
            raise ConfigError(f"Unknown model field {name!r} (known: g, {', '.join(JSON_KEYS)})")
    return data


def split_overrides(overrides: Sequence[str]) -> Tuple[List[Tuple[str, Any]], List[Tuple[str, Any]]]:
    """(model overrides without prefix, setting overrides)."""
    model, settings = [], []
    for text in overrides:
        key, value = parse_override(text)
        if key.startswith(MODEL_PREFIX):
            model.append((key[len(MODEL_PREFIX):], value))
        else:
            settings.append((key, value))
    return model, settings


def resolve_spec(
    runner: Any,
    config_path: Optional[Path],
    out_dir: Path,
    seed: int = 0,
    jobs: int = 1,
    overrides: Sequence[str] = (),
    plots: bool = True,
) -> ExperimentSpec:
    """
    Build the ExperimentSpec of one run from its runner's defaults.

    Args:
        runner: ExperimentRunner whose defaults apply
        config_path: Optional config file
        out_dir: Output directory
        seed: Root seed
        jobs: Worker process bound
        overrides: Raw --set arguments
        plots: Write SVG figures

    Returns:
        ExperimentSpec with model and settings resolved

    Raises:
        ConfigError: bad file, unknown keys, a model given to an experiment without one
        ParameterError: seed or jobs out of range, inconsistent model
    """
    if seed < 0:
        raise ParameterError(f"seed must be nonnegative, got {seed}")
    if jobs < 1:
        raise ParameterError(f"jobs must be positive, got {jobs}")
    file_model, file_settings = load_config(config_path)
    model_overrides, setting_overrides = split_overrides(overrides)

    model: Optional[ModelParams] = None
    if runner.uses_model:
        default = runner.default_model()
        data = file_model if file_model is not None else (default.to_dict() if default is not None else None)
        if data is not None:
            data = apply_model_overrides(data, model_overrides)
            model = ModelParams.from_dict(data)
        elif model_overrides:
            raise ConfigError(f"{runner.name} has no default model to override; supply one with --config")
    elif file_model is not None or model_overrides:
        raise ConfigError(f"{runner.name} builds its own models and takes no model parameters")

    settings = merge_settings(runner.default_settings(), file_settings, setting_overrides)
    return ExperimentSpec(
        name=runner.name,
        config_path=Path(config_path) if config_path is not None else None,
        out_dir=Path(out_dir),
        seed=seed,
        jobs=jobs,
        overrides=tuple(overrides),
        plots=plots,
        model=model,
        settings=settings,
    )
