"""Run configuration: flat key=value files plus command-line overrides.

Grammar of a config file: one ``key = value`` pair per line; blank
lines and lines starting with ``#`` are ignored; whitespace around key
and value is stripped.  List values are comma-separated.  A JSON run
manifest (as written by ``train-probe``) is also accepted wherever a
config file is, in which case its embedded resolved config is used,
making reruns reproduce the original outputs exactly.

Unknown keys are rejected, every value is type-checked, and all seeds
have fixed defaults, so a config file alone pins a run completely.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import ConfigError

DEFAULT_ALPHAS = tuple(round(0.2 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class SanitySasConfig:
    """Parameters of the synthetic stable-noise sweep."""

    alphas: tuple = DEFAULT_ALPHAS
    m: int = 1000
    p: int = 100
    k: int = 1000
    level: float = 0.05
    seed: int = 0
    workers: int = 1
    out_dir: str = "."


@dataclass(frozen=True)
class TrainProbeConfig:
    """Parameters of a training run with noise probing at checkpoints."""

    dataset: str = "blobs"
    blobs_n: int = 4096
    blobs_d: int = 16
    blobs_classes: int = 10
    blobs_spread: float = 1.4
    blobs_seed: int = 0
    idx_images: str = ""
    idx_labels: str = ""
    hidden: tuple = (128, 128)
    activation: str = "relu"
    batch_size: int = 256
    learning_rate: float = 0.1
    iterations: int = 500
    checkpoint_every: int = 100
    sgn_minibatches: int = 1000
    seed: int = 0
    k: int = 1000
    level: float = 0.05
    workers: int = 1
    save_noise: bool = False
    force_full_batch: bool = False
    out_dir: str = "."

    def __post_init__(self):
        if self.dataset not in ("blobs", "idx"):
            raise ConfigError(f"dataset must be 'blobs' or 'idx', got {self.dataset!r}")
        if self.dataset == "idx" and not (self.idx_images and self.idx_labels):
            raise ConfigError("dataset=idx requires idx_images and idx_labels paths")
        if self.activation not in ("relu", "tanh"):
            raise ConfigError(f"activation must be 'relu' or 'tanh', got {self.activation!r}")


@dataclass(frozen=True)
class EstimateAlphaConfig:
    """Parameters of the tail-index estimation command."""

    input: str = ""
    k1: Optional[int] = None
    out_dir: str = "."

    def __post_init__(self):
        if not self.input:
            raise ConfigError("estimate-alpha requires an input path")


@dataclass(frozen=True)
class Test1dConfig:
    """Parameters of the one-dimensional test command."""

    input: str = ""
    level: float = 0.05

    def __post_init__(self):
        if not self.input:
            raise ConfigError("test-1d requires an input path")


def _parse_bool(key, value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        low = value.strip().lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_int(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _parse_optional_int(key, value):
    if value is None or (isinstance(value, str) and not value.strip()):
        return None
    return _parse_int(key, value)


def _parse_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def _parse_str(key, value):
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value.strip()


def _parse_float_list(key, value):
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key}: expected a comma-separated list, got {value!r}")
    return tuple(_parse_float(key, v) for v in value)


def _parse_int_list(key, value):
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key}: expected a comma-separated list, got {value!r}")
    return tuple(_parse_int(key, v) for v in value)


_PARSERS = {
    "sanity-sas": {
        "alphas": _parse_float_list,
        "m": _parse_int,
        "p": _parse_int,
        "k": _parse_int,
        "level": _parse_float,
        "seed": _parse_int,
        "workers": _parse_int,
        "out_dir": _parse_str,
    },
    "train-probe": {
        "dataset": _parse_str,
        "blobs_n": _parse_int,
        "blobs_d": _parse_int,
        "blobs_classes": _parse_int,
        "blobs_spread": _parse_float,
        "blobs_seed": _parse_int,
        "idx_images": _parse_str,
        "idx_labels": _parse_str,
        "hidden": _parse_int_list,
        "activation": _parse_str,
        "batch_size": _parse_int,
        "learning_rate": _parse_float,
        "iterations": _parse_int,
        "checkpoint_every": _parse_int,
        "sgn_minibatches": _parse_int,
        "seed": _parse_int,
        "k": _parse_int,
        "level": _parse_float,
        "workers": _parse_int,
        "save_noise": _parse_bool,
        "force_full_batch": _parse_bool,
        "out_dir": _parse_str,
    },
    "estimate-alpha": {
        "input": _parse_str,
        "k1": _parse_optional_int,
        "out_dir": _parse_str,
    },
    "test-1d": {
        "input": _parse_str,
        "level": _parse_float,
    },
}

_CONFIG_TYPES = {
    "sanity-sas": SanitySasConfig,
    "train-probe": TrainProbeConfig,
    "estimate-alpha": EstimateAlphaConfig,
    "test-1d": Test1dConfig,
}

COMMANDS = tuple(_CONFIG_TYPES)


def _read_flat_file(path: Path) -> dict:
    pairs = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
        key, _, value = text.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = value.strip()
    return pairs


def _read_config_file(command: str, path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        head = path.read_text(errors="replace").lstrip()[:1]
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if head != "{":
        return _read_flat_file(path)
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON manifest: {exc}") from exc
    if not isinstance(manifest, dict) or "config" not in manifest:
        raise ConfigError(f"{path}: manifest must be an object with a 'config' key")
    declared = manifest.get("command")
    if declared is not None and declared != command:
        raise ConfigError(
            f"{path}: manifest was written by {declared!r}, not usable for {command!r}"
        )
    if not isinstance(manifest["config"], dict):
        raise ConfigError(f"{path}: manifest 'config' must be an object")
    return dict(manifest["config"])


def _parse_override(text: str) -> tuple:
    if "=" not in text:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    key, _, value = text.partition("=")
    key = key.strip()
    if not key:
        raise ConfigError(f"override has an empty key: {text!r}")
    return key, value.strip()


def load_config(
    command: str,
    path: Optional[Union[str, Path]] = None,
    overrides: Sequence[str] = (),
):
    """Resolve a subcommand's config from defaults, file, and overrides.

    Later sources win: built-in defaults, then the config file (flat or
    manifest), then each ``key=value`` override in order.  Unknown keys
    and ill-typed values raise ConfigError.
    """
    if command not in _PARSERS:
        raise ConfigError(f"unknown command {command!r}")
    parsers = _PARSERS[command]
    raw = {}
    if path is not None:
        raw.update(_read_config_file(command, path))
    for text in overrides:
        key, value = _parse_override(text)
        raw[key] = value
    fields = {}
    for key, value in raw.items():
        if key not in parsers:
            known = ", ".join(sorted(parsers))
            raise ConfigError(f"unknown key {key!r} for {command} (known: {known})")
        fields[key] = parsers[key](key, value)
    return _CONFIG_TYPES[command](**fields)


def config_to_dict(config) -> dict:
    """The fully resolved config as a JSON-ready mapping."""
    out = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    return out
