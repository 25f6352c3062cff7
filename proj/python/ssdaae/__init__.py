"""Semi-supervised denoising adversarial autoencoders for lesion classification."""

from ._core import (
    ConfigError,
    ContractError,
    IngestionError,
    Model,
    ProtocolError,
    SENSITIVITY_TARGETS,
    ShapeError,
    config_keys,
    metrics_report,
    read_dataset_dir,
    read_tensor_file,
    remove_identifier_patch,
    roc_auc,
    specificity_at_sensitivity,
    synth_generate,
    variants,
    write_tensor_file,
)
from ._core import resolve_config as _resolve_config
from ._core import train as _train

import json as _json


def _overrides(settings):
    out = []
    for key, value in (settings or {}).items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        out.append(f"{key}={value}")
    return out


def resolve_config(config=None, **settings):
    """Resolved run configuration as a dict of dotted keys.

    Keyword names use double underscores for dots, e.g. train__epochs=3.
    """
    return _json.loads(_resolve_config(config, _overrides({k.replace("__", "."): v for k, v in settings.items()})))


def train(config=None, **settings):
    """Train one model and return run_dir, step_log_sha256, config_hash and test metrics."""
    return _train(config, _overrides({k.replace("__", "."): v for k, v in settings.items()}))


__all__ = [
    "ConfigError",
    "ContractError",
    "IngestionError",
    "Model",
    "ProtocolError",
    "SENSITIVITY_TARGETS",
    "ShapeError",
    "config_keys",
    "metrics_report",
    "read_dataset_dir",
    "read_tensor_file",
    "remove_identifier_patch",
    "resolve_config",
    "roc_auc",
    "specificity_at_sensitivity",
    "synth_generate",
    "train",
    "variants",
    "write_tensor_file",
]
