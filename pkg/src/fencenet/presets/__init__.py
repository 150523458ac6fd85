"""Bundled run presets, one JSON file per configuration row.

A preset carries three sections: `model` (architecture), `data`
(preprocessing), and `train` (optimization). `preset_configs` turns a
preset dict into the typed config objects, applying optional overrides.
"""

from __future__ import annotations

import json
from importlib import resources

from ..data.windows import DataConfig
from ..errors import ConfigError
from ..models import ModelConfig
from ..training import TrainConfig


def list_presets() -> list:
    names = []
    for entry in resources.files("fencenet.presets").iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


def load_preset(name: str) -> dict:
    try:
        text = resources.files("fencenet.presets").joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return json.loads(text)


def preset_configs(preset: dict, train_overrides: dict | None = None,
                   data_overrides: dict | None = None,
                   model_overrides: dict | None = None):
    """(ModelConfig, DataConfig, TrainConfig) from a preset dict plus overrides."""
    model_dict = dict(preset["model"])
    if model_overrides:
        model_dict.update({k: v for k, v in model_overrides.items() if v is not None})
    data_dict = dict(preset.get("data", {}))
    if data_overrides:
        data_dict.update({k: v for k, v in data_overrides.items() if v is not None})
    train_dict = dict(preset.get("train", {}))
    if train_overrides:
        train_dict.update({k: v for k, v in train_overrides.items() if v is not None})
    model_config = ModelConfig.from_dict(model_dict)
    data_config = DataConfig(**data_dict)
    train_config = TrainConfig(**train_dict)
    model_config.validate()
    data_config.validate()
    train_config.validate()
    return model_config, data_config, train_config
