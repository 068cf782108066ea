"""TOML run configuration shared by the ``train``, ``sweep`` and ``robust`` commands.

Tables are flattened to dotted keys (``scenario.n_r``, ``train.epochs``...). The key table
below is the compatibility contract: an unknown key or a mistyped value is an error that
names the key.
"""

from __future__ import annotations

import logging
import math
import sys
from pathlib import Path

from channelnet.channel import ChannelScenario, NoiseKind
from channelnet.exceptions import ConfigurationError
from channelnet.network import ChannelNetConfig
from channelnet.training import LrSchedule, TrainConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

_NUMBER = (int, float)

CONFIG_KEYS = {
    "scenario.n_r": int,
    "scenario.n_t": int,
    "scenario.channel_model": str,
    "scenario.rho": _NUMBER,
    "scenario.noise_kind": str,
    "scenario.nu": _NUMBER,
    "scenario.est_snr_db": _NUMBER,
    "scenario.qam_order": int,
    "scenario.seed": int,
    "model.layers": int,
    "model.features": int,
    "model.variant": str,
    "model.kernel_size": int,
    "model.filters": int,
    "model.conv_placement": str,
    "model.head_gain": _NUMBER,
    "train.epochs": int,
    "train.samples_per_epoch": int,
    "train.batch": int,
    "train.lr": _NUMBER,
    "train.lr_decay_factor": _NUMBER,
    "train.lr_decay_every": int,
    "train.snr_lo": _NUMBER,
    "train.snr_hi": _NUMBER,
    "train.seed": int,
    "train.checkpoint_every": int,
    "sweep.detectors": list,
    "sweep.snr": (str, list),
    "sweep.min_errors": int,
    "sweep.max_symbols": int,
    "sweep.batch": int,
    "sweep.seed": int,
    "robust.est_snr_db": list,
    "robust.noise_kinds": list,
}


def flatten(table, prefix=""):
    flat = {}
    for key, value in table.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def validate(flat):
    for key, value in flat.items():
        expected = CONFIG_KEYS.get(key)
        if expected is None:
            raise ConfigurationError(f"unknown config key {key!r}")
        # bool is an int subclass; TOML booleans never stand in for numbers.
        if isinstance(value, bool) or not isinstance(value, expected):
            raise ConfigurationError(
                f"config key {key!r} has a value of the wrong type: {value!r}"
            )
        if key.endswith(".seed") and value < 0:
            raise ConfigurationError(f"config key {key!r} must be non-negative: {value}")
    return flat


def load_config(path):
    """Read, flatten and validate a TOML config file."""
    path = Path(path)
    try:
        with path.open("rb") as stream:
            table = tomllib.load(stream)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"malformed config {path}: {exc}") from exc
    logger.debug(f"Loaded config {path}")
    return validate(flatten(table))


def _section(flat, name):
    prefix = f"{name}."
    return {
        key[len(prefix) :]: value for key, value in flat.items() if key.startswith(prefix)
    }


def scenario_from_config(flat) -> ChannelScenario:
    values = _section(flat, "scenario")
    for required in ("n_r", "n_t"):
        if required not in values:
            raise ConfigurationError(f"config key 'scenario.{required}' is required")
    return ChannelScenario(
        n_r=values["n_r"],
        n_t=values["n_t"],
        model=values.get("channel_model", "rayleigh"),
        rho=float(values.get("rho", 0.0)),
        noise=values.get("noise_kind", "gaussian"),
        nu=float(values.get("nu", 3.0)),
        est_snr_db=values.get("est_snr_db"),
        qam_order=values.get("qam_order", 16),
        seed=values.get("seed", 0),
    )


def model_config_from(flat, classes) -> ChannelNetConfig:
    values = _section(flat, "model")
    if "head_gain" in values:
        values["head_gain"] = float(values["head_gain"])
    return ChannelNetConfig(classes=classes, **values)


def train_config_from(flat, scenario: ChannelScenario, seed=None) -> TrainConfig:
    values = _section(flat, "train")
    defaults = LrSchedule()
    schedule = LrSchedule(
        lr=float(values.get("lr", defaults.lr)),
        factor=float(values.get("lr_decay_factor", defaults.factor)),
        every=values.get("lr_decay_every", defaults.every),
    )
    return TrainConfig(
        scenario=scenario,
        snr_range_db=(float(values.get("snr_lo", 0.0)), float(values.get("snr_hi", 20.0))),
        epochs=values.get("epochs", 30),
        samples_per_epoch=values.get("samples_per_epoch", 200_000),
        batch=values.get("batch", 64),
        schedule=schedule,
        seed=values.get("seed", scenario.seed) if seed is None else seed,
        checkpoint_every=values.get("checkpoint_every", 1),
    )


def parse_snr_range(text):
    """``"LO:HI:STEP"`` to the inclusive list of SNR points; a bare number is one point."""
    parts = str(text).split(":")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ConfigurationError(f"malformed SNR range {text!r}; use LO:HI:STEP") from None
    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3:  # noqa: PLR2004
        raise ConfigurationError(f"malformed SNR range {text!r}; use LO:HI:STEP")
    lo, hi, step = numbers
    if step <= 0 or hi < lo:
        raise ConfigurationError(f"SNR range {text!r} needs STEP > 0 and LO <= HI")
    count = math.floor((hi - lo) / step + 1e-9) + 1
    return [round(lo + index * step, 10) for index in range(count)]


def parse_detectors(text):
    names = [name.strip() for name in str(text).split(",") if name.strip()]
    if not names:
        raise ConfigurationError("no detectors given")
    return names


def sweep_options_from(flat, seed=None):
    """Keyword arguments for :func:`channelnet.evaluation.run_sweep`."""
    values = _section(flat, "sweep")
    options = {
        key: values[key] for key in ("min_errors", "max_symbols", "batch") if key in values
    }
    options["seed"] = values.get("seed", 0) if seed is None else seed
    return options


def sweep_snr_list(flat):
    snr = flat.get("sweep.snr")
    if snr is None:
        return None
    if isinstance(snr, str):
        return parse_snr_range(snr)
    for value in snr:
        if isinstance(value, bool) or not isinstance(value, _NUMBER):
            raise ConfigurationError(
                f"config key 'sweep.snr' holds a non-number: {value!r}"
            )
    return [float(value) for value in snr]


def robust_options_from(flat):
    values = _section(flat, "robust")
    options = {}
    if "est_snr_db" in values:
        options["est_snr_list"] = [float(value) for value in values["est_snr_db"]]
    if "noise_kinds" in values:
        kinds = []
        for value in values["noise_kinds"]:
            try:
                kinds.append(NoiseKind(value))
            except ValueError:
                raise ConfigurationError(
                    f"config key 'robust.noise_kinds' holds unknown kind {value!r}"
                ) from None
        options["noise_kinds"] = kinds
    return options
