"""Detector selection by name."""

import functools

from django.utils.module_loading import import_string

from channelnet.exceptions import ConfigurationError
from channelnet.settings import DETECTORS

NEURAL_PREFIX = "channelnet-"


def detector_names():
    return list(DETECTORS)


def get_detector(name, model=None):
    """Resolve ``name`` to a callable taking a :class:`DetectorInput`.

    ``channelnet-*`` names need a trained ``model`` whose variant matches the name.
    """
    try:
        path = DETECTORS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown detector {name!r}; choose from {', '.join(DETECTORS)}"
        ) from None
    detector = import_string(path)
    if not name.startswith(NEURAL_PREFIX):
        return detector
    if model is None:
        raise ConfigurationError(f"detector {name!r} needs a trained model (--model)")
    variant = name.removeprefix(NEURAL_PREFIX)
    if model.config.variant != variant:
        raise ConfigurationError(
            f"detector {name!r} was given a {model.config.variant} model"
        )
    return functools.partial(detector, model)
