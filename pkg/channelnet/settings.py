from django.conf import settings

# Should sweep records and training epochs be forwarded to the results backend?
WATCH_SWEEP_EVENTS = getattr(settings, "CHANNELNET_WATCH_SWEEP_EVENTS", True)
WATCH_TRAINING_EVENTS = getattr(settings, "CHANNELNET_WATCH_TRAINING_EVENTS", True)

# results backend settings
RESULTS_BACKEND = getattr(
    settings, "CHANNELNET_RESULTS_BACKEND", "channelnet.backends.ModelBackend"
)

# Detectors selectable by name. Extra entries map a name to a dotted path of a
# callable taking a DetectorInput (or a model first, for "channelnet-*" names).
DETECTORS = {
    "zf": "channelnet.detectors.classic.detect_zf",
    "mmse": "channelnet.detectors.classic.detect_mmse",
    "amp": "channelnet.detectors.classic.detect_amp",
    "vblast": "channelnet.detectors.classic.detect_vblast",
    "ml": "channelnet.detectors.classic.detect_ml",
    "channelnet-mlp": "channelnet.network.detect",
    "channelnet-conv": "channelnet.network.detect",
}
DETECTORS.update(getattr(settings, "CHANNELNET_DETECTORS_EXTRA", {}))

# Desk-scale limits for the baselines.
ML_MAX_CANDIDATES = int(getattr(settings, "CHANNELNET_ML_MAX_CANDIDATES", 10**6))
AMP_ITERATIONS = int(getattr(settings, "CHANNELNET_AMP_ITERATIONS", 50))

# Monte Carlo defaults
SWEEP_MIN_ERRORS = int(getattr(settings, "CHANNELNET_SWEEP_MIN_ERRORS", 100))
SWEEP_MAX_SYMBOLS = int(getattr(settings, "CHANNELNET_SWEEP_MAX_SYMBOLS", 10**6))
SWEEP_BATCH = int(getattr(settings, "CHANNELNET_SWEEP_BATCH", 256))

# Admin
ADMIN_SHOW_SWEEP_EVENTS = getattr(settings, "CHANNELNET_ADMIN_SHOW_SWEEP_EVENTS", True)
ADMIN_SHOW_EPOCH_EVENTS = getattr(settings, "CHANNELNET_ADMIN_SHOW_EPOCH_EVENTS", True)

SWEEP_EVENT_LIST_FILTER = getattr(
    settings, "CHANNELNET_SWEEP_EVENT_LIST_FILTER", ["detector", "scenario", "datetime"]
)
SWEEP_EVENT_SEARCH_FIELDS = getattr(
    settings, "CHANNELNET_SWEEP_EVENT_SEARCH_FIELDS", ["detector", "scenario"]
)
EPOCH_EVENT_LIST_FILTER = getattr(
    settings, "CHANNELNET_EPOCH_EVENT_LIST_FILTER", ["run", "datetime"]
)
EPOCH_EVENT_SEARCH_FIELDS = getattr(
    settings, "CHANNELNET_EPOCH_EVENT_SEARCH_FIELDS", ["run"]
)
