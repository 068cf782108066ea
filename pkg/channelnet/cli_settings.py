"""Django settings for the standalone ``channelnet`` command.

Results go to the log rather than a database; the in-memory SQLite database only exists so
the signal flows can open their transactions.
"""

import os

SECRET_KEY = os.environ.get("CHANNELNET_SECRET_KEY", "channelnet-cli-not-a-secret")

DEBUG = False

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "channelnet",
]

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": ":memory:",
    }
}

USE_TZ = True
TIME_ZONE = "UTC"

DEFAULT_AUTO_FIELD = "django.db.models.AutoField"

CHANNELNET_RESULTS_BACKEND = "channelnet.backends.LoggingBackend"

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "channelnet": {
            "handlers": ["console"],
            "level": os.environ.get("CHANNELNET_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
