import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from channelnet.exceptions import ChannelNetError, ConfigurationError
from channelnet.utils import default_threads

_VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO}

RUNTIME_FAILURE = 2


class ChannelNetCommand(BaseCommand):
    """Shared options and error mapping for the channelnet commands.

    Configuration problems exit with status 1, every other toolkit or I/O failure with 2.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            "--seed", type=int, default=None, help="Override the config seed."
        )
        parser.add_argument(
            "--threads",
            type=int,
            default=None,
            help="Worker threads; results do not depend on it.",
        )

    def handle(self, *args, **options):
        logging.getLogger("channelnet").setLevel(
            _VERBOSITY_LEVELS.get(options["verbosity"], logging.DEBUG)
        )
        seed = options.get("seed")
        if seed is not None and seed < 0:
            raise CommandError(f"--seed must be non-negative, got {seed}")
        threads = options.get("threads")
        options["threads"] = default_threads() if threads is None else max(1, threads)
        try:
            self.run(**options)
        except ConfigurationError as exc:
            raise CommandError(str(exc)) from exc
        except (ChannelNetError, OSError) as exc:
            raise CommandError(str(exc), returncode=RUNTIME_FAILURE) from exc

    def run(self, **options):
        raise NotImplementedError

    def output_dir(self, options):
        out = Path(options["out"])
        out.mkdir(parents=True, exist_ok=True)
        return out

    def wrote(self, path):
        self.stdout.write(self.style.SUCCESS(f"wrote {path}"))
