"""The ``channelnet`` console script.

Runs the app's management commands under a minimal standalone Django configuration unless
``DJANGO_SETTINGS_MODULE`` already points somewhere else.
"""

import os
import sys

SUBCOMMANDS = ("train", "sweep", "robust", "gradcheck", "countmults", "plot")

USAGE_ERROR = 1

USAGE = f"usage: channelnet {{{','.join(SUBCOMMANDS)}}} [options]\n"


def main(argv=None):
    """Run one subcommand and return its exit status (0, 1 for usage, 2 for failures)."""
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return 0 if argv else USAGE_ERROR
    subcommand, args = argv[0], argv[1:]
    if subcommand not in SUBCOMMANDS:
        sys.stderr.write(f"channelnet: unknown subcommand {subcommand!r}\n{USAGE}")
        return USAGE_ERROR

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "channelnet.cli_settings")
    import django
    from django.core.management import call_command, load_command_class
    from django.core.management.base import CommandError

    django.setup()
    try:
        call_command(subcommand, *args)
    except CommandError as exc:
        sys.stderr.write(f"channelnet {subcommand}: {exc}\n")
        if exc.returncode == USAGE_ERROR:
            command = load_command_class("channelnet", subcommand)
            parser = command.create_parser("channelnet", subcommand)
            sys.stderr.write(parser.format_usage())
        return exc.returncode
    except SystemExit as exc:
        # --help exits through argparse.
        return exc.code or 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
