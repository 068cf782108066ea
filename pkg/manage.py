#!/usr/bin/env python
"""Django's command-line utility, defaulting to the test project settings.

``./manage.py sweep --config ...`` runs the channelnet commands against the test database.
"""

import os
import sys

if __name__ == "__main__":
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tests.settings")

    from django.core.management import execute_from_command_line

    execute_from_command_line(sys.argv)
