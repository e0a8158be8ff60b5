"""
Command-line entry point of cvtomo.

``run(argv)`` accepts ``williamson``, ``bounds``, ``simulate-tomography``,
``bounds-table`` and ``synth`` (underscored names work too) and returns
the exit status instead of exiting.
"""

import os
import sys
from typing import List, Optional

from .constants import ExitCode

COMMAND_ALIASES = {
    'simulate-tomography': 'simulate_tomography',
    'bounds-table': 'bounds_table',
}


def run(argv: Optional[List[str]] = None) -> int:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cvtomo_project.settings')
    from django.core.management import ManagementUtility

    argv = list(sys.argv[1:] if argv is None else argv)
    if argv:
        argv[0] = COMMAND_ALIASES.get(argv[0], argv[0])
    try:
        ManagementUtility(['cvtomo'] + argv).execute()
    except SystemExit as exc:
        if exc.code is None:
            return ExitCode.SUCCESS.value
        # Django exits with 1 for unknown subcommands
        if not isinstance(exc.code, int) or exc.code == 1:
            return ExitCode.USAGE.value
        return exc.code
    return ExitCode.SUCCESS.value


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
