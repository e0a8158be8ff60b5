"""
Shared plumbing of the cvtomo management commands.

``CVTomoCommand.handle`` runs ``run`` and turns service errors into
``CommandError`` with the matching ``ExitCode``; ``validate`` runs a form
over the parsed options.
"""

import json
import logging
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from cvtomo.constants import ExitCode
from cvtomo.exceptions import (
    ConditioningError,
    InvalidInputError,
    PipelineFailure,
    TruncationError,
)

logger = logging.getLogger('cvtomo.commands')


class CVTomoCommand(BaseCommand):
    requires_system_checks = []

    def run(self, **options):
        raise NotImplementedError('subclasses of CVTomoCommand must provide a run() method')

    def validate(self, form_class, options: dict) -> dict:
        """Cleaned data of ``form_class`` or a usage error listing every field error."""
        form = form_class(data={key: value for key, value in options.items() if value is not None})
        if form.is_valid():
            return form.cleaned_data
        problems = []
        for field, errors in form.errors.items():
            for error in errors:
                problems.append(f"{field}: {error}")
        raise CommandError('; '.join(problems), returncode=ExitCode.USAGE.value)

    def write_text(self, text: str, output=None) -> None:
        """``text`` to the file ``output`` or to stdout."""
        if output:
            Path(output).write_text(text, encoding='utf-8')
            self.stdout.write(self.style.SUCCESS(f"wrote {output}"))
        else:
            self.stdout.write(text, ending='')

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except CommandError:
            raise
        except PipelineFailure as exc:
            raise CommandError(f"learner declared failure: {exc}", returncode=ExitCode.PIPELINE.value)
        except (ConditioningError, TruncationError, InvalidInputError, np.linalg.LinAlgError) as exc:
            raise CommandError(f"numerical failure: {exc}", returncode=ExitCode.NUMERICAL.value)
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f"I/O error: {exc}", returncode=ExitCode.IO.value)
