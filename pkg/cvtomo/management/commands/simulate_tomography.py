import io
from pathlib import Path

from django.core.management.base import CommandError

from cvtomo.constants import ExitCode, Pipeline, Regularization
from cvtomo.forms import SimulateTomographyForm
from cvtomo.management.base import CVTomoCommand
from cvtomo.models import ExperimentConfig
from cvtomo.serializers import dumps, load_state, report_to_dict, write_trials_csv
from cvtomo.services.experiment_service import run_trials, summarize


def _trial_to_dict(row) -> dict:
    data = {'trial': row.trial, 'declared_failure': row.declared_failure, 'failure_reason': row.failure_reason}
    if row.report is not None:
        data['report'] = report_to_dict(row.report)
    return data


class Command(CVTomoCommand):
    help = "Seeded Monte-Carlo trials of a tomography pipeline, one CSV row per trial"

    def add_arguments(self, parser):
        parser.add_argument('--pipeline', required=True, choices=[item.value for item in Pipeline])
        parser.add_argument('--trials', type=int, required=True)
        parser.add_argument('--copies', type=int, required=True, help="Copy budget N of every trial")
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--epsilon', type=float, default=0.1)
        parser.add_argument('--delta', type=float, default=0.1)
        parser.add_argument('--n', type=int, help="Modes of the random true state")
        parser.add_argument('--t', type=int, help="Non-Gaussian gates (tcomp)")
        parser.add_argument('--kappa', type=int, help="Gate locality in quadratures (tcomp)")
        parser.add_argument('--energy', type=float, help="Energy per mode of the true state")
        parser.add_argument('--photons', type=float, help="Photon budget per mode (moment)")
        parser.add_argument('--cutoff', type=int, help="Fock cutoff of the oracle (overrides --oracle-accuracy)")
        parser.add_argument(
            '--oracle-accuracy', dest='oracle_accuracy', type=float,
            help="Truncation accuracy the oracle cutoff is sized for (defaults to ORACLE_CUTOFF)",
        )
        parser.add_argument(
            '--regularization', choices=[item.value for item in Regularization],
            help="Covariance regularization (defaults to adaptive for an explicit copy budget)",
        )
        parser.add_argument('--workers', type=int, help="Worker processes (defaults to CVTOMO_WORKERS)")
        parser.add_argument('--state', help="State JSON used as the true state (gaussian, moment)")
        parser.add_argument('--output', help="Write the CSV here instead of stdout")
        parser.add_argument('--json', dest='json_output', help="Also write the summary and every trial report as JSON here")

    def run(self, **options):
        cleaned = self.validate(SimulateTomographyForm, options)
        state = load_state(options['state']) if options.get('state') else None
        config = ExperimentConfig(
            pipeline=cleaned['pipeline'],
            trials=cleaned['trials'],
            seed=cleaned['seed'],
            epsilon=cleaned['epsilon'],
            delta=cleaned['delta'],
            n=state.n if state is not None else cleaned['n'],
            copies=cleaned['copies'],
            t=cleaned['t'],
            kappa=cleaned['kappa'],
            energy=cleaned['energy'],
            photons=cleaned['photons'],
            cutoff=cleaned['cutoff'],
            oracle_accuracy=cleaned['oracle_accuracy'],
            regularization=cleaned['regularization'],
            state=state,
            workers=cleaned['workers'] or 0,
            output=options.get('output'),
        )
        results = run_trials(config)

        buffer = io.StringIO()
        write_trials_csv(results, buffer)
        self.write_text(buffer.getvalue(), config.output)

        summary = summarize(results)
        if options.get('json_output'):
            payload = {
                'summary': summary,
                'trials': [_trial_to_dict(row) for row in results],
            }
            Path(options['json_output']).write_text(dumps(payload), encoding='utf-8')
        self.stderr.write(
            f"{summary['successes']}/{summary['trials']} trials within epsilon, "
            f"{summary['declared_failures']} declared failure(s)"
        )
        if summary['declared_failures'] == summary['trials']:
            raise CommandError("every trial declared failure", returncode=ExitCode.PIPELINE.value)
