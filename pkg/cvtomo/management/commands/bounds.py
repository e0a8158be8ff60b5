from cvtomo.conf import get_setting
from cvtomo.forms import BoundsForm
from cvtomo.management.base import CVTomoCommand
from cvtomo.serializers import bound_report_to_dict, dumps, load_state
from cvtomo.services.bounds_service import bound_report


class Command(CVTomoCommand):
    help = "Trace-distance bounds between two Gaussian states, optionally with the exact Fock-space value"

    def add_arguments(self, parser):
        parser.add_argument('first', help="State JSON of the first state")
        parser.add_argument('second', help="State JSON of the second state")
        parser.add_argument('--photons', type=float, help="Photon budget N (inferred when omitted)")
        parser.add_argument('--energy', type=float, help="Energy budget E (inferred when omitted)")
        parser.add_argument('--oracle', action='store_true', help="Add the exact truncated-Fock distance")
        parser.add_argument('--cutoff', type=int, help="Oracle cutoff (defaults to ORACLE_CUTOFF)")
        parser.add_argument('--no-clip', action='store_true', help="Report upper bounds above 1 as computed")
        parser.add_argument('--output', help="Write the JSON here instead of stdout")

    def run(self, **options):
        cleaned = self.validate(BoundsForm, options)
        s1 = load_state(options['first'])
        s2 = load_state(options['second'])
        oracle_cutoff = None
        if cleaned['oracle']:
            oracle_cutoff = cleaned['cutoff'] or get_setting('ORACLE_CUTOFF')
        report = bound_report(
            s1, s2,
            N=cleaned['photons'],
            E=cleaned['energy'],
            clip=not options['no_clip'],
            oracle_cutoff=oracle_cutoff,
        )
        self.write_text(dumps(bound_report_to_dict(report)), options.get('output'))
