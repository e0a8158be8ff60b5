from cvtomo.management.base import CVTomoCommand
from cvtomo.serializers import decomposition_to_dict, dumps, load_state
from cvtomo.services.symplectic_service import williamson


class Command(CVTomoCommand):
    help = "Williamson decomposition V = S D S^T of the covariance matrix in a state file"

    def add_arguments(self, parser):
        parser.add_argument('state', help="State JSON {n, mean, cov}")
        parser.add_argument('--output', help="Write the JSON here instead of stdout")

    def run(self, **options):
        state = load_state(options['state'])
        decomposition = williamson(state.cov)
        self.write_text(dumps(decomposition_to_dict(decomposition)), options.get('output'))
