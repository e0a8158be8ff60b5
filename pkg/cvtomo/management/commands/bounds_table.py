import io

from cvtomo.forms import BoundsTableForm
from cvtomo.management.base import CVTomoCommand
from cvtomo.serializers import write_bound_table_csv
from cvtomo.services.complexity_service import bound_table


class Command(CVTomoCommand):
    help = "Sample-complexity calculators over a parameter grid, as CSV"

    def add_arguments(self, parser):
        parser.add_argument(
            '--grid', required=True,
            help="e.g. 'n=1,2;k=1;epsilon=0.1,0.05;delta=0.1;photons=1'",
        )
        parser.add_argument('--output', help="Write the CSV here instead of stdout")

    def run(self, **options):
        queries = self.validate(BoundsTableForm, options)['grid']
        buffer = io.StringIO()
        write_bound_table_csv(bound_table(queries), buffer)
        self.write_text(buffer.getvalue(), options.get('output'))
