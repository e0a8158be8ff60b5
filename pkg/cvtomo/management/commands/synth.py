from pathlib import Path

import numpy as np

from cvtomo.forms import SynthForm
from cvtomo.management.base import CVTomoCommand
from cvtomo.serializers import compressed_to_dict, density_to_dict, dumps, state_to_dict
from cvtomo.services.fock_service import energy_moments, gaussianification
from cvtomo.services.tomography_service import synth_t_doped


class Command(CVTomoCommand):
    help = "Write a random t-doped pure state and its compressed ground truth (m, S, phi)"

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True)
        parser.add_argument('--t', type=int, required=True)
        parser.add_argument('--kappa', type=int, required=True)
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--energy-cap', dest='energy_cap', type=float, help="Defaults to n")
        parser.add_argument('--cutoff', type=int, help="Fock cutoff (defaults to ORACLE_CUTOFF)")
        parser.add_argument('--output', default='.', help="Directory for state.json and truth.json")

    def run(self, **options):
        if options.get('energy_cap') is None and options.get('n') is not None:
            options['energy_cap'] = float(options['n'])
        cleaned = self.validate(SynthForm, options)
        rng = np.random.default_rng(cleaned['seed'])
        rho, truth = synth_t_doped(
            cleaned['n'], cleaned['t'], cleaned['kappa'], rng, cleaned['energy_cap'], cutoff=cleaned['cutoff'],
        )

        # state.json loads as the state's Gaussianification
        state = state_to_dict(gaussianification(rho))
        state.update(
            t=cleaned['t'],
            kappa=cleaned['kappa'],
            seed=cleaned['seed'],
            energy=energy_moments(rho)[0],
            density=density_to_dict(rho),
        )
        directory = Path(options['output'])
        directory.mkdir(parents=True, exist_ok=True)
        (directory / 'state.json').write_text(dumps(state), encoding='utf-8')
        (directory / 'truth.json').write_text(dumps(compressed_to_dict(truth)), encoding='utf-8')
        self.stdout.write(self.style.SUCCESS(f"wrote {directory / 'state.json'} and {directory / 'truth.json'}"))
