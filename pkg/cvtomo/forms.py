# cvtomo/forms.py

from itertools import product
from typing import Any, Dict, List, Optional

from django import forms
from django.core.exceptions import ValidationError

from .constants import Pipeline, Regularization
from .exceptions import InvalidInputError
from .models import BoundQuery

MAX_SEED = 2 ** 64 - 1


def _open_unit(value: Optional[float], name: str) -> Optional[float]:
    if value is not None and not 0 < value < 1:
        raise ValidationError(f"{name} must lie strictly between 0 and 1")
    return value


class TargetsForm(forms.Form):
    """Accuracy and failure probability of a learner."""
    epsilon = forms.FloatField(label="Accuracy")
    delta = forms.FloatField(label="Failure probability")

    def clean_epsilon(self) -> float:
        return _open_unit(self.cleaned_data.get('epsilon'), 'epsilon')

    def clean_delta(self) -> float:
        return _open_unit(self.cleaned_data.get('delta'), 'delta')


class SimulateTomographyForm(TargetsForm):
    """Parameters of ``simulate_tomography``."""
    pipeline = forms.ChoiceField(choices=Pipeline.choices())
    trials = forms.IntegerField(min_value=1)
    copies = forms.IntegerField(min_value=1)
    seed = forms.IntegerField(min_value=0, max_value=MAX_SEED)
    n = forms.IntegerField(min_value=1, required=False)
    t = forms.IntegerField(min_value=1, required=False)
    kappa = forms.IntegerField(min_value=1, required=False)
    energy = forms.FloatField(min_value=0.5, required=False, label="Energy per mode")
    photons = forms.FloatField(min_value=0.0, required=False, label="Photon budget per mode")
    cutoff = forms.IntegerField(min_value=1, required=False)
    workers = forms.IntegerField(min_value=1, required=False)
    oracle_accuracy = forms.FloatField(required=False, label="Oracle truncation accuracy")
    regularization = forms.ChoiceField(choices=Regularization.choices(), required=False)

    def clean_oracle_accuracy(self) -> Optional[float]:
        return _open_unit(self.cleaned_data.get('oracle_accuracy'), 'oracle_accuracy')

    def clean(self) -> Dict[str, Any]:
        cleaned_data = super().clean()
        n = cleaned_data.get('n') or 1
        t = cleaned_data.get('t') or 1
        kappa = cleaned_data.get('kappa') or 2
        if cleaned_data.get('pipeline') == Pipeline.TCOMP.value:
            if t > n:
                raise ValidationError("t must not exceed the number of modes")
            if kappa * t > n:
                raise ValidationError("kappa * t must not exceed the number of modes")
        cleaned_data['regularization'] = cleaned_data.get('regularization') or None
        cleaned_data.update(n=n, t=t, kappa=kappa)
        return cleaned_data


class BoundsForm(forms.Form):
    """Options of ``bounds``."""
    photons = forms.FloatField(min_value=0.0, required=False)
    energy = forms.FloatField(min_value=0.0, required=False)
    oracle = forms.BooleanField(required=False)
    cutoff = forms.IntegerField(min_value=1, required=False)


class SynthForm(forms.Form):
    """Parameters of ``synth``."""
    n = forms.IntegerField(min_value=1)
    t = forms.IntegerField(min_value=0)
    kappa = forms.IntegerField(min_value=1)
    seed = forms.IntegerField(min_value=0, max_value=MAX_SEED)
    energy_cap = forms.FloatField(min_value=0.5)
    cutoff = forms.IntegerField(min_value=1, required=False)

    def clean(self) -> Dict[str, Any]:
        cleaned_data = super().clean()
        n, t, kappa = (cleaned_data.get(name) for name in ('n', 't', 'kappa'))
        if None not in (n, t, kappa) and kappa * t > n:
            raise ValidationError("kappa * t must not exceed the number of modes")
        return cleaned_data


GRID_KEYS = ('n', 'k', 'epsilon', 'delta', 'photons')


class BoundsTableForm(forms.Form):
    """
    Grid of ``bounds_table``.

    The grid reads ``n=1,2;k=1;epsilon=0.1,0.05;delta=0.1;photons=1``;
    every key is required and the table spans the Cartesian product.
    """
    grid = forms.CharField()

    def clean_grid(self) -> List[BoundQuery]:
        text = self.cleaned_data.get('grid', '')
        values: Dict[str, list] = {}
        for part in filter(None, (chunk.strip() for chunk in text.split(';'))):
            if '=' not in part:
                raise ValidationError(f"grid entry '{part}' is not of the form key=v1,v2")
            key, _, raw = part.partition('=')
            key = key.strip()
            if key not in GRID_KEYS:
                raise ValidationError(f"unknown grid key '{key}'")
            cast = int if key in ('n', 'k') else float
            try:
                values[key] = [cast(item) for item in raw.split(',') if item.strip()]
            except ValueError:
                raise ValidationError(f"grid key '{key}' has a non-numeric value")
            if not values[key]:
                raise ValidationError(f"grid key '{key}' has no values")
        missing = [key for key in GRID_KEYS if key not in values]
        if missing:
            raise ValidationError(f"grid is missing {', '.join(missing)}")

        queries = []
        for n, k, epsilon, delta, photons in product(*(values[key] for key in GRID_KEYS)):
            try:
                queries.append(BoundQuery(n=n, k=k, epsilon=epsilon, delta=delta, photons=photons))
            except InvalidInputError as exc:
                raise ValidationError(str(exc))
        return queries
