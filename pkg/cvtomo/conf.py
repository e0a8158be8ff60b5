"""Access to the ``CVTOMO`` settings dict with fallbacks from constants."""

from django.conf import settings

from .constants import DEFAULTS


def get_setting(name: str):
    """Return ``settings.CVTOMO[name]`` or the built-in default."""
    configured = getattr(settings, 'CVTOMO', {}) or {}
    if name in configured and configured[name] is not None:
        return configured[name]
    return DEFAULTS[name]
