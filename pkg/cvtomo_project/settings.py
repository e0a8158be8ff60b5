"""
Django settings for cvtomo_project project.

The project hosts no web surface: it is the configuration shell for the
``cvtomo`` app and its management commands. Every numerical knob lives in
the ``CVTOMO`` dict below and can be overridden from the environment or a
``.env`` file.
"""

import os
from pathlib import Path

import environ
from dotenv import load_dotenv

# Load variables from a local .env file
load_dotenv()

env = environ.Env(
    CVTOMO_TOLERANCE=(float, 1e-8),
    CVTOMO_CONDITIONING_FLOOR=(float, 1e-12),
    CVTOMO_FOCK_BUFFER=(int, 5),
    CVTOMO_TRUNCATION_BUDGET=(float, 1e-3),
    CVTOMO_POST_SELECTION_FLOOR=(float, 0.25),
    CVTOMO_INNER_MAX_DIM=(int, 48),
    CVTOMO_INNER_BASIS_SEED=(int, 20240917),
    CVTOMO_HEAD_CUTOFF=(int, 8),
    CVTOMO_ORACLE_CUTOFF=(int, 30),
    CVTOMO_TCOMP_MOMENT_FRACTION=(float, 0.5),
    CVTOMO_WORKERS=(int, 1),
    CVTOMO_LOG_LEVEL=(str, 'WARNING'),
)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    'SECRET_KEY',
    'django-insecure-cvtomo-6y#b1q!p0x2m$7w@r3k^s9t&v4n8d+e5f(h)j=l-z',
)

DEBUG = os.getenv('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'cvtomo',
]

# No persistence: states and reports travel as JSON/CSV files.
DATABASES = {}

USE_I18N = False
USE_TZ = True


# Numerical configuration
CVTOMO = {
    'TOLERANCE': env('CVTOMO_TOLERANCE'),
    'CONDITIONING_FLOOR': env('CVTOMO_CONDITIONING_FLOOR'),
    'FOCK_BUFFER': env('CVTOMO_FOCK_BUFFER'),
    'TRUNCATION_BUDGET': env('CVTOMO_TRUNCATION_BUDGET'),
    'POST_SELECTION_FLOOR': env('CVTOMO_POST_SELECTION_FLOOR'),
    'INNER_MAX_DIM': env('CVTOMO_INNER_MAX_DIM'),
    'INNER_BASIS_SEED': env('CVTOMO_INNER_BASIS_SEED'),
    'HEAD_CUTOFF': env('CVTOMO_HEAD_CUTOFF'),
    'ORACLE_CUTOFF': env('CVTOMO_ORACLE_CUTOFF'),
    'TCOMP_MOMENT_FRACTION': env('CVTOMO_TCOMP_MOMENT_FRACTION'),
    'WORKERS': env('CVTOMO_WORKERS'),
}


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'cvtomo': {
            'handlers': ['console'],
            'level': env('CVTOMO_LOG_LEVEL'),
            'propagate': False,
        },
    },
}
