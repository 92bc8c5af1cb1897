"""
Django settings for the fourterm project.

The project has no web surface: Django provides configuration, logging,
the management-command CLI and the test runner. Numeric knobs are read
through python-decouple so they can be overridden from the environment
or a .env file.
"""

import os
from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='django-insecure-fourterm-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
DJANGO_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
]

THIRD_PARTY_APPS = [
    # Serializers validate descriptors/run configs and render reports
    'rest_framework',
]

LOCAL_APPS = [
    'coeffs',
    'polycore',
    'zeros',
    'measures',
    'phifield',
    'toeplitz',
    'reports',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# Database
# Only the test runner touches this; every test case is a SimpleTestCase.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Create necessary directories
os.makedirs(BASE_DIR / 'logs', exist_ok=True)

# ==============================================================================
# LOGGING CONFIGURATION
# ==============================================================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'logs' / 'fourterm.log',
            'formatter': 'simple',
        },
    },
    'root': {
        'level': 'WARNING',
        'handlers': ['console'],
    },
    'loggers': {
        app: {
            'handlers': ['console', 'file'],
            'level': config('FOURTERM_LOG_LEVEL', default='INFO'),
            'propagate': False,
        }
        for app in LOCAL_APPS
    },
}

# ==============================================================================
# NUMERICS
# ==============================================================================

# Profiles are only evaluated for t in (0, t*]
FOURTERM_T_HORIZON = config('FOURTERM_T_HORIZON', default=4.0, cast=float)

# Smallest |P_k/P_{k-1}| accepted by the complex ratio recurrence
FOURTERM_NEAR_POLE_FLOOR = config('FOURTERM_NEAR_POLE_FLOOR', default=1e-280, cast=float)

# Zero cascade: relative step tolerance and Newton polish budget
FOURTERM_CASCADE_XTOL = config('FOURTERM_CASCADE_XTOL', default=1e-13, cast=float)
FOURTERM_NEWTON_POLISH_STEPS = config('FOURTERM_NEWTON_POLISH_STEPS', default=5, cast=int)
FOURTERM_BISECTION_MAX_STEPS = config('FOURTERM_BISECTION_MAX_STEPS', default=200, cast=int)
# Zeros smaller than this are resolved to an absolute xtol * floor
FOURTERM_CASCADE_ABS_FLOOR = config('FOURTERM_CASCADE_ABS_FLOOR', default=1e-30, cast=float)

# Direct scan of P_n when the cascade breaks: grid points per requested zero
FOURTERM_SCAN_POINTS_PER_ZERO = config('FOURTERM_SCAN_POINTS_PER_ZERO', default=50, cast=int)

# Adaptive Gauss-Kronrod quadrature (scipy.integrate.quad)
FOURTERM_QUAD_EPSABS = config('FOURTERM_QUAD_EPSABS', default=1e-11, cast=float)
FOURTERM_QUAD_EPSREL = config('FOURTERM_QUAD_EPSREL', default=1e-11, cast=float)
FOURTERM_QUAD_LIMIT = config('FOURTERM_QUAD_LIMIT', default=200, cast=int)

# Cubic-root homotopy oracle for phi
FOURTERM_HOMOTOPY_ANCHOR = config('FOURTERM_HOMOTOPY_ANCHOR', default=1e4, cast=float)

FOURTERM_OUTPUT_DIR = Path(config('FOURTERM_OUTPUT_DIR', default=str(BASE_DIR / 'output')))
FOURTERM_DEFAULT_SEED = config('FOURTERM_DEFAULT_SEED', default=20240601, cast=int)

# Acceptance gates used by `manage.py verify`; `--tol KEY=VAL` overrides one run
FOURTERM_CHECK_TOLERANCES = {
    'identity': 1e-12,
    'oracle': 1e-10,
    'tail': 2e-6,
    'laurent': 1e-6,
    'analyticity': 1e-6,
    'normalization': 1e-8,
    'jump': 1e-4,
    'growth': 0.05,
    'stieltjes': 1e-7,
    'derivation': 1e-6,
    'toeplitz': 1e-12,
    'charpoly': 1e-10,
    'total_nonnegativity': 1e-12,
    'equivariance': 1e-10,
    'ks_constant': 0.05,
    'ks_laguerre': 0.07,
    'ks_macdonald': 0.07,
    'ks_slack': 0.2,
    'ratio': 1e-3,
    'ratio_zero_family': 1e-14,
    'zeros_oracle': 1e-10,
    'moments': 1e-8,
}
