"""
Django settings for the fksbench project.

Only the parts of Django the benchmark needs are configured: the
presentation app (management commands), logging and the solver defaults.
There is no database and no URL routing.
"""

import os
import sys
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Add src directory to Python path for Clean Architecture
sys.path.insert(0, str(BASE_DIR / 'src'))


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'DJANGO_SECRET_KEY',
    'django-insecure-fksbench-local-only-key-not-for-deployment',
)

DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'presentation',
]

DATABASES = {}

USE_TZ = True

TIME_ZONE = 'UTC'


# Solver defaults. Command-line flags override these; FK_SEED overrides --seed.

EIGENSOLVER = {
    'TOL': 1e-10,
    'MAX_OUTER': 20000,
    'ZETA_FRACTION': 0.5,
    'ARNOLDI_WARMUP': 20,
    'SEED': 0,
    'SEED_OVERRIDE': os.environ.get('FK_SEED'),
    'OUTPUT_DIR': BASE_DIR / 'results',
    'VERIFY_SAMPLES': 100000,
}


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOG_LEVEL = os.environ.get('FK_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
    'loggers': {
        'domain': {'level': LOG_LEVEL, 'propagate': True},
        'application': {'level': LOG_LEVEL, 'propagate': True},
        'infrastructure': {'level': LOG_LEVEL, 'propagate': True},
        'presentation': {'level': LOG_LEVEL, 'propagate': True},
    },
}
