"""
Base settings shared by every chamberkit environment.

Numerical tunables are read from the environment through python-decouple so a
run can be reproduced from its environment alone.
"""

from pathlib import Path

from decouple import config

from core.exact import parse_rational

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config('SECRET_KEY', default='chamberkit-local-only')

DJANGO_APPS = [
    'django.contrib.contenttypes',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'core',
    'lattice',
    'kring',
    'walls',
    'chambers',
    'sheafmodel',
    'cli',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

MIDDLEWARE = []

# Pure computation: no persistence layer.
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# --- exact arithmetic tunables ---

# Worker cap for wall enumeration and cell decomposition.
MW_THREADS = config('MW_THREADS', default=1, cast=int)

# Newton iterates are rounded to denominators 2**NEWTON_DENOMINATOR_BITS.
NEWTON_DENOMINATOR_BITS = config('NEWTON_DENOMINATOR_BITS', default=256, cast=int)
NEWTON_MAX_ITER = config('NEWTON_MAX_ITER', default=60, cast=int)
NEWTON_TOLERANCE = config('NEWTON_TOLERANCE', default='1/1000000000000', cast=parse_rational)

WALL_SAFETY = config('WALL_SAFETY', default='2', cast=parse_rational)
WALL_BOUND_MARGIN = config('WALL_BOUND_MARGIN', default='0', cast=parse_rational)
# Radius doublings stop once the wall set is unchanged for WALL_STABLE_DOUBLINGS
# consecutive doublings, or after WALL_RADIUS_DOUBLINGS of them.
WALL_RADIUS_DOUBLINGS = config('WALL_RADIUS_DOUBLINGS', default=8, cast=int)
WALL_STABLE_DOUBLINGS = config('WALL_STABLE_DOUBLINGS', default=2, cast=int)
ENUMERATION_BUDGET = config('ENUMERATION_BUDGET', default=200000, cast=int)
ORACLE_BOX = config('ORACLE_BOX', default=12, cast=int)

REPRESENTATIVE_BUDGET = config('REPRESENTATIVE_BUDGET', default=24, cast=int)
NONLINEARITY_BUDGET = config('NONLINEARITY_BUDGET', default=400, cast=int)
CONSTANCY_SAMPLES = config('CONSTANCY_SAMPLES', default=100, cast=int)

DEFAULT_SEED = config('DEFAULT_SEED', default=20240601, cast=int)

CATALOG_DIR = Path(config('CATALOG_DIR', default=str(BASE_DIR / 'cli' / 'catalog')))
PRESET_DIR = Path(config('PRESET_DIR', default=str(BASE_DIR / 'cli' / 'presets')))
