"""
Production settings: batch runs log at INFO to a rotating file.
"""

from .base import *

DEBUG = config('DEBUG', default=False, cast=bool)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
        'file': {
            'level': 'INFO',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': config('LOG_FILE', default=str(BASE_DIR / 'chamberkit.log')),
            'maxBytes': 10 * 1024 * 1024,
            'backupCount': 5,
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console', 'file'],
            'level': 'INFO',
            'propagate': False,
        }
        for app in LOCAL_APPS
    },
    'root': {
        'level': 'WARNING',
        'handlers': ['console'],
    },
}
