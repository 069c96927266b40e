"""Pytest wiring: configure Django settings before the app test modules import."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'chamberkit.settings')
os.environ.setdefault('DJANGO_ENVIRONMENT', 'development')
django.setup()
