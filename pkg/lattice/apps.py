from django.apps import AppConfig


class LatticeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lattice'
    verbose_name = 'Polarised intersection lattices'
