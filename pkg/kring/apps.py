from django.apps import AppConfig


class KringConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'kring'
    verbose_name = 'Numerical Grothendieck ring models'
