from django.apps import AppConfig


class WallsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'walls'
    verbose_name = 'Destabilising walls'
