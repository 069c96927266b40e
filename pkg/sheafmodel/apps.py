from django.apps import AppConfig


class SheafmodelConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sheafmodel'
    verbose_name = 'Presented sheaves'
