from django.apps import AppConfig


class ZerosConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'zeros'
    verbose_name = 'Interlacing zero cascade'
