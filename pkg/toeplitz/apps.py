from django.apps import AppConfig


class ToeplitzConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'toeplitz'
    verbose_name = 'Banded Toeplitz matrices'
