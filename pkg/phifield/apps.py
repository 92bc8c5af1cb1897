from django.apps import AppConfig


class PhifieldConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'phifield'
    verbose_name = 'Branch function phi and its checks'
