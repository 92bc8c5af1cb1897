from django.apps import AppConfig


class CoeffsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'coeffs'
    verbose_name = 'Coefficient families and limit profiles'
