from django.apps import AppConfig

from .settings import app_settings


class PTWaveguideAppConfig(AppConfig):
    name = "ptwaveguide.core"
    label = "ptwaveguide"
    verbose_name = "PT-symmetric Waveguide Spectra"

    def ready(self):
        from . import tasks  # noqa

        app_settings.load()
